//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file aderdg_main.cpp
//  \brief Batch CLI: solve, check (validate a config without running) and a scenario
//         listing. Exit codes: 0 success, 2 config error, 3 solver failure.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aderdg/driver.hpp"

namespace {

void apply_cli_overrides(aderdg::RunConfig& cfg, const std::vector<std::string>& kvs) {
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw aderdg::ConfigError("--override expects key=value, got '" + kv + "'");
    }
    aderdg::apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aderdg — ADER discontinuous Galerkin solver with a-posteriori subcell "
               "limiting on adaptive Cartesian meshes"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long max_steps = -2;
  int threads = 0;
  std::vector<std::string> overrides;

  auto* solve = app.add_subcommand("solve", "run a configured scenario");
  solve->add_option("--config", config_path, "path to the run configuration")->required();
  solve->add_option("--out", out_dir, "output directory (overrides output.dir)");
  solve->add_option("--max-steps", max_steps, "stop after this many coarse steps");
  solve->add_option("--threads", threads, "worker thread count");
  solve->add_option("--override", overrides, "extra key=value assignments")
      ->take_all();

  auto* check = app.add_subcommand("check", "validate a configuration without running");
  check->add_option("--config", config_path, "path to the run configuration")->required();
  check->add_option("--override", overrides, "extra key=value assignments")->take_all();

  auto* scen = app.add_subcommand("scenarios", "scenario library");
  scen->add_subcommand("list", "list available scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (scen->parsed()) {
      for (const auto& [name, desc] : aderdg::scenario_list()) {
        std::cout << name << "  —  " << desc << "\n";
      }
      return 0;
    }

    aderdg::RunConfig cfg = aderdg::parse_config_file(config_path);
    apply_cli_overrides(cfg, overrides);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (max_steps != -2) cfg.max_steps = max_steps;
    if (threads > 0) cfg.threads = threads;

    if (check->parsed()) {
      aderdg::validate_config(cfg);
      // build the scenario and model once so parameter errors surface here
      aderdg::ScenarioOverrides ov = cfg.overrides;
      auto s = aderdg::build_scenario(cfg.scenario, ov);
      aderdg::make_model(cfg.pde_override.empty() ? s.pde : cfg.pde_override, s.params);
      std::cout << "config ok: scenario=" << s.name << " pde=" << s.pde
                << " degree=" << cfg.degree << "\n";
      return 0;
    }

    const aderdg::RunReport rep = aderdg::run(cfg);
    if (rep.exit_code != 0) std::cerr << "error: " << rep.message << "\n";
    return rep.exit_code;
  } catch (const aderdg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
