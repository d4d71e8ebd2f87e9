//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file config.hpp
//  \brief Flat key = value run configuration with '#' comments. Every key is validated
//         against the registry before a run starts; unknown keys are rejected.

#ifndef ADERDG_CONFIG_HPP_
#define ADERDG_CONFIG_HPP_

#include <string>

#include "aderdg/grid.hpp"
#include "aderdg/limiter.hpp"
#include "aderdg/predictor.hpp"
#include "aderdg/scenario.hpp"

namespace aderdg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string scenario;
  std::string pde_override;  // empty: scenario default
  ScenarioOverrides overrides;

  int degree = 3;
  int ns = -1;  // subcells per direction; -1 selects 2N+1
  double cfl = 0.9;

  PredictorOptions predictor;
  LimiterOptions limiter;
  bool limiter_enabled = true;

  AdaptControl amr;       // lmax/rfac/thresholds/indicator ("" = scenario default)
  int amr_interval = 10;  // coarse steps between adaptations

  long max_steps = -1;  // unlimited when < 0
  int threads = 1;

  std::string out_dir = "out";
  int out_every_steps = 0;      // 0: only first/last snapshot
  double out_every_time = 0.0;  // simulation-time cadence, 0: off
  int diag_every_steps = 1;
};

// Parse one file. Later assignments win; `apply_key` is exposed for CLI overrides.
RunConfig parse_config_file(const std::string& path);
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);
// Full validation pass (ranges, required keys); throws ConfigError.
void validate_config(const RunConfig& cfg);

}  // namespace aderdg

#endif  // ADERDG_CONFIG_HPP_
