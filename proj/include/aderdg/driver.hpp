//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file driver.hpp
//  \brief Batch orchestration: simulation setup from a run configuration, the time
//         loop, diagnostics and CSV snapshot output.

#ifndef ADERDG_DRIVER_HPP_
#define ADERDG_DRIVER_HPP_

#include <memory>
#include <string>
#include <vector>

#include "aderdg/config.hpp"
#include "aderdg/stepper.hpp"

namespace aderdg {

struct DiagnosticsRecord {
  double t = 0.0, dt = 0.0;
  long step = 0;
  double mass = 0.0, mom[3] = {0.0, 0.0, 0.0}, energy = 0.0;
  double kinetic = 0.0, dissipation = 0.0;
  double limited_fraction = 0.0;
  long active_cells = 0;
  double max_divb = 0.0, l2_divb = 0.0;
  std::vector<long> active_per_level;
};

struct RunReport {
  int exit_code = 0;
  long steps = 0;
  double t_final = 0.0;
  double wall_seconds = 0.0;
  long limiter_activations = 0;
  long predictor_warnings = 0;
  std::string message;
};

struct Simulation {
  RunConfig cfg;
  Scenario scn;
  std::unique_ptr<PdeModel> model;
  const OperatorSet* ops = nullptr;
  std::unique_ptr<Grid> grid;
  std::unique_ptr<ScenarioBoundary> bc;
  std::unique_ptr<Stepper> stepper;
  AdaptControl amr;
  double t = 0.0;
  long step = 0;
};

// Builds the full simulation: scenario, operators, grid with initial refinement,
// initial condition (with admissibility pre-limiting), GLM speed freeze, stepper.
Simulation setup_simulation(const RunConfig& cfg);

DiagnosticsRecord diagnose(const Simulation& sim, double dt, int limited_cells,
                           const DiagnosticsRecord* prev);

void write_snapshot(const Simulation& sim, long step, const std::string& dir);
void write_diagnostics_header(std::ostream& os, const Simulation& sim);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& rec);

// Executes the configured run end to end. Exit codes: 0 success, 2 config error
// (thrown as ConfigError before this is called), 3 solver failure.
RunReport run(const RunConfig& cfg);

}  // namespace aderdg

#endif  // ADERDG_DRIVER_HPP_
