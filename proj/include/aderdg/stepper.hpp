//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file stepper.hpp
//  \brief Time advance: synchronized per-level sub-cycling with element-local
//         predictors, face flux exchange, and the a-posteriori subcell limiting cycle
//         at every sub-step close.

#ifndef ADERDG_STEPPER_HPP_
#define ADERDG_STEPPER_HPP_

#include <string>

#include "aderdg/grid.hpp"
#include "aderdg/limiter.hpp"

namespace aderdg {

struct StepperOptions {
  double cfl = 0.9;
  PredictorOptions predictor;
  LimiterOptions limiter;
  bool limiter_enabled = true;
  bool force_limiter = false;  // treat every cell as troubled (testing/diagnostics)
  int max_dt_retries = 3;
  int threads = 1;
};

struct StepStats {
  double dt0 = 0.0;
  int limited_cells = 0;
  int active_cells = 0;
  int predictor_warnings = 0;
  int dt_retries = 0;
  bool terminal_failure = false;
  std::string failure_message;
};

class Stepper {
 public:
  Stepper(Grid& grid, const PdeModel& model, const BoundaryConditions& bc,
          const StepperOptions& opt);

  // Global coarse step obeying the per-level CFL bound; throws when the grid is empty
  // or no cell yields an admissible wave-speed sample.
  double compute_dt() const;

  // Advance the whole hierarchy by dt0 starting at time t. Retries with a halved step
  // when a sub-step open detects a CFL violation; gives up after max_dt_retries.
  StepStats step(double t, double dt0);

  const StepperOptions& options() const { return opt_; }

 private:
  struct Snapshot;

  void open_levels(int j, int min_level, double tj, double dtf, int M, StepStats& stats);
  void integrate_faces(int j, double tj, double dtf, int M, StepStats& stats);
  void close_levels(int j, double dtf, int M, StepStats& stats);

  void face_trace(const Face& f, int side_cell, bool is_fine_side, double t_node,
                  int time_node, int tan_node, double* state, double* grad) const;
  const double* old_subcell_rep(int cell_idx);

  // Limiting for one closing cell; returns false on terminal failure.
  bool recompute_troubled(int cell_idx, StepStats& stats);
  void reconcile_troubled_pair_fluxes();
  void apply_neighbor_corrections(StepStats& stats);

  void fill_patch_ghosts(int cell_idx, double* ext);

  Grid& g_;
  const PdeModel& model_;
  const BoundaryConditions& bc_;
  StepperOptions opt_;
  int nv_;

  // Per-close scratch: indices of cells closing now / troubled now.
  std::vector<int> closing_;
  std::vector<int> troubled_;
  // FV boundary fluxes of each troubled cell, by cell index.
  std::unordered_map<int, std::array<std::vector<double>, 6>> fv_bflux_;
};

// Collect the cells of one face side for subcell ghost exchange; shared with tests.
int same_level_neighbor(const Grid& g, const CellKey& key, int axis, int dir);

}  // namespace aderdg

#endif  // ADERDG_STEPPER_HPP_
