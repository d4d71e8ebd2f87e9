//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file scenario.hpp
//  \brief Initial/boundary-condition library: lid-driven cavity, Taylor-Green,
//         compressible mixing layer, shock-vortex interaction, viscous double Mach
//         reflection, Kelvin-Helmholtz (gas and MHD), magnetic reconnection, and the
//         calibration problems (Sod tube, isentropic vortex, resistive B diffusion).

#ifndef ADERDG_SCENARIO_HPP_
#define ADERDG_SCENARIO_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aderdg/grid.hpp"
#include "aderdg/pde.hpp"

namespace aderdg {

struct BoundarySpec {
  BcKind kind = BcKind::Periodic;
  double wall_v[3] = {0.0, 0.0, 0.0};
};

struct Scenario {
  std::string name;
  std::string pde = "cns";
  PdeParams params;
  int dim = 1;
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {1.0, 1.0, 1.0};
  int base[3] = {1, 1, 1};
  double t_end = 1.0;
  BoundarySpec bc[6];  // side = 2*axis + (0 lo | 1 hi)
  std::string indicator = "density";
  bool auto_ch = false;  // freeze c_h at the initial maximum convective speed

  // Primitive initial state at x (layout matches the model's primitive vector).
  std::function<void(const double* x, double* prim)> initial;
  // Primitive inflow state for AnalyticInflow sides, exact in space and time.
  std::function<void(int side, const double* x, double t, double* prim)> inflow;
};

struct ScenarioOverrides {
  std::optional<double> gamma, mu, Pr, eta, ch, Rgas, kappa;
  std::optional<double> t_end;
  std::optional<int> nx, ny, nz;
  std::optional<double> xlo, xhi, ylo, yhi, zlo, zhi;
};

Scenario build_scenario(const std::string& name, const ScenarioOverrides& ov = {});
std::vector<std::pair<std::string, std::string>> scenario_list();

// Grid-facing boundary adapter for a scenario.
class ScenarioBoundary : public BoundaryConditions {
 public:
  ScenarioBoundary(const Scenario& scn, const PdeModel& model)
      : scn_(scn), model_(model) {}
  BcKind kind(int side) const override { return scn_.bc[side].kind; }
  void ghost_state(int side, const double* x, double t, const double* u_in,
                   double* u_out) const override;

 private:
  const Scenario& scn_;
  const PdeModel& model_;
};

}  // namespace aderdg

#endif  // ADERDG_SCENARIO_HPP_
