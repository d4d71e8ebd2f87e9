//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file advection_model.hpp
//  \brief Test-only scalar PDE: u_t + div(a u) = 0 with a constant advection vector.
//         Exact solutions are translations, which makes it the reference model for
//         predictor/corrector/limiter oracles.

#ifndef ADERDG_TESTS_ADVECTION_MODEL_HPP_
#define ADERDG_TESTS_ADVECTION_MODEL_HPP_

#include "aderdg/pde.hpp"

namespace aderdg::testing {

class AdvectionModel final : public PdeModel {
 public:
  explicit AdvectionModel(double ax = 1.0, double ay = 0.0, double az = 0.0);

  int nvars() const override { return 1; }
  std::string name() const override { return "advect"; }
  bool is_mhd() const override { return false; }
  std::vector<std::string> var_names() const override { return {"u"}; }

  void flux(const double* u, const double* g, int dims, double* F) const override;
  double max_convective_speed(const double* u, const double* n) const override;
  double max_viscous_speed(const double* u) const override;
  bool cons_to_prim(const double* u, double* prim) const override;
  void prim_to_cons(const double* prim, double* u) const override;
  bool admissible(const double* u) const override;
  double pressure(const double* u) const override;
  int dmp_count() const override { return 1; }
  double dmp_quantity(int, const double* u) const override { return u[0]; }

  double a[3];
};

}  // namespace aderdg::testing

#endif  // ADERDG_TESTS_ADVECTION_MODEL_HPP_
