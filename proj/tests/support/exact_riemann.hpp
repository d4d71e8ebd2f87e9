//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file exact_riemann.hpp
//  \brief Independent exact Riemann solver for the 1D ideal-gas Euler equations
//         (two-shock/rarefaction pressure iteration + self-similar sampling). Test
//         oracle only; shares no code with the solver under test.

#ifndef ADERDG_TESTS_EXACT_RIEMANN_HPP_
#define ADERDG_TESTS_EXACT_RIEMANN_HPP_

namespace aderdg::testing {

struct RiemannSide {
  double rho, u, p;
};

// Self-similar solution state at xi = x/t.
RiemannSide exact_riemann_sample(const RiemannSide& left, const RiemannSide& right,
                                 double gamma, double xi);

// Star-region pressure and velocity (exposed for direct checks).
void exact_riemann_star(const RiemannSide& left, const RiemannSide& right, double gamma,
                        double& p_star, double& u_star);

}  // namespace aderdg::testing

#endif  // ADERDG_TESTS_EXACT_RIEMANN_HPP_
