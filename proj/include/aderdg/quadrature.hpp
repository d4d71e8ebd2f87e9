//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file quadrature.hpp
//  \brief Gauss-Legendre quadrature on the unit interval and the nodal Lagrange basis.

#ifndef ADERDG_QUADRATURE_HPP_
#define ADERDG_QUADRATURE_HPP_

#include <vector>

namespace aderdg {

// Gauss-Legendre rule on [0,1]. Nodes are strictly increasing, weights sum to one,
// and the rule integrates polynomials of degree <= 2n-1 exactly.
struct Quadrature1D {
  int n = 0;
  std::vector<double> nodes;    // in (0,1)
  std::vector<double> weights;  // positive
  std::vector<double> bary;     // barycentric weights of the node set
};

// Tabulated rules stop at n=16; larger requests are rejected.
Quadrature1D gauss_legendre(int n);

// Value of the k-th Lagrange cardinal polynomial of the node set at x in [0,1].
double lagrange_eval(const Quadrature1D& q, int k, double x);

// All n cardinal values at x, written to out[0..n-1].
void lagrange_eval_all(const Quadrature1D& q, double x, double* out);

}  // namespace aderdg

#endif  // ADERDG_QUADRATURE_HPP_
