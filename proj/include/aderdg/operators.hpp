//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file operators.hpp
//  \brief Precomputed discrete operators for the nodal DG scheme on [0,1]^d.
//
//  Everything is stored as per-direction 1D matrices; multi-dimensional action is by
//  tensor product. Matrices are row-major. The set is immutable after construction and
//  safe for concurrent reads.

#ifndef ADERDG_OPERATORS_HPP_
#define ADERDG_OPERATORS_HPP_

#include <vector>

#include "aderdg/quadrature.hpp"

namespace aderdg {

struct OperatorSet {
  int N = 0;   // polynomial degree
  int d = 1;   // space dimension
  int Ns = 1;  // subcells per direction
  int r = 2;   // refinement factor (children per direction)
  int np = 1;  // N+1, nodes per direction

  Quadrature1D quad;  // the N+1 Gauss-Legendre nodes defining the basis

  // Nodal differentiation: diff[i*np+j] = dphi_j/dxi at node i.
  std::vector<double> diff;
  // Basis traces at the interval ends: bleft[k] = phi_k(0), bright[k] = phi_k(1).
  std::vector<double> bleft, bright;
  // Inverse of the space-time predictor matrix
  //   T[a*np+b] = phi_a(1) phi_b(1) - w_b diff[b*np+a].
  std::vector<double> tinv;
  // Subcell projection, psub[s*np+k]: average of phi_k over the s-th of Ns uniform
  // subintervals. rsub[k*Ns+s] is the conservative least-squares left inverse.
  std::vector<double> psub;
  std::vector<double> rsub;
  // Level transfers, one matrix per child index c in [0,r).
  //   child_proj[c][k*np+j]: nodal values of the parent polynomial on child c.
  //   parent_avg[c][k*np+j]: contribution of child-c coefficients to the parent L2
  //   projection; summing over children reproduces parent polynomials exactly.
  std::vector<std::vector<double>> child_proj;
  std::vector<std::vector<double>> parent_avg;

  int nodes_nd() const;  // (N+1)^d
  int subcells_nd() const;
};

// Build (or reject) an operator set. Preconditions: N in [0,5], d in {1,2,3},
// Ns >= N+1, r >= 2.
OperatorSet build_operators(int N, int d, int Ns, int r);

// Process-wide cache; construction happens once per key.
const OperatorSet& operators(int N, int d, int Ns, int r);

namespace linalg {
// Dense row-major helpers for the small startup solves.
void lu_solve(std::vector<double> a, int n, std::vector<double>& rhs, int nrhs);
std::vector<double> invert(const std::vector<double>& a, int n);
}  // namespace linalg

// Applies a matrix (nrow x ncol, row-major) along one axis of a rank-3 tensor of
// nv-vectors stored first-axis-fastest. sz[axis] must equal ncol; it becomes nrow.
void tensor_apply_axis(const double* M, int nrow, int ncol, int axis, int sz[3], int nv,
                       std::vector<double>& data);

}  // namespace aderdg

#endif  // ADERDG_OPERATORS_HPP_
