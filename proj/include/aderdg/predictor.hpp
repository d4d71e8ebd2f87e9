//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file predictor.hpp
//  \brief Element-local space-time DG predictor solved by Picard iteration.
//
//  The predictor owns no neighbor data: it is a pure function of one element's nodal
//  coefficients, the cell geometry and the time step. Spatial nodes are indexed
//  s = ix + np*(iy + np*iz) with unused directions collapsed; space-time nodes pair a
//  spatial node with a temporal Gauss-Legendre node of the same degree.

#ifndef ADERDG_PREDICTOR_HPP_
#define ADERDG_PREDICTOR_HPP_

#include <vector>

#include "aderdg/operators.hpp"
#include "aderdg/pde.hpp"

namespace aderdg {

struct Predictor {
  int nv = 0, d = 1, np = 1, nsp = 1;
  double t0 = 0.0;   // physical start of the covered interval
  double dt = 0.0;   // interval length
  double h[3] = {1.0, 1.0, 1.0};
  bool ok = true;         // false once a non-finite iterate or flux appeared
  bool converged = true;  // false when the Picard loop hit the iteration cap
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm update per iteration

  std::vector<double> q;     // [(a*nsp + s)*nv + v]
  std::vector<double> grad;  // [((a*nsp + s)*d + j)*nv + v], physical gradients
  std::vector<double> favg;  // time-averaged nodal fluxes [(j*nsp + s)*nv + v]

  int spatial_size(int dim) const { return dim < d ? np : 1; }
};

struct PredictorOptions {
  int maxiter = 0;      // <= 0 selects the default 2(N+1)
  double tol = 1e-10;   // relative, per variable
};

// Solve the element-local space-time problem for one cell. `u` holds the nodal DG
// coefficients at t0, `h` the physical cell extents. Never throws on bad states: a
// non-finite iterate only clears `ok` (the a-posteriori limiter is the safety net).
Predictor solve_predictor(const OperatorSet& ops, const PdeModel& model, const double* u,
                          const double h[3], double dt, double t0,
                          const PredictorOptions& opt = {});

// State and physical gradient of q_h at reference position xi[3], tau in [0,1].
// grad may be null. Layout: grad[j*nv + v].
void predictor_eval(const OperatorSet& ops, const Predictor& pred, const double xi[3],
                    double tau, double* state, double* grad);

// Spatial nodal coefficients of q_h at fixed tau (a StatePoly-shaped slice).
void predictor_time_slice(const OperatorSet& ops, const Predictor& pred, double tau,
                          double* out);

// Traces at the native space-time quadrature nodes of one face (face = 2*dim + side,
// side 1 is the high end). state: [(a*ntan + t)*nv + v]; grad: [((a*ntan+t)*d + j)*nv + v].
struct FaceTraces {
  int ntan = 1;  // tangential nodes per time level
  std::vector<double> state, grad;
};
FaceTraces face_traces(const OperatorSet& ops, const Predictor& pred, int face);

}  // namespace aderdg

#endif  // ADERDG_PREDICTOR_HPP_
