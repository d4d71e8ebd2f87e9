//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file corrector.hpp
//  \brief Pieces of the fully discrete one-step DG update: the gradient-aware Rusanov
//         flux, volume/surface term assembly into nodal increment buffers, and the
//         global time-step bound.

#ifndef ADERDG_CORRECTOR_HPP_
#define ADERDG_CORRECTOR_HPP_

#include "aderdg/operators.hpp"
#include "aderdg/pde.hpp"
#include "aderdg/predictor.hpp"

namespace aderdg {

// G.n for an axis-aligned face: 0.5 (F(qR,gR) + F(qL,gL)).n - 0.5 smax (qR - qL) with
// smax = max|lambda_c| + 2 (N+1)/h_pen max|lambda_v|. A non-admissible input fills the
// output with NaN so the trouble propagates into the candidate instead of aborting.
void rusanov_flux(const PdeModel& model, const double* qL, const double* gL,
                  const double* qR, const double* gR, int dim, int dims, double h_pen,
                  int degree, double* out);

// Penalized signal speed used by the flux above; throws on inadmissible states.
double rusanov_smax(const PdeModel& model, const double* qL, const double* qR, int dim,
                    double h_pen, int degree);

// Adds the time-integrated volume term of the predictor to a nodal increment buffer
// (layout [s*nv + v]).
void add_volume_term(const OperatorSet& ops, const Predictor& pred, double* buf);

// Sub-rectangle of a cell face in the cell's reference coordinates: tangential
// directions are listed in ascending axis order.
struct FaceMap {
  double offset[2] = {0.0, 0.0};
  double scale = 1.0;  // 1 for a full face, 1/r for a mortar subface
};

// Accumulates  -sign * (dtf * area_frac / (h_dim V w_K)) * Int phi_K G dS  into buf,
// with G given as nodal data Gbar[t*nv+v] at the ntan tangential Gauss-Legendre nodes
// of the (sub)face and area_frac = scale^(d-1). `side` is the cell side carrying the
// face, sign = +1 on the high side, -1 on the low side.
void add_face_term_nodal(const OperatorSet& ops, int nv, const double h[3], int dim,
                         int side, const FaceMap& map, const double* Gbar, int ntan,
                         double dtf, double* buf);

// Same contribution with G piecewise constant on the Ns^(d-1) subfaces of the sub-cell
// grid (layout Gsub[sub*nv+v], tangential dims ascending). Used when a limited cell
// replaces the DG flux of a face by its subgrid finite-volume fluxes.
void add_face_term_subcell(const OperatorSet& ops, int nv, const double h[3], int dim,
                           int side, const FaceMap& map, const double* Gsub, double dtf,
                           double* buf);

// Maximum stable time step of one element (Eq.-9-type bound without the CFL factor):
//   h_min / (d S) / (lambda_c + lambda_v 2 S / h_min),  S = max(2N+1, Ns).
// Speeds are sampled at the admissible nodal states; the cell mean is the fallback.
// Returns a negative value when no admissible sample exists.
double cell_dt_bound(const OperatorSet& ops, const PdeModel& model, const double* u,
                     const double h[3]);

// Same bound sampled at a single state (used for cheap mid-step rechecks).
double single_state_dt_bound(const OperatorSet& ops, const PdeModel& model,
                             const double* state, const double h[3]);

}  // namespace aderdg

#endif  // ADERDG_CORRECTOR_HPP_
