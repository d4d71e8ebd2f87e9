//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file limiter.hpp
//  \brief A-posteriori MOOD machinery: troubled-cell detection, subcell projection and
//         reconstruction, and the robust subgrid finite-volume schemes the limiter
//         falls back to.

#ifndef ADERDG_LIMITER_HPP_
#define ADERDG_LIMITER_HPP_

#include <array>
#include <string>
#include <vector>

#include "aderdg/operators.hpp"
#include "aderdg/pde.hpp"

namespace aderdg {

struct LimiterOptions {
  std::string scheme = "weno3";  // weno3 | tvd_prim
  double delta0 = 1e-4;
  double eps = 1e-3;
  bool dmp_all_vars = false;  // componentwise DMP on every conserved variable
};

struct DetectionReport {
  bool dmp_violation = false;
  bool negative_density = false;
  bool negative_pressure = false;
  bool nan_detected = false;
  bool troubled() const {
    return dmp_violation || negative_density || negative_pressure || nan_detected;
  }
};

// Exact L2 averages of the DG polynomial over the uniform Ns^d subgrid (w layout
// [sub*nv+v], first direction fastest), and the conservative reconstruction back.
// reconstruct enforces the element mean exactly.
void project_to_subcells(const OperatorSet& ops, int nv, const double* u, double* w);
void reconstruct_from_subcells(const OperatorSet& ops, int nv, const double* w, double* u);

// Element mean of nodal DG data by Gauss-Legendre quadrature.
void element_mean(const OperatorSet& ops, int nv, const double* u, double* mean);

int dmp_quantity_count(const PdeModel& model, const LimiterOptions& opt);
double dmp_quantity(const PdeModel& model, const LimiterOptions& opt, int m,
                    const double* state);

// Relaxed-DMP and physical admissibility checks of one candidate. `bounds_min/max`
// hold the neighborhood extrema of the DMP quantities at the previous time level;
// candidate data is checked at all nodal values and all subcell averages.
DetectionReport detect_candidate(const OperatorSet& ops, const PdeModel& model,
                                 const LimiterOptions& opt, const double* cand_nodal,
                                 const double* cand_subcell, const double* bounds_min,
                                 const double* bounds_max);

// Updates running min/max of the DMP quantities over one subcell representation.
void accumulate_dmp_bounds(const PdeModel& model, const LimiterOptions& opt, int nsub,
                           const double* w, double* qmin, double* qmax);

enum class FvScheme { Weno3, TvdPrim, FirstOrder };
FvScheme parse_scheme(const std::string& s);

// One conservative finite-volume step on a ghosted subcell patch. `ext` holds
// (Ns+4)^d cell averages (two ghost layers per side, first direction fastest); the
// interior block is advanced in place, ghosts are left untouched. Boundary fluxes of
// the interior block (oriented along +axis, per patch face, [subface*nv+v]) are
// returned for conservative coupling. Reconstruction falls back to piecewise-constant
// values at any face with an inadmissible candidate state; the step itself never
// throws and never aborts.
struct SubgridStep {
  bool finite = true;  // all interior outputs finite
  std::array<std::vector<double>, 6> bflux;
};
SubgridStep fv_subcell_step(const PdeModel& model, int d, int Ns, const double hs[3],
                            double dt, FvScheme scheme, double* ext);

// Helpers shared with the stepper/tests.
int ext_size(int d, int Ns);
int ext_index(int d, int Ns, int i, int j, int k);  // interior (0,0,0) maps to ghosts+2

}  // namespace aderdg

#endif  // ADERDG_LIMITER_HPP_
