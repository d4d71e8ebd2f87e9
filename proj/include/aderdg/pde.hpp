//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file pde.hpp
//  \brief Governing-equation plug-ins: compressible Navier-Stokes and viscous/resistive
//         MHD with GLM divergence cleaning.
//
//  Conserved layouts (momentum always carries three components, 2.5D in 2D runs):
//    cns:   (rho, mx, my, mz, E)                       5 vars
//    vrmhd: (rho, mx, my, mz, E, Bx, By, Bz, psi)      9 vars
//  Magnetic units keep the 4*pi factors of the Gaussian-like convention, so
//  E = p/(gamma-1) + rho v^2/2 + B^2/(8 pi).

#ifndef ADERDG_PDE_HPP_
#define ADERDG_PDE_HPP_

#include <memory>
#include <string>
#include <vector>

namespace aderdg {

struct PdeParams {
  double gamma = 1.4;  // ratio of specific heats, > 1
  double mu = 0.0;     // dynamic viscosity
  double Pr = 0.75;    // Prandtl number (sets kappa unless overridden)
  double eta = 0.0;    // electric resistivity
  double ch = 0.0;     // GLM cleaning speed
  double Rgas = 1.0;   // gas constant, only used by scenarios working with T
  double kappa = -1.0; // heat conduction coefficient; < 0 derives it from Pr

  // Effective conductivity multiplying grad(p/rho) in the energy flux.
  double kappa_eff() const { return kappa >= 0.0 ? kappa : gamma * mu / (Pr * (gamma - 1.0)); }
  void validate() const;
};

// Immutable descriptor of the governing system. All member functions are pure and
// callable concurrently. Array arguments use the conserved layout above; gradients and
// flux tensors are row-major [dim*nvars + v] over the first `dims` spatial directions.
class PdeModel {
 public:
  explicit PdeModel(const PdeParams& p) : prm_(p) { prm_.validate(); }
  virtual ~PdeModel() = default;

  virtual int nvars() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> var_names() const = 0;
  virtual bool is_mhd() const = 0;

  virtual void flux(const double* u, const double* g, int dims, double* F) const = 0;

  // Bound on |eigenvalues| of the convective part along the unit normal n[3].
  // Throws on an inadmissible state.
  virtual double max_convective_speed(const double* u, const double* n) const = 0;
  // Bound on the eigenvalues of the parabolic part. Throws on an inadmissible state.
  virtual double max_viscous_speed(const double* u) const = 0;

  // Primitive layout matches the conserved one with momentum -> velocity, E -> p.
  // cons_to_prim reports false (and leaves prim untouched) when rho <= 0 or p <= 0;
  // the limiter consumes that signal.
  virtual bool cons_to_prim(const double* u, double* prim) const = 0;
  virtual void prim_to_cons(const double* prim, double* u) const = 0;

  // True iff every entry is finite, rho > 0 and p > 0. Never throws: this is the
  // detector the limiter relies on, so it has to accept garbage.
  virtual bool admissible(const double* u) const = 0;

  // Gas pressure from the EOS; purely algebraic, accepts garbage.
  virtual double pressure(const double* u) const = 0;

  // Quantities monitored by the relaxed discrete maximum principle.
  virtual int dmp_count() const = 0;
  virtual double dmp_quantity(int m, const double* u) const = 0;

  const PdeParams& params() const { return prm_; }

 protected:
  PdeParams prm_;
};

std::unique_ptr<PdeModel> make_model(const std::string& kind, const PdeParams& p);

}  // namespace aderdg

#endif  // ADERDG_PDE_HPP_
