#include "advection_model.hpp"

#include <cmath>

namespace aderdg::testing {

namespace {
PdeParams advection_params() {
  PdeParams p;
  p.gamma = 1.4;  // unused, satisfies validation
  return p;
}
}  // namespace

AdvectionModel::AdvectionModel(double ax, double ay, double az)
    : PdeModel(advection_params()) {
  a[0] = ax;
  a[1] = ay;
  a[2] = az;
}

void AdvectionModel::flux(const double* u, const double* g, int dims, double* F) const {
  (void)g;
  for (int k = 0; k < dims; ++k) F[k] = a[k] * u[0];
}

double AdvectionModel::max_convective_speed(const double* u, const double* n) const {
  (void)u;
  return std::abs(a[0] * n[0] + a[1] * n[1] + a[2] * n[2]);
}

double AdvectionModel::max_viscous_speed(const double*) const { return 0.0; }

bool AdvectionModel::cons_to_prim(const double* u, double* prim) const {
  prim[0] = u[0];
  return true;
}

void AdvectionModel::prim_to_cons(const double* prim, double* u) const { u[0] = prim[0]; }

bool AdvectionModel::admissible(const double* u) const { return std::isfinite(u[0]); }

double AdvectionModel::pressure(const double* u) const {
  (void)u;
  return 1.0;
}

}  // namespace aderdg::testing
