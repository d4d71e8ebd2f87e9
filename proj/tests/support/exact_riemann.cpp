#include "exact_riemann.hpp"

#include <cmath>
#include <stdexcept>

namespace aderdg::testing {

namespace {

// Pressure function f_K(p) and derivative for one side (Toro's notation).
void side_function(const RiemannSide& s, double gamma, double p, double& f, double& df) {
  const double A = 2.0 / ((gamma + 1.0) * s.rho);
  const double B = (gamma - 1.0) / (gamma + 1.0) * s.p;
  const double a = std::sqrt(gamma * s.p / s.rho);
  if (p > s.p) {  // shock
    const double q = std::sqrt(A / (p + B));
    f = (p - s.p) * q;
    df = q * (1.0 - 0.5 * (p - s.p) / (p + B));
  } else {  // rarefaction
    f = 2.0 * a / (gamma - 1.0) * (std::pow(p / s.p, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
    df = 1.0 / (s.rho * a) * std::pow(p / s.p, -(gamma + 1.0) / (2.0 * gamma));
  }
}

}  // namespace

void exact_riemann_star(const RiemannSide& L, const RiemannSide& R, double gamma,
                        double& p_star, double& u_star) {
  const double aL = std::sqrt(gamma * L.p / L.rho);
  const double aR = std::sqrt(gamma * R.p / R.rho);
  // two-rarefaction initial guess
  const double z = (gamma - 1.0) / (2.0 * gamma);
  double p = std::pow((aL + aR - 0.5 * (gamma - 1.0) * (R.u - L.u)) /
                          (aL / std::pow(L.p, z) + aR / std::pow(R.p, z)),
                      1.0 / z);
  p = std::max(p, 1e-12);
  for (int it = 0; it < 100; ++it) {
    double fL, dfL, fR, dfR;
    side_function(L, gamma, p, fL, dfL);
    side_function(R, gamma, p, fR, dfR);
    const double g = fL + fR + (R.u - L.u);
    const double dp = g / (dfL + dfR);
    p -= dp;
    if (p <= 0.0) p = 1e-12;
    if (std::abs(dp) < 1e-14 * (1.0 + p)) break;
  }
  double fL, dfL, fR, dfR;
  side_function(L, gamma, p, fL, dfL);
  side_function(R, gamma, p, fR, dfR);
  p_star = p;
  u_star = 0.5 * (L.u + R.u) + 0.5 * (fR - fL);
}

RiemannSide exact_riemann_sample(const RiemannSide& L, const RiemannSide& R, double gamma,
                                 double xi) {
  double ps, us;
  exact_riemann_star(L, R, gamma, ps, us);
  const double aL = std::sqrt(gamma * L.p / L.rho);
  const double aR = std::sqrt(gamma * R.p / R.rho);
  const double g1 = (gamma - 1.0) / (gamma + 1.0);

  if (xi < us) {  // left of contact
    if (ps > L.p) {  // left shock
      const double SL = L.u - aL * std::sqrt((gamma + 1.0) / (2.0 * gamma) * ps / L.p +
                                             (gamma - 1.0) / (2.0 * gamma));
      if (xi < SL) return L;
      const double rho = L.rho * ((ps / L.p + g1) / (g1 * ps / L.p + 1.0));
      return {rho, us, ps};
    }
    const double SHL = L.u - aL;
    if (xi < SHL) return L;
    const double a_star = aL * std::pow(ps / L.p, (gamma - 1.0) / (2.0 * gamma));
    const double STL = us - a_star;
    if (xi > STL) {
      const double rho = L.rho * std::pow(ps / L.p, 1.0 / gamma);
      return {rho, us, ps};
    }
    // inside the left fan
    const double u = 2.0 / (gamma + 1.0) * (aL + 0.5 * (gamma - 1.0) * L.u + xi);
    const double a = 2.0 / (gamma + 1.0) * (aL + 0.5 * (gamma - 1.0) * (L.u - xi));
    const double rho = L.rho * std::pow(a / aL, 2.0 / (gamma - 1.0));
    const double p = L.p * std::pow(a / aL, 2.0 * gamma / (gamma - 1.0));
    return {rho, u, p};
  }
  // right of contact
  if (ps > R.p) {  // right shock
    const double SR = R.u + aR * std::sqrt((gamma + 1.0) / (2.0 * gamma) * ps / R.p +
                                           (gamma - 1.0) / (2.0 * gamma));
    if (xi > SR) return R;
    const double rho = R.rho * ((ps / R.p + g1) / (g1 * ps / R.p + 1.0));
    return {rho, us, ps};
  }
  const double SHR = R.u + aR;
  if (xi > SHR) return R;
  const double a_star = aR * std::pow(ps / R.p, (gamma - 1.0) / (2.0 * gamma));
  const double STR = us + a_star;
  if (xi < STR) {
    const double rho = R.rho * std::pow(ps / R.p, 1.0 / gamma);
    return {rho, us, ps};
  }
  const double u = 2.0 / (gamma + 1.0) * (-aR + 0.5 * (gamma - 1.0) * R.u + xi);
  const double a = 2.0 / (gamma + 1.0) * (aR - 0.5 * (gamma - 1.0) * (R.u - xi));
  const double rho = R.rho * std::pow(a / aR, 2.0 / (gamma - 1.0));
  const double p = R.p * std::pow(a / aR, 2.0 * gamma / (gamma - 1.0));
  return {rho, u, p};
}

}  // namespace aderdg::testing
