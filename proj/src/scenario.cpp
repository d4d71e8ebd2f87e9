//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/scenario.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace aderdg {

namespace {

constexpr double kPi = M_PI;

double sech(double x) { return 1.0 / std::cosh(x); }

// Adaptive Simpson quadrature (used for the shock-vortex temperature integral).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

void set_prim(double* prim, int nv, double rho, double vx, double vy, double vz, double p,
              double Bx = 0, double By = 0, double Bz = 0, double psi = 0) {
  prim[0] = rho;
  prim[1] = vx;
  prim[2] = vy;
  prim[3] = vz;
  prim[4] = p;
  if (nv > 5) {
    prim[5] = Bx;
    prim[6] = By;
    prim[7] = Bz;
    prim[8] = psi;
  }
}

}  // namespace

void ScenarioBoundary::ghost_state(int side, const double* x, double t, const double* u_in,
                                   double* u_out) const {
  const int nv = model_.nvars();
  const int axis = side / 2;
  switch (scn_.bc[side].kind) {
    case BcKind::Periodic:
    case BcKind::Outflow:
      std::memcpy(u_out, u_in, static_cast<size_t>(nv) * sizeof(double));
      return;
    case BcKind::SlipWall:
      std::memcpy(u_out, u_in, static_cast<size_t>(nv) * sizeof(double));
      u_out[1 + axis] = -u_in[1 + axis];
      return;
    case BcKind::NoslipWall: {
      std::memcpy(u_out, u_in, static_cast<size_t>(nv) * sizeof(double));
      const double* vw = scn_.bc[side].wall_v;
      double ke_in = 0.0, ke_out = 0.0;
      for (int i = 0; i < 3; ++i) {
        u_out[1 + i] = 2.0 * u_in[0] * vw[i] - u_in[1 + i];
        ke_in += u_in[1 + i] * u_in[1 + i];
        ke_out += u_out[1 + i] * u_out[1 + i];
      }
      // keep the gas pressure of the mirrored state
      u_out[4] = u_in[4] + 0.5 * (ke_out - ke_in) / u_in[0];
      return;
    }
    case BcKind::AnalyticInflow: {
      double prim[16];
      scn_.inflow(side, x, t, prim);
      model_.prim_to_cons(prim, u_out);
      return;
    }
  }
}

namespace {

Scenario sod() {
  Scenario s;
  s.name = "sod";
  s.pde = "cns";
  s.dim = 1;
  s.params.gamma = 1.4;
  s.params.mu = 0.0;
  s.lo[0] = 0.0;
  s.hi[0] = 1.0;
  s.base[0] = 100;
  s.t_end = 0.2;
  s.bc[0].kind = BcKind::Outflow;
  s.bc[1].kind = BcKind::Outflow;
  s.initial = [](const double* x, double* prim) {
    if (x[0] < 0.5) {
      set_prim(prim, 5, 1.0, 0, 0, 0, 1.0);
    } else {
      set_prim(prim, 5, 0.125, 0, 0, 0, 0.1);
    }
  };
  return s;
}

Scenario smooth_vortex() {
  Scenario s;
  s.name = "smooth_vortex";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 0.0;
  s.lo[0] = s.lo[1] = 0.0;
  s.hi[0] = s.hi[1] = 10.0;
  s.base[0] = s.base[1] = 16;
  s.t_end = 1.0;
  const double gamma = 1.4, beta = 5.0;
  s.initial = [gamma, beta](const double* x, double* prim) {
    const double dx = x[0] - 5.0, dy = x[1] - 5.0;
    const double r2 = dx * dx + dy * dy;
    const double e1 = std::exp(0.5 * (1.0 - r2));
    const double T = 1.0 - (gamma - 1.0) * beta * beta / (8.0 * gamma * kPi * kPi) *
                               std::exp(1.0 - r2);
    const double rho = std::pow(T, 1.0 / (gamma - 1.0));
    set_prim(prim, 5, rho, 1.0 - beta / (2.0 * kPi) * e1 * dy,
             1.0 + beta / (2.0 * kPi) * e1 * dx, 0.0, std::pow(T, gamma / (gamma - 1.0)));
  };
  return s;
}

Scenario b_diffusion() {
  Scenario s;
  s.name = "b_diffusion";
  s.pde = "vrmhd";
  s.dim = 1;
  s.params.gamma = 5.0 / 3.0;
  s.params.mu = 0.0;
  s.params.eta = 1e-2;
  s.params.ch = 0.0;
  s.lo[0] = -1.0;
  s.hi[0] = 1.0;
  s.base[0] = 128;
  s.t_end = 1.0;
  s.bc[0].kind = BcKind::Periodic;
  s.bc[1].kind = BcKind::Periodic;
  s.initial = [](const double* x, double* prim) {
    const double sigma0 = 0.1;
    const double By = std::exp(-x[0] * x[0] / (2.0 * sigma0 * sigma0));
    set_prim(prim, 9, 1.0, 0, 0, 0, 1.0, 0.0, By, 0.0, 0.0);
  };
  return s;
}

Scenario taylor_green_2d() {
  Scenario s;
  s.name = "taylor_green_2d";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 1e-2;  // Re = 100 at unit density/velocity/length
  s.params.Pr = 0.75;
  s.lo[0] = s.lo[1] = 0.0;
  s.hi[0] = s.hi[1] = 2.0 * kPi;
  s.base[0] = s.base[1] = 16;
  s.t_end = 2.0;
  const double gamma = s.params.gamma;
  s.initial = [gamma](const double* x, double* prim) {
    const double c0 = 10.0;  // Mach 0.1
    const double p = 1.0 * c0 * c0 / gamma + 0.25 * (std::cos(2 * x[0]) + std::cos(2 * x[1]));
    set_prim(prim, 5, 1.0, std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1]),
             0.0, p);
  };
  return s;
}

Scenario taylor_green_3d() {
  Scenario s;
  s.name = "taylor_green_3d";
  s.pde = "cns";
  s.dim = 3;
  s.params.gamma = 1.4;
  s.params.mu = 1e-2;
  s.params.Pr = 0.75;
  for (int a = 0; a < 3; ++a) {
    s.lo[a] = 0.0;
    s.hi[a] = 2.0 * kPi;
    s.base[a] = 8;
  }
  s.t_end = 10.0;
  const double gamma = s.params.gamma;
  s.initial = [gamma](const double* x, double* prim) {
    const double c0 = 10.0;
    const double p = 1.0 * c0 * c0 / gamma +
                     (std::cos(2 * x[0]) + std::cos(2 * x[1])) * (std::cos(2 * x[2]) + 2.0) / 16.0;
    set_prim(prim, 5, 1.0, std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]),
             -std::cos(x[0]) * std::sin(x[1]) * std::cos(x[2]), 0.0, p);
  };
  return s;
}

Scenario lid_cavity() {
  Scenario s;
  s.name = "lid_cavity";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 0.02;  // Re = rho U L / mu = 100 with L = 2
  s.params.Pr = 0.75;
  s.lo[0] = s.lo[1] = -1.0;
  s.hi[0] = s.hi[1] = 1.0;
  s.base[0] = s.base[1] = 10;
  s.t_end = 10.0;
  s.indicator = "velocity";
  for (int side = 0; side < 4; ++side) s.bc[side].kind = BcKind::NoslipWall;
  s.bc[3].wall_v[0] = 1.0;  // moving upper lid
  const double gamma = s.params.gamma;
  s.initial = [gamma](const double*, double* prim) {
    const double c0 = 10.0;
    set_prim(prim, 5, 1.0, 0, 0, 0, 1.0 * c0 * c0 / gamma);
  };
  return s;
}

Scenario mixing_layer() {
  Scenario s;
  s.name = "mixing_layer";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 1e-3;  // Re = 500 in units of the inflow vorticity thickness
  s.params.Pr = 0.75;
  s.lo[0] = 0.0;
  s.hi[0] = 400.0;
  s.lo[1] = -50.0;
  s.hi[1] = 50.0;
  s.base[0] = 40;
  s.base[1] = 20;
  s.t_end = 100.0;
  s.indicator = "vorticity";
  s.bc[0].kind = BcKind::AnalyticInflow;
  s.bc[1].kind = BcKind::Outflow;
  s.bc[2].kind = BcKind::Outflow;
  s.bc[3].kind = BcKind::Outflow;
  const double gamma = s.params.gamma;
  auto base_u = [](double y) { return (std::tanh(2.0 * y) + 3.0) / 8.0; };
  s.initial = [gamma, base_u](const double* x, double* prim) {
    set_prim(prim, 5, 1.0, base_u(x[1]), 0.0, 0.0, 1.0 / gamma);
  };
  s.inflow = [gamma, base_u](int, const double* x, double t, double* prim) {
    // fundamental frequency and the first three subharmonics, phase-shifted to
    // shorten the vortex-pairing distance
    const double w0 = -0.3147876;
    const double ph1 = -0.028, ph2 = 0.141, ph3 = 0.391;
    const double A = -1e-3 * std::exp(-x[1] * x[1] / 4.0);
    const double dv = A * (std::cos(w0 * t) + std::cos(0.5 * w0 * t + ph1) +
                           std::cos(0.25 * w0 * t + ph2) + std::cos(0.125 * w0 * t + ph3));
    set_prim(prim, 5, 1.0, base_u(x[1]), dv, 0.0, 1.0 / gamma);
  };
  return s;
}

Scenario shock_vortex() {
  Scenario s;
  s.name = "shock_vortex";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 1e-3;
  s.params.Pr = 0.7;
  s.params.Rgas = 1.0;
  s.lo[0] = 0.0;
  s.hi[0] = 2.0;
  s.lo[1] = 0.0;
  s.hi[1] = 1.0;
  s.base[0] = 40;
  s.base[1] = 20;
  s.t_end = 0.7;
  s.bc[0].kind = BcKind::AnalyticInflow;
  s.bc[1].kind = BcKind::Outflow;
  s.bc[2].kind = BcKind::Periodic;
  s.bc[3].kind = BcKind::Periodic;

  const double gamma = s.params.gamma;
  const double R = s.params.Rgas;
  const double rho0 = 1.0, p0 = 1.0, T0 = p0 / (R * rho0);
  const double c0 = std::sqrt(gamma * p0 / rho0);
  const double Ms = 1.5;
  const double u0 = Ms * c0;
  // stationary normal shock at x = 0.5 (Rankine-Hugoniot)
  const double rho1 = rho0 * (gamma + 1.0) * Ms * Ms / ((gamma - 1.0) * Ms * Ms + 2.0);
  const double p1 = p0 * (2.0 * gamma * Ms * Ms - (gamma - 1.0)) / (gamma + 1.0);
  const double u1 = u0 * rho0 / rho1;
  const double Mv = 0.7, vm = Mv * c0;
  const double a = 0.0075, b = 0.175;
  const double xv = 0.25, yv = 0.5;

  auto vtheta = [=](double r) {
    if (r <= a) return vm * r / a;
    if (r <= b) return vm * a / (a * a - b * b) * (r - b * b / r);
    return 0.0;
  };
  auto temperature = [=](double r) {
    if (r >= b) return T0;
    auto f = [&](double rr) {
      const double vt = vtheta(rr);
      return (gamma - 1.0) / (R * gamma) * vt * vt / rr;
    };
    return T0 - integrate(f, std::max(r, 1e-12), b, 1e-10);
  };

  s.initial = [=](const double* x, double* prim) {
    if (x[0] >= 0.5) {
      set_prim(prim, 5, rho1, u1, 0.0, 0.0, p1);
      return;
    }
    const double dx = x[0] - xv, dy = x[1] - yv;
    const double r = std::sqrt(dx * dx + dy * dy);
    const double T = temperature(r);
    const double rho = rho0 * std::pow(T / T0, 1.0 / (gamma - 1.0));
    const double p = p0 * std::pow(T / T0, gamma / (gamma - 1.0));
    double vx = u0, vy = 0.0;
    if (r > 1e-12) {
      const double vt = vtheta(r);
      vx += -vt * dy / r;
      vy += vt * dx / r;
    }
    set_prim(prim, 5, rho, vx, vy, 0.0, p);
  };
  s.inflow = [=](int, const double*, double, double* prim) {
    set_prim(prim, 5, rho0, u0, 0.0, 0.0, p0);
  };
  return s;
}

void kelvin_helmholtz_fields(const double* x, double& rho, double& u, double& v) {
  const double vs = 1.0, aa = 0.01, eta0 = 0.1, sigma = 0.1;
  const double rho0 = 1.005, rho1 = 0.995;
  const double y = x[1];
  if (y > 0.0) {
    u = vs * std::tanh((y - 0.5) / aa);
    v = eta0 * vs * std::sin(2.0 * kPi * x[0]) * std::exp(-(y - 0.5) * (y - 0.5) / sigma);
    rho = rho0 + rho1 * std::tanh((y - 0.5) / aa);
  } else {
    u = -vs * std::tanh((y + 0.5) / aa);
    v = -eta0 * vs * std::sin(2.0 * kPi * x[0]) * std::exp(-(y + 0.5) * (y + 0.5) / sigma);
    rho = rho0 - rho1 * std::tanh((y + 0.5) / aa);
  }
}

Scenario kelvin_helmholtz() {
  Scenario s;
  s.name = "kelvin_helmholtz";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 1e-3;
  s.params.Pr = 0.75;
  s.lo[0] = -0.5;
  s.hi[0] = 0.5;
  s.lo[1] = -1.0;
  s.hi[1] = 1.0;
  s.base[0] = 20;
  s.base[1] = 40;
  s.t_end = 7.0;
  s.initial = [](const double* x, double* prim) {
    double rho, u, v;
    kelvin_helmholtz_fields(x, rho, u, v);
    set_prim(prim, 5, rho, u, v, 0.0, 1.0);
  };
  return s;
}

Scenario kelvin_helmholtz_mhd() {
  Scenario s = kelvin_helmholtz();
  s.name = "kelvin_helmholtz_mhd";
  s.pde = "vrmhd";
  s.params.eta = 1e-2;
  s.auto_ch = true;
  s.initial = [](const double* x, double* prim) {
    double rho, u, v;
    kelvin_helmholtz_fields(x, rho, u, v);
    set_prim(prim, 9, rho, u, v, 0.0, 1.0, 0.1, 0.0, 0.0, 0.0);
  };
  return s;
}

Scenario double_mach(bool slip) {
  Scenario s;
  s.name = slip ? "double_mach_slip" : "double_mach";
  s.pde = "cns";
  s.dim = 2;
  s.params.gamma = 1.4;
  s.params.mu = 1e-4;
  s.params.Pr = 0.75;
  s.lo[0] = 0.0;
  s.hi[0] = 4.0;
  s.lo[1] = 0.0;
  s.hi[1] = 1.0;
  s.base[0] = 80;
  s.base[1] = 20;
  s.t_end = 0.2;

  const double gamma = s.params.gamma;
  // Mach-10 shock, 60 degrees of incidence, impact point x=0 at t=0. Pre-shock
  // state (gamma,0,0,1)/gamma has unit sound speed, so the front advances at
  // speed 10 along its normal.
  const double sin60 = std::sqrt(3.0) / 2.0, cos60 = 0.5;
  const double shock_speed = 10.0;
  auto state = [=](const double* x, double t, double* prim) {
    const double xi = (x[0] - 0.0) * sin60 - x[1] * cos60 - shock_speed * t;
    if (xi < 0.0) {
      set_prim(prim, 5, 8.0 / gamma, 8.25 * sin60, -8.25 * cos60, 0.0, 116.5 / gamma);
    } else {
      set_prim(prim, 5, 1.0, 0.0, 0.0, 0.0, 1.0 / gamma);
    }
  };
  s.initial = [state](const double* x, double* prim) { state(x, 0.0, prim); };
  s.inflow = [state](int, const double* x, double t, double* prim) { state(x, t, prim); };
  s.bc[0].kind = BcKind::AnalyticInflow;
  s.bc[1].kind = BcKind::Outflow;
  s.bc[2].kind = slip ? BcKind::SlipWall : BcKind::NoslipWall;
  s.bc[3].kind = BcKind::AnalyticInflow;
  return s;
}

Scenario reconnection() {
  Scenario s;
  s.name = "reconnection";
  s.pde = "vrmhd";
  s.dim = 2;
  s.params.gamma = 5.0 / 3.0;
  s.params.mu = 0.0;
  s.params.eta = 1e-6;  // Lundquist number S = L v_a / eta = 1e6
  s.auto_ch = true;
  s.lo[0] = -0.2;
  s.hi[0] = 0.2;
  s.lo[1] = -0.5;
  s.hi[1] = 0.5;
  s.base[0] = 20;
  s.base[1] = 50;
  s.t_end = 1.0;
  s.indicator = "pressure";
  s.bc[0].kind = BcKind::Outflow;
  s.bc[1].kind = BcKind::Outflow;
  s.bc[2].kind = BcKind::Periodic;
  s.bc[3].kind = BcKind::Periodic;

  const double gamma = s.params.gamma;
  const double L = 1.0, va = 1.0, M = 0.7, S = 1e6;
  const double rho = 1.0;
  const double a = L / std::cbrt(S);  // current sheet width
  const double B0 = std::sqrt(4.0 * kPi * rho) * va;
  const double p = rho / (gamma * M * M);
  const double eps = 1e-3;
  const double k = 2.0 * kPi * 10.0 / L;
  const double sqS = std::sqrt(S);
  s.initial = [=](const double* x, double* prim) {
    const double xi = x[0] * sqS;
    const double damp = std::exp(-xi * xi);
    const double vx = eps * std::tanh(xi) * damp * std::cos(k * x[1]);
    const double vy =
        eps * (2.0 * xi * std::tanh(xi) - sech(xi) * sech(xi)) * damp * sqS * std::sin(k * x[1]) / k;
    set_prim(prim, 9, rho, vx, vy, 0.0, p, 0.0, B0 * std::tanh(x[0] / a), B0 * sech(x[0] / a),
             0.0);
  };
  return s;
}

void apply_overrides(Scenario& s, const ScenarioOverrides& ov) {
  if (ov.gamma) s.params.gamma = *ov.gamma;
  if (ov.mu) s.params.mu = *ov.mu;
  if (ov.Pr) s.params.Pr = *ov.Pr;
  if (ov.eta) s.params.eta = *ov.eta;
  if (ov.ch) {
    s.params.ch = *ov.ch;
    s.auto_ch = false;
  }
  if (ov.Rgas) s.params.Rgas = *ov.Rgas;
  if (ov.kappa) s.params.kappa = *ov.kappa;
  if (ov.t_end) s.t_end = *ov.t_end;
  if (ov.nx) s.base[0] = *ov.nx;
  if (ov.ny) s.base[1] = *ov.ny;
  if (ov.nz) s.base[2] = *ov.nz;
  if (ov.xlo) s.lo[0] = *ov.xlo;
  if (ov.xhi) s.hi[0] = *ov.xhi;
  if (ov.ylo) s.lo[1] = *ov.ylo;
  if (ov.yhi) s.hi[1] = *ov.yhi;
  if (ov.zlo) s.lo[2] = *ov.zlo;
  if (ov.zhi) s.hi[2] = *ov.zhi;

  s.params.validate();
  if (s.t_end < 0.0) throw std::invalid_argument("scenario: t_end must be >= 0");
  for (int a = 0; a < s.dim; ++a) {
    if (s.base[a] < 1) throw std::invalid_argument("scenario: base resolution must be >= 1");
    if (!(s.hi[a] > s.lo[a])) throw std::invalid_argument("scenario: empty domain");
  }
}

}  // namespace

Scenario build_scenario(const std::string& name, const ScenarioOverrides& ov) {
  Scenario s;
  if (name == "sod") {
    s = sod();
  } else if (name == "smooth_vortex") {
    s = smooth_vortex();
  } else if (name == "b_diffusion") {
    s = b_diffusion();
  } else if (name == "taylor_green_2d") {
    s = taylor_green_2d();
  } else if (name == "taylor_green_3d") {
    s = taylor_green_3d();
  } else if (name == "lid_cavity") {
    s = lid_cavity();
  } else if (name == "mixing_layer") {
    s = mixing_layer();
  } else if (name == "shock_vortex") {
    s = shock_vortex();
  } else if (name == "kelvin_helmholtz") {
    s = kelvin_helmholtz();
  } else if (name == "kelvin_helmholtz_mhd") {
    s = kelvin_helmholtz_mhd();
  } else if (name == "double_mach") {
    s = double_mach(false);
  } else if (name == "double_mach_slip") {
    s = double_mach(true);
  } else if (name == "reconnection") {
    s = reconnection();
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  apply_overrides(s, ov);
  return s;
}

std::vector<std::pair<std::string, std::string>> scenario_list() {
  return {
      {"sod", "1D Sod shock tube (calibration, exact Riemann reference)"},
      {"smooth_vortex", "2D isentropic vortex advection (calibration, smooth)"},
      {"b_diffusion", "1D resistive decay of a Gaussian magnetic field (calibration)"},
      {"taylor_green_2d", "2D viscous Taylor-Green vortex at Mach 0.1"},
      {"taylor_green_3d", "3D Taylor-Green vortex at Mach 0.1"},
      {"lid_cavity", "lid-driven cavity flow at Mach 0.1, Re 100"},
      {"mixing_layer", "compressible 2D mixing layer with harmonic inflow forcing"},
      {"shock_vortex", "shock-vortex interaction, stationary Mach-1.5 shock"},
      {"kelvin_helmholtz", "2D Kelvin-Helmholtz instability (Navier-Stokes)"},
      {"kelvin_helmholtz_mhd", "2D Kelvin-Helmholtz instability (viscous-resistive MHD)"},
      {"double_mach", "viscous double Mach reflection, Mach 10, no-slip wall"},
      {"double_mach_slip", "double Mach reflection with reflective slip wall"},
      {"reconnection", "Harris-sheet magnetic reconnection (ideal tearing setup)"},
  };
}

}  // namespace aderdg
