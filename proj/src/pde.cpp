//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/pde.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace aderdg {

void PdeParams::validate() const {
  if (!(gamma > 1.0)) throw std::invalid_argument("pde: gamma must be > 1");
  if (!(mu >= 0.0)) throw std::invalid_argument("pde: mu must be >= 0");
  if (!(Pr > 0.0)) throw std::invalid_argument("pde: Pr must be > 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("pde: eta must be >= 0");
  if (!(ch >= 0.0)) throw std::invalid_argument("pde: ch must be >= 0");
}

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Shared 9-variable kernel. The Navier-Stokes model runs the same arithmetic with
// B = psi = 0 so that the stated reduction holds to the last bit on the common rows.
struct Kernel {
  const PdeParams& p;

  double pressure(const double* u) const {
    const double rho = u[0];
    const double vsq = (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / (rho * rho);
    const double bsq = u[5] * u[5] + u[6] * u[6] + u[7] * u[7];
    return (p.gamma - 1.0) * (u[4] - 0.5 * rho * vsq - bsq / (8.0 * M_PI));
  }

  bool admissible(const double* u, int nv) const {
    for (int v = 0; v < nv; ++v) {
      if (!std::isfinite(u[v])) return false;
    }
    if (!(u[0] > 0.0)) return false;
    const double pr = pressure(u);
    return std::isfinite(pr) && pr > 0.0;
  }

  // g: gradients of the conserved vector over `dims` directions, layout [j*9 + v]
  // (missing directions are treated as zero). F: [k*9 + v] for k < dims.
  void flux(const double* u, const double* g, int dims, double* F) const {
    const double rho = u[0];
    const double inv_rho = 1.0 / rho;
    const double v[3] = {u[1] * inv_rho, u[2] * inv_rho, u[3] * inv_rho};
    const double B[3] = {u[5], u[6], u[7]};
    const double psi = u[8];
    const double vsq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double bsq = B[0] * B[0] + B[1] * B[1] + B[2] * B[2];
    const double pg = (p.gamma - 1.0) * (u[4] - 0.5 * rho * vsq - bsq / (8.0 * M_PI));
    const double ptot = pg + bsq / (8.0 * M_PI);
    const double vdotB = v[0] * B[0] + v[1] * B[1] + v[2] * B[2];

    // Velocity, pressure and temperature gradients from the conserved gradients.
    double dv[3][3] = {};   // dv[j][i] = d v_i / d x_j, j < dims
    double dT[3] = {};      // d (p/rho) / d x_j
    for (int j = 0; j < dims; ++j) {
      const double* gj = g + j * 9;
      for (int i = 0; i < 3; ++i) dv[j][i] = (gj[1 + i] - v[i] * gj[0]) * inv_rho;
      double vdotdv = v[0] * dv[j][0] + v[1] * dv[j][1] + v[2] * dv[j][2];
      double BdotdB = B[0] * gj[5] + B[1] * gj[6] + B[2] * gj[7];
      const double dp = (p.gamma - 1.0) *
                        (gj[4] - 0.5 * vsq * gj[0] - rho * vdotdv - BdotdB / kFourPi);
      dT[j] = (dp - pg * inv_rho * gj[0]) * inv_rho;
    }
    double divv = 0.0;
    for (int j = 0; j < dims; ++j) divv += dv[j][j];

    const double kap = p.kappa_eff();
    for (int k = 0; k < dims; ++k) {
      double* Fk = F + k * 9;
      Fk[0] = u[1 + k];

      double v_dot_sigma_k = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double dvk_dxi = (i < dims) ? dv[i][k] : 0.0;
        double sig = p.mu * (dv[k][i] + dvk_dxi);
        if (i == k) sig -= p.mu * (2.0 / 3.0) * divv;
        Fk[1 + i] = u[1 + i] * v[k] - sig - B[i] * B[k] / kFourPi;
        if (i == k) Fk[1 + i] += ptot;
        v_dot_sigma_k += v[i] * sig;
      }

      // Resistive Poynting term: (eta/4pi) B . (grad B - grad B^T) column k.
      double res = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double dBj_dxk = g[k * 9 + 5 + j];
        const double dBk_dxj = (j < dims) ? g[j * 9 + 5 + k] : 0.0;
        res += B[j] * (dBj_dxk - dBk_dxj);
      }
      Fk[4] = (u[4] + pg) * v[k] - v_dot_sigma_k -
              (vdotB * B[k] - 0.5 * bsq * v[k]) / kFourPi - kap * dT[k] -
              p.eta / kFourPi * res;

      for (int j = 0; j < 3; ++j) {
        const double dBj_dxk = g[k * 9 + 5 + j];
        const double dBk_dxj = (j < dims) ? g[j * 9 + 5 + k] : 0.0;
        Fk[5 + j] = B[j] * v[k] - v[j] * B[k] - p.eta * (dBj_dxk - dBk_dxj);
        if (j == k) Fk[5 + j] += psi;
      }
      Fk[8] = p.ch * p.ch * B[k];
    }
  }

  double max_convective_speed(const double* u, const double* n) const {
    const double rho = u[0];
    const double vn = (u[1] * n[0] + u[2] * n[1] + u[3] * n[2]) / rho;
    const double Bn = u[5] * n[0] + u[6] * n[1] + u[7] * n[2];
    const double bsq = u[5] * u[5] + u[6] * u[6] + u[7] * u[7];
    const double cs2 = p.gamma * pressure(u) / rho;
    const double ca2 = bsq / (kFourPi * rho);
    const double can2 = Bn * Bn / (kFourPi * rho);
    double disc = (cs2 + ca2) * (cs2 + ca2) - 4.0 * cs2 * can2;
    if (disc < 0.0) disc = 0.0;
    const double cf = std::sqrt(0.5 * (cs2 + ca2 + std::sqrt(disc)));
    return std::max(std::abs(vn) + cf, p.ch);
  }

  double max_viscous_speed(const double* u) const {
    const double inv_rho = 1.0 / u[0];
    const double shear = (4.0 / 3.0) * p.mu * inv_rho;
    const double thermal = (p.gamma - 1.0) * p.kappa_eff() * inv_rho;
    return std::max(std::max(shear, thermal), p.eta);
  }
};

class CnsModel final : public PdeModel {
 public:
  using PdeModel::PdeModel;

  int nvars() const override { return 5; }
  std::string name() const override { return "cns"; }
  bool is_mhd() const override { return false; }
  std::vector<std::string> var_names() const override {
    return {"rho", "mom_x", "mom_y", "mom_z", "energy"};
  }

  void flux(const double* u, const double* g, int dims, double* F) const override {
    double u9[9] = {u[0], u[1], u[2], u[3], u[4], 0, 0, 0, 0};
    double g9[27] = {};
    for (int j = 0; j < dims; ++j) std::memcpy(g9 + j * 9, g + j * 5, 5 * sizeof(double));
    double F9[27];
    Kernel{prm_}.flux(u9, g9, dims, F9);
    for (int k = 0; k < dims; ++k) std::memcpy(F + k * 5, F9 + k * 9, 5 * sizeof(double));
  }

  double max_convective_speed(const double* u, const double* n) const override {
    if (!admissible(u)) throw std::domain_error("cns: inadmissible state in wave speed");
    double u9[9] = {u[0], u[1], u[2], u[3], u[4], 0, 0, 0, 0};
    return Kernel{prm_}.max_convective_speed(u9, n);
  }

  double max_viscous_speed(const double* u) const override {
    if (!admissible(u)) throw std::domain_error("cns: inadmissible state in wave speed");
    return Kernel{prm_}.max_viscous_speed(u);
  }

  bool cons_to_prim(const double* u, double* prim) const override {
    if (!(u[0] > 0.0)) return false;
    const double inv_rho = 1.0 / u[0];
    const double pg = (prm_.gamma - 1.0) *
                      (u[4] - 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) * inv_rho);
    if (!(pg > 0.0)) return false;
    prim[0] = u[0];
    prim[1] = u[1] * inv_rho;
    prim[2] = u[2] * inv_rho;
    prim[3] = u[3] * inv_rho;
    prim[4] = pg;
    return true;
  }

  void prim_to_cons(const double* prim, double* u) const override {
    u[0] = prim[0];
    u[1] = prim[0] * prim[1];
    u[2] = prim[0] * prim[2];
    u[3] = prim[0] * prim[3];
    u[4] = prim[4] / (prm_.gamma - 1.0) +
           0.5 * prim[0] * (prim[1] * prim[1] + prim[2] * prim[2] + prim[3] * prim[3]);
  }

  bool admissible(const double* u) const override {
    double u9[9] = {u[0], u[1], u[2], u[3], u[4], 0, 0, 0, 0};
    return Kernel{prm_}.admissible(u9, 5);
  }

  double pressure(const double* u) const override {
    double u9[9] = {u[0], u[1], u[2], u[3], u[4], 0, 0, 0, 0};
    return Kernel{prm_}.pressure(u9);
  }

  int dmp_count() const override { return 2; }
  double dmp_quantity(int m, const double* u) const override { return m == 0 ? u[0] : u[4]; }
};

class VrmhdModel final : public PdeModel {
 public:
  using PdeModel::PdeModel;

  int nvars() const override { return 9; }
  std::string name() const override { return "vrmhd"; }
  bool is_mhd() const override { return true; }
  std::vector<std::string> var_names() const override {
    return {"rho", "mom_x", "mom_y", "mom_z", "energy", "B_x", "B_y", "B_z", "psi"};
  }

  void flux(const double* u, const double* g, int dims, double* F) const override {
    Kernel{prm_}.flux(u, g, dims, F);
  }

  double max_convective_speed(const double* u, const double* n) const override {
    if (!admissible(u)) throw std::domain_error("vrmhd: inadmissible state in wave speed");
    return Kernel{prm_}.max_convective_speed(u, n);
  }

  double max_viscous_speed(const double* u) const override {
    if (!admissible(u)) throw std::domain_error("vrmhd: inadmissible state in wave speed");
    return Kernel{prm_}.max_viscous_speed(u);
  }

  bool cons_to_prim(const double* u, double* prim) const override {
    if (!(u[0] > 0.0)) return false;
    const double pg = Kernel{prm_}.pressure(u);
    if (!(pg > 0.0)) return false;
    const double inv_rho = 1.0 / u[0];
    prim[0] = u[0];
    prim[1] = u[1] * inv_rho;
    prim[2] = u[2] * inv_rho;
    prim[3] = u[3] * inv_rho;
    prim[4] = pg;
    prim[5] = u[5];
    prim[6] = u[6];
    prim[7] = u[7];
    prim[8] = u[8];
    return true;
  }

  void prim_to_cons(const double* prim, double* u) const override {
    u[0] = prim[0];
    u[1] = prim[0] * prim[1];
    u[2] = prim[0] * prim[2];
    u[3] = prim[0] * prim[3];
    const double bsq = prim[5] * prim[5] + prim[6] * prim[6] + prim[7] * prim[7];
    u[4] = prim[4] / (prm_.gamma - 1.0) +
           0.5 * prim[0] * (prim[1] * prim[1] + prim[2] * prim[2] + prim[3] * prim[3]) +
           bsq / (8.0 * M_PI);
    u[5] = prim[5];
    u[6] = prim[6];
    u[7] = prim[7];
    u[8] = prim[8];
  }

  bool admissible(const double* u) const override { return Kernel{prm_}.admissible(u, 9); }

  double pressure(const double* u) const override { return Kernel{prm_}.pressure(u); }

  int dmp_count() const override { return 3; }
  double dmp_quantity(int m, const double* u) const override {
    if (m == 0) return u[0];
    if (m == 1) return u[4];
    return u[5] * u[5] + u[6] * u[6] + u[7] * u[7];
  }
};

}  // namespace

std::unique_ptr<PdeModel> make_model(const std::string& kind, const PdeParams& p) {
  if (kind == "cns") return std::make_unique<CnsModel>(p);
  if (kind == "vrmhd") return std::make_unique<VrmhdModel>(p);
  throw std::invalid_argument("unknown pde model '" + kind + "' (expected cns or vrmhd)");
}

}  // namespace aderdg
