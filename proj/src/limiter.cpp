//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/limiter.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace aderdg {

void project_to_subcells(const OperatorSet& ops, int nv, const double* u, double* w) {
  const int d = ops.d, np = ops.np, Ns = ops.Ns;
  int sz[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
  std::vector<double> data(u, u + static_cast<size_t>(sz[0]) * sz[1] * sz[2] * nv);
  for (int axis = 0; axis < d; ++axis)
    tensor_apply_axis(ops.psub.data(), Ns, np, axis, sz, nv, data);
  std::memcpy(w, data.data(), data.size() * sizeof(double));
}

void reconstruct_from_subcells(const OperatorSet& ops, int nv, const double* w, double* u) {
  const int d = ops.d, np = ops.np, Ns = ops.Ns;
  int sz[3] = {Ns, d > 1 ? Ns : 1, d > 2 ? Ns : 1};
  const int nsub = sz[0] * sz[1] * sz[2];
  std::vector<double> data(w, w + static_cast<size_t>(nsub) * nv);
  for (int axis = 0; axis < d; ++axis)
    tensor_apply_axis(ops.rsub.data(), np, Ns, axis, sz, nv, data);
  std::memcpy(u, data.data(), data.size() * sizeof(double));

  // Pin the element mean to the mean of the averages exactly; the constrained least
  // squares already enforces this analytically, the shift removes solver roundoff.
  double wmean[16], umean[16];
  for (int v = 0; v < nv; ++v) wmean[v] = 0.0;
  for (int s = 0; s < nsub; ++s) {
    for (int v = 0; v < nv; ++v) wmean[v] += w[static_cast<size_t>(s) * nv + v];
  }
  for (int v = 0; v < nv; ++v) wmean[v] /= nsub;
  element_mean(ops, nv, u, umean);
  const int nsp = ops.nodes_nd();
  for (int s = 0; s < nsp; ++s) {
    for (int v = 0; v < nv; ++v) u[static_cast<size_t>(s) * nv + v] += wmean[v] - umean[v];
  }
}

void element_mean(const OperatorSet& ops, int nv, const double* u, double* mean) {
  const int d = ops.d, np = ops.np;
  const int m[3] = {np, d > 1 ? np : 1, d > 2 ? np : 1};
  const int nsp = m[0] * m[1] * m[2];
  for (int v = 0; v < nv; ++v) mean[v] = 0.0;
  for (int s = 0; s < nsp; ++s) {
    const int idx3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
    double wK = ops.quad.weights[idx3[0]];
    if (d > 1) wK *= ops.quad.weights[idx3[1]];
    if (d > 2) wK *= ops.quad.weights[idx3[2]];
    for (int v = 0; v < nv; ++v) mean[v] += wK * u[static_cast<size_t>(s) * nv + v];
  }
}

int dmp_quantity_count(const PdeModel& model, const LimiterOptions& opt) {
  return opt.dmp_all_vars ? model.nvars() : model.dmp_count();
}

double dmp_quantity(const PdeModel& model, const LimiterOptions& opt, int m,
                    const double* state) {
  return opt.dmp_all_vars ? state[m] : model.dmp_quantity(m, state);
}

void accumulate_dmp_bounds(const PdeModel& model, const LimiterOptions& opt, int nsub,
                           const double* w, double* qmin, double* qmax) {
  const int nq = dmp_quantity_count(model, opt);
  const int nv = model.nvars();
  for (int s = 0; s < nsub; ++s) {
    const double* ws = w + static_cast<size_t>(s) * nv;
    for (int m = 0; m < nq; ++m) {
      const double q = dmp_quantity(model, opt, m, ws);
      qmin[m] = std::min(qmin[m], q);
      qmax[m] = std::max(qmax[m], q);
    }
  }
}

DetectionReport detect_candidate(const OperatorSet& ops, const PdeModel& model,
                                 const LimiterOptions& opt, const double* cand_nodal,
                                 const double* cand_subcell, const double* bounds_min,
                                 const double* bounds_max) {
  DetectionReport rep;
  const int nv = model.nvars();
  const int nsp = ops.nodes_nd();
  const int nsub = ops.subcells_nd();

  auto physical = [&](const double* s) {
    if (model.admissible(s)) return;
    for (int v = 0; v < nv; ++v) {
      if (!std::isfinite(s[v])) {
        rep.nan_detected = true;
        return;
      }
    }
    if (!(s[0] > 0.0)) {
      rep.negative_density = true;
      return;
    }
    rep.negative_pressure = true;
  };
  for (int s = 0; s < nsp; ++s) physical(cand_nodal + static_cast<size_t>(s) * nv);
  for (int s = 0; s < nsub; ++s) physical(cand_subcell + static_cast<size_t>(s) * nv);

  // Relaxed discrete maximum principle on the subgrid representation.
  const int nq = dmp_quantity_count(model, opt);
  for (int m = 0; m < nq; ++m) {
    const double range = bounds_max[m] - bounds_min[m];
    const double delta = std::max(opt.delta0, opt.eps * range);
    for (int s = 0; s < nsub; ++s) {
      const double q = dmp_quantity(model, opt, m, cand_subcell + static_cast<size_t>(s) * nv);
      if (!std::isfinite(q)) {
        rep.nan_detected = true;
      } else if (q < bounds_min[m] - delta || q > bounds_max[m] + delta) {
        rep.dmp_violation = true;
      }
    }
  }
  return rep;
}

FvScheme parse_scheme(const std::string& s) {
  if (s == "weno3") return FvScheme::Weno3;
  if (s == "tvd_prim") return FvScheme::TvdPrim;
  if (s == "first_order") return FvScheme::FirstOrder;
  throw std::invalid_argument("unknown limiter scheme '" + s + "'");
}

int ext_size(int d, int Ns) {
  int n = Ns + 4;
  int total = n;
  if (d > 1) total *= n;
  if (d > 2) total *= n;
  return total;
}

int ext_index(int d, int Ns, int i, int j, int k) {
  const int e1 = Ns + 4;
  const int e2 = d > 1 ? Ns + 4 : 1;
  int jj = d > 1 ? j + 2 : 0;
  int kk = d > 2 ? k + 2 : 0;
  return (kk * e2 + jj) * e1 + (i + 2);
}

namespace {

struct Patch {
  const PdeModel* model;
  int d, Ns, nv;
  double hs[3];
  int e[3];       // ext dims
  int stride[3];  // strides of ext

  int at(const int idx[3]) const {
    return (idx[2] * e[1] + idx[1]) * e[0] + idx[0];  // ghost offset included by caller
  }
};

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// CWENO edge values of the middle cell from three consecutive averages.
// Linear weights {1/4, 1/2, 1/4} for {left-biased, central, right-biased}.
inline void cweno_edges(double wm, double w0, double wp, double& left, double& right) {
  const double eps = 1e-14;
  const double sL = w0 - wm;
  const double sR = wp - w0;
  const double c2 = wp - 2.0 * w0 + wm;
  const double b = 0.5 * (wp - wm);
  const double bL = sL * sL;
  const double bR = sR * sR;
  const double bC = (13.0 / 12.0) * c2 * c2 + 0.25 * (wp - wm) * (wp - wm);
  auto pw4 = [](double x) {
    const double y = x * x;
    return y * y;
  };
  double aL = 0.25 / pw4(bL + eps);
  double aC = 0.50 / pw4(bC + eps);
  double aR = 0.25 / pw4(bR + eps);
  const double asum = aL + aC + aR;
  aL /= asum;
  aC /= asum;
  aR /= asum;
  right = aL * (w0 + 0.5 * sL) + aC * (w0 + 0.5 * b + c2 / 6.0) + aR * (w0 + 0.5 * sR);
  left = aL * (w0 - 0.5 * sL) + aC * (w0 - 0.5 * b + c2 / 6.0) + aR * (w0 - 0.5 * sR);
}

// Gradient of the cell averages at a face, central differences; tangential indices
// clamp at the extended-array bounds (only the viscous terms see the clamp).
void face_gradient(const Patch& P, const double* src, const int ileft[3], int axis,
                   double* g) {
  const int nv = P.nv;
  for (int j = 0; j < P.d * nv; ++j) g[j] = 0.0;
  int iright[3] = {ileft[0], ileft[1], ileft[2]};
  iright[axis] += 1;
  const double* uL = src + static_cast<size_t>(P.at(ileft)) * nv;
  const double* uR = src + static_cast<size_t>(P.at(iright)) * nv;
  for (int v = 0; v < nv; ++v) g[axis * nv + v] = (uR[v] - uL[v]) / P.hs[axis];
  for (int t = 0; t < P.d; ++t) {
    if (t == axis) continue;
    for (int side = 0; side < 2; ++side) {
      const int* base = side == 0 ? ileft : iright;
      int ip[3] = {base[0], base[1], base[2]};
      int im[3] = {base[0], base[1], base[2]};
      ip[t] = std::min(ip[t] + 1, P.e[t] - 1);
      im[t] = std::max(im[t] - 1, 0);
      const double* up = src + static_cast<size_t>(P.at(ip)) * nv;
      const double* um = src + static_cast<size_t>(P.at(im)) * nv;
      const double dx = (ip[t] - im[t]) * P.hs[t];
      if (dx > 0.0) {
        for (int v = 0; v < nv; ++v) g[t * nv + v] += 0.5 * (up[v] - um[v]) / dx;
      }
    }
  }
}

// Rusanov flux on the subgrid: eta = 1/h_s penalty (piecewise-constant basis).
void subgrid_flux(const Patch& P, const double* qL, const double* qR, const double* g,
                  int axis, double* G) {
  const PdeModel& model = *P.model;
  const int nv = P.nv;
  double s = 0.0;
  const bool okL = model.admissible(qL);
  const bool okR = model.admissible(qR);
  if (okL && okR) {
    double n[3] = {0.0, 0.0, 0.0};
    n[axis] = 1.0;
    const double lc = std::max(model.max_convective_speed(qL, n), model.max_convective_speed(qR, n));
    const double lv = std::max(model.max_viscous_speed(qL), model.max_viscous_speed(qR));
    s = lc + 2.0 / P.hs[axis] * lv;
  }
  double FL[27], FR[27];
  model.flux(qL, g, P.d, FL);
  model.flux(qR, g, P.d, FR);
  for (int v = 0; v < nv; ++v) {
    G[v] = 0.5 * (FR[axis * nv + v] + FL[axis * nv + v]) - 0.5 * s * (qR[v] - qL[v]);
  }
}

// One conservative flux sweep. recon(cellidx3, axis, side, out) supplies the face
// state of a cell (side 0 = low face, 1 = high face); grad_src supplies the averages
// used for viscous gradients. Updates dudt over the interior and records patch
// boundary fluxes.
template <typename Recon>
void flux_sweep(const Patch& P, const double* grad_src, Recon&& recon, double* dudt,
                std::array<std::vector<double>, 6>* bflux) {
  const int d = P.d, Ns = P.Ns, nv = P.nv;
  const int tan[2] = {d > 1 ? Ns : 1, d > 2 ? Ns : 1};
  double qL[16], qR[16], G[16], g[48];
  for (int axis = 0; axis < d; ++axis) {
    int tdims[2], nt = 0;
    for (int j = 0; j < d; ++j) {
      if (j != axis) tdims[nt++] = j;
    }
    for (int t1 = 0; t1 < tan[1]; ++t1) {
      for (int t0 = 0; t0 < tan[0]; ++t0) {
        for (int f = 0; f <= Ns; ++f) {
          int ileft[3] = {0, 0, 0};
          ileft[axis] = f - 1 + 2;  // ghost offset
          if (nt > 0) ileft[tdims[0]] = t0 + 2;
          if (nt > 1) ileft[tdims[1]] = t1 + 2;
          int iright[3] = {ileft[0], ileft[1], ileft[2]};
          iright[axis] += 1;

          recon(ileft, axis, 1, qL);
          recon(iright, axis, 0, qR);
          face_gradient(P, grad_src, ileft, axis, g);
          subgrid_flux(P, qL, qR, g, axis, G);

          if (f > 0) {
            double* acc = dudt + static_cast<size_t>(P.at(ileft)) * nv;
            for (int v = 0; v < nv; ++v) acc[v] -= G[v] / P.hs[axis];
          }
          if (f < Ns) {
            double* acc = dudt + static_cast<size_t>(P.at(iright)) * nv;
            for (int v = 0; v < nv; ++v) acc[v] += G[v] / P.hs[axis];
          }
          if (bflux && (f == 0 || f == Ns)) {
            const int face = 2 * axis + (f == 0 ? 0 : 1);
            double* dst = (*bflux)[face].data() + static_cast<size_t>(t1 * tan[0] + t0) * nv;
            for (int v = 0; v < nv; ++v) dst[v] = G[v];
          }
        }
      }
    }
  }
}

}  // namespace

SubgridStep fv_subcell_step(const PdeModel& model, int d, int Ns, const double hs[3],
                            double dt, FvScheme scheme, double* ext) {
  Patch P;
  P.model = &model;
  P.d = d;
  P.Ns = Ns;
  P.nv = model.nvars();
  for (int j = 0; j < 3; ++j) P.hs[j] = hs[j];
  P.e[0] = Ns + 4;
  P.e[1] = d > 1 ? Ns + 4 : 1;
  P.e[2] = d > 2 ? Ns + 4 : 1;
  P.stride[0] = 1;
  P.stride[1] = P.e[0];
  P.stride[2] = P.e[0] * P.e[1];
  const int nv = P.nv;
  const int ntot = P.e[0] * P.e[1] * P.e[2];
  const int ntan = (d > 1 ? Ns : 1) * (d > 2 ? Ns : 1);

  SubgridStep result;
  for (int f = 0; f < 2 * d; ++f) result.bflux[f].assign(static_cast<size_t>(ntan) * nv, 0.0);

  auto interior_loop = [&](auto&& fn) {
    for (int k = 0; k < (d > 2 ? Ns : 1); ++k) {
      for (int j = 0; j < (d > 1 ? Ns : 1); ++j) {
        for (int i = 0; i < Ns; ++i) {
          int idx[3] = {i + 2, d > 1 ? j + 2 : 0, d > 2 ? k + 2 : 0};
          fn(idx);
        }
      }
    }
  };

  auto cell_recon = [&](const double* src) {
    return [&P, src](const int idx[3], int axis, int side, double* out) {
      const double* u0 = src + static_cast<size_t>(P.at(idx)) * P.nv;
      for (int v = 0; v < P.nv; ++v) out[v] = u0[v];
      (void)axis;
      (void)side;
    };
  };

  if (scheme == FvScheme::FirstOrder) {
    std::vector<double> dudt(static_cast<size_t>(ntot) * nv, 0.0);
    flux_sweep(P, ext, cell_recon(ext), dudt.data(), &result.bflux);
    interior_loop([&](const int idx[3]) {
      double* u = ext + static_cast<size_t>(P.at(idx)) * nv;
      const double* du = dudt.data() + static_cast<size_t>(P.at(idx)) * nv;
      for (int v = 0; v < nv; ++v) u[v] += dt * du[v];
    });
  } else if (scheme == FvScheme::Weno3) {
    auto weno_recon = [&P](const double* src) {
      return [&P, src](const int idx[3], int axis, int side, double* out) {
        // Clamp the stencil at the extended-array bounds (outermost ghosts only).
        int im[3] = {idx[0], idx[1], idx[2]};
        int ip[3] = {idx[0], idx[1], idx[2]};
        im[axis] = std::max(im[axis] - 1, 0);
        ip[axis] = std::min(ip[axis] + 1, P.e[axis] - 1);
        const double* um = src + static_cast<size_t>(P.at(im)) * P.nv;
        const double* u0 = src + static_cast<size_t>(P.at(idx)) * P.nv;
        const double* up = src + static_cast<size_t>(P.at(ip)) * P.nv;
        for (int v = 0; v < P.nv; ++v) {
          double l, r;
          cweno_edges(um[v], u0[v], up[v], l, r);
          out[v] = side == 0 ? l : r;
        }
        if (!P.model->admissible(out)) {
          for (int v = 0; v < P.nv; ++v) out[v] = u0[v];
        }
      };
    };

    // Midpoint rule: half step, then fluxes from the half-time state. Ghosts stay
    // frozen at t^n.
    std::vector<double> dudt(static_cast<size_t>(ntot) * nv, 0.0);
    flux_sweep(P, ext, weno_recon(ext), dudt.data(), nullptr);
    std::vector<double> half(ext, ext + static_cast<size_t>(ntot) * nv);
    interior_loop([&](const int idx[3]) {
      double* u = half.data() + static_cast<size_t>(P.at(idx)) * nv;
      const double* u0 = ext + static_cast<size_t>(P.at(idx)) * nv;
      const double* du = dudt.data() + static_cast<size_t>(P.at(idx)) * nv;
      for (int v = 0; v < nv; ++v) u[v] = u0[v] + 0.5 * dt * du[v];
      if (!model.admissible(u)) {
        for (int v = 0; v < nv; ++v) u[v] = u0[v];
      }
    });
    std::vector<double> dudt2(static_cast<size_t>(ntot) * nv, 0.0);
    flux_sweep(P, half.data(), weno_recon(half.data()), dudt2.data(), &result.bflux);
    interior_loop([&](const int idx[3]) {
      double* u = ext + static_cast<size_t>(P.at(idx)) * nv;
      const double* du = dudt2.data() + static_cast<size_t>(P.at(idx)) * nv;
      for (int v = 0; v < nv; ++v) u[v] += dt * du[v];
    });
  } else {  // TvdPrim: MUSCL-Hancock with minmod slopes on primitive variables
    std::vector<double> prim(static_cast<size_t>(ntot) * nv);
    std::vector<char> primok(ntot, 1);
    for (int c = 0; c < ntot; ++c) {
      const double* u = ext + static_cast<size_t>(c) * nv;
      double* pr = prim.data() + static_cast<size_t>(c) * nv;
      if (!model.cons_to_prim(u, pr)) {
        // Degenerate input: carry the raw values, first-order fallbacks take over.
        for (int v = 0; v < nv; ++v) pr[v] = u[v];
        primok[c] = 0;
      }
    }

    // Evolved face states for every cell with a full stencil; ghosts keep their
    // unevolved slope-extrapolated values.
    std::vector<double> fstate(static_cast<size_t>(ntot) * 2 * d * nv);
    for (int k = 0; k < P.e[2]; ++k) {
      for (int j = 0; j < P.e[1]; ++j) {
        for (int i = 0; i < P.e[0]; ++i) {
          int idx[3] = {i, j, k};
          const int c = P.at(idx);
          const double* u0 = ext + static_cast<size_t>(c) * nv;
          double* fs = fstate.data() + static_cast<size_t>(c) * 2 * d * nv;
          bool interiorish = true;
          for (int axis = 0; axis < d; ++axis) {
            if (idx[axis] < 1 || idx[axis] > P.e[axis] - 2) interiorish = false;
          }
          if (!interiorish || !primok[c]) {
            for (int axis = 0; axis < d; ++axis) {
              for (int side = 0; side < 2; ++side) {
                std::memcpy(fs + (2 * axis + side) * nv, u0, nv * sizeof(double));
              }
            }
            continue;
          }
          const double* pr0 = prim.data() + static_cast<size_t>(c) * nv;
          double slope[3][16];
          for (int axis = 0; axis < d; ++axis) {
            int im[3] = {i, j, k}, ip[3] = {i, j, k};
            im[axis] -= 1;
            ip[axis] += 1;
            const double* pm = prim.data() + static_cast<size_t>(P.at(im)) * nv;
            const double* pp = prim.data() + static_cast<size_t>(P.at(ip)) * nv;
            for (int v = 0; v < nv; ++v) slope[axis][v] = minmod(pr0[v] - pm[v], pp[v] - pr0[v]);
          }
          double half_inc[16] = {0.0};
          double uface[3][2][16];
          for (int axis = 0; axis < d; ++axis) {
            for (int side = 0; side < 2; ++side) {
              double pf[16];
              const double sgn = side == 0 ? -0.5 : 0.5;
              for (int v = 0; v < nv; ++v) pf[v] = pr0[v] + sgn * slope[axis][v];
              double* uf = uface[axis][side];
              model.prim_to_cons(pf, uf);
              if (!model.admissible(uf)) std::memcpy(uf, u0, nv * sizeof(double));
            }
            double Fm[27], Fp[27], gzero[48] = {0.0};
            model.flux(uface[axis][0], gzero, d, Fm);
            model.flux(uface[axis][1], gzero, d, Fp);
            for (int v = 0; v < nv; ++v) {
              half_inc[v] -= 0.5 * dt / P.hs[axis] * (Fp[axis * nv + v] - Fm[axis * nv + v]);
            }
          }
          for (int axis = 0; axis < d; ++axis) {
            for (int side = 0; side < 2; ++side) {
              double* dst = fs + (2 * axis + side) * nv;
              for (int v = 0; v < nv; ++v) dst[v] = uface[axis][side][v] + half_inc[v];
              if (!model.admissible(dst)) std::memcpy(dst, u0, nv * sizeof(double));
            }
          }
        }
      }
    }

    auto tvd_recon = [&P, &fstate](const int idx[3], int axis, int side, double* out) {
      const double* fs = fstate.data() +
                         (static_cast<size_t>(P.at(idx)) * 2 * P.d + 2 * axis + side) * P.nv;
      for (int v = 0; v < P.nv; ++v) out[v] = fs[v];
    };
    std::vector<double> dudt(static_cast<size_t>(ntot) * nv, 0.0);
    flux_sweep(P, ext, tvd_recon, dudt.data(), &result.bflux);
    interior_loop([&](const int idx[3]) {
      double* u = ext + static_cast<size_t>(P.at(idx)) * nv;
      const double* du = dudt.data() + static_cast<size_t>(P.at(idx)) * nv;
      for (int v = 0; v < nv; ++v) u[v] += dt * du[v];
    });
  }

  interior_loop([&](const int idx[3]) {
    const double* u = ext + static_cast<size_t>(P.at(idx)) * nv;
    for (int v = 0; v < nv; ++v) {
      if (!std::isfinite(u[v])) result.finite = false;
    }
  });
  return result;
}

}  // namespace aderdg
