//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/corrector.hpp"

#include <cmath>
#include <limits>

namespace aderdg {

double rusanov_smax(const PdeModel& model, const double* qL, const double* qR, int dim,
                    double h_pen, int degree) {
  double n[3] = {0.0, 0.0, 0.0};
  n[dim] = 1.0;
  const double lc = std::max(model.max_convective_speed(qL, n), model.max_convective_speed(qR, n));
  const double lv = std::max(model.max_viscous_speed(qL), model.max_viscous_speed(qR));
  return lc + 2.0 * (degree + 1) / h_pen * lv;
}

void rusanov_flux(const PdeModel& model, const double* qL, const double* gL,
                  const double* qR, const double* gR, int dim, int dims, double h_pen,
                  int degree, double* out) {
  const int nv = model.nvars();
  if (!model.admissible(qL) || !model.admissible(qR)) {
    for (int v = 0; v < nv; ++v) out[v] = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const double s = rusanov_smax(model, qL, qR, dim, h_pen, degree);
  double FL[27], FR[27];
  model.flux(qL, gL, dims, FL);
  model.flux(qR, gR, dims, FR);
  const double* fL = FL + dim * nv;
  const double* fR = FR + dim * nv;
  for (int v = 0; v < nv; ++v) {
    out[v] = 0.5 * (fR[v] + fL[v]) - 0.5 * s * (qR[v] - qL[v]);
  }
}

void add_volume_term(const OperatorSet& ops, const Predictor& pred, double* buf) {
  const int np = ops.np, d = ops.d, nv = pred.nv, nsp = pred.nsp;
  const int m[3] = {np, (d > 1) ? np : 1, (d > 2) ? np : 1};
  const int stride[3] = {1, m[0], m[0] * m[1]};
  const auto& w = ops.quad.weights;

  for (int s = 0; s < nsp; ++s) {
    const int idx3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
    double* b = buf + static_cast<size_t>(s) * nv;
    for (int j = 0; j < d; ++j) {
      const int base = s - idx3[j] * stride[j];
      const double scale = pred.dt / (pred.h[j] * w[idx3[j]]);
      for (int q = 0; q < m[j]; ++q) {
        const double c = scale * w[q] * ops.diff[q * np + idx3[j]];
        const double* f =
            pred.favg.data() + ((static_cast<size_t>(base) + q * stride[j]) * d + j) * nv;
        for (int v = 0; v < nv; ++v) b[v] += c * f[v];
      }
    }
  }
}

namespace {

// Enumerate tangential dims of `dim` in ascending order into tdims[0..d-2].
inline int tangential_dims(int d, int dim, int tdims[2]) {
  int nt = 0;
  for (int j = 0; j < d; ++j) {
    if (j != dim) tdims[nt++] = j;
  }
  return nt;
}

}  // namespace

void add_face_term_nodal(const OperatorSet& ops, int nv, const double h[3], int dim,
                         int side, const FaceMap& map, const double* Gbar, int ntan,
                         double dtf, double* buf) {
  const int np = ops.np, d = ops.d;
  const int m[3] = {np, (d > 1) ? np : 1, (d > 2) ? np : 1};
  const int stride[3] = {1, m[0], m[0] * m[1]};
  int tdims[2];
  const int nt = tangential_dims(d, dim, tdims);
  const auto& w = ops.quad.weights;
  const auto& bN = side == 1 ? ops.bright : ops.bleft;
  const double sign = side == 1 ? 1.0 : -1.0;

  double area_frac = 1.0;
  for (int t = 0; t < nt; ++t) area_frac *= map.scale;

  // phi_K(mapped tangential node) tables, one per tangential dim.
  double phi[2][16][16];  // [tdim][node m][basis K]
  int mt[2] = {1, 1};
  for (int t = 0; t < nt; ++t) {
    mt[t] = np;
    for (int q = 0; q < np; ++q) {
      const double xi = map.offset[t] + map.scale * ops.quad.nodes[q];
      lagrange_eval_all(ops.quad, xi, phi[t][q]);
    }
  }
  const int ntan_expect = mt[0] * mt[1];
  (void)ntan_expect;

  // K runs over all cell nodes; tangential quadrature nodes over the subface.
  for (int s = 0; s < m[0] * m[1] * m[2]; ++s) {
    const int idx3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
    double wK = w[idx3[0]];
    if (d > 1) wK *= w[idx3[1]];
    if (d > 2) wK *= w[idx3[2]];
    const double base_c = sign * dtf * area_frac * bN[idx3[dim]] / (h[dim] * wK);
    if (base_c == 0.0) continue;
    double* b = buf + static_cast<size_t>(s) * nv;
    for (int t = 0; t < ntan; ++t) {
      const int t0 = t % mt[0], t1 = t / mt[0];
      double c = 1.0;
      if (nt > 0) c *= ops.quad.weights[t0] * phi[0][t0][idx3[tdims[0]]];
      if (nt > 1) c *= ops.quad.weights[t1] * phi[1][t1][idx3[tdims[1]]];
      c *= base_c;
      if (c == 0.0) continue;
      const double* G = Gbar + static_cast<size_t>(t) * nv;
      for (int v = 0; v < nv; ++v) b[v] -= c * G[v];
    }
  }
  (void)stride;
}

void add_face_term_subcell(const OperatorSet& ops, int nv, const double h[3], int dim,
                           int side, const FaceMap& map, const double* Gsub, double dtf,
                           double* buf) {
  const int np = ops.np, d = ops.d, Ns = ops.Ns;
  const int m[3] = {np, (d > 1) ? np : 1, (d > 2) ? np : 1};
  int tdims[2];
  const int nt = tangential_dims(d, dim, tdims);
  const auto& w = ops.quad.weights;
  const auto& bN = side == 1 ? ops.bright : ops.bleft;
  const double sign = side == 1 ? 1.0 : -1.0;

  double area_frac = 1.0;
  for (int t = 0; t < nt; ++t) area_frac *= map.scale;

  // Mean of phi_K over each mapped subface interval, per tangential dim.
  double pint[2][32][16];  // [tdim][subcell][basis K]
  int st[2] = {1, 1};
  for (int t = 0; t < nt; ++t) {
    st[t] = Ns;
    for (int s = 0; s < Ns; ++s) {
      const double a = map.offset[t] + map.scale * (static_cast<double>(s) / Ns);
      // mean over [a, a+scale/Ns] by GL quadrature (exact for degree N)
      for (int k = 0; k < np; ++k) pint[t][s][k] = 0.0;
      double tmp[16];
      for (int q = 0; q < np; ++q) {
        const double xi = a + map.scale / Ns * ops.quad.nodes[q];
        lagrange_eval_all(ops.quad, xi, tmp);
        for (int k = 0; k < np; ++k) pint[t][s][k] += ops.quad.weights[q] * tmp[k];
      }
    }
  }

  const int nsub = st[0] * st[1];
  for (int s = 0; s < m[0] * m[1] * m[2]; ++s) {
    const int idx3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
    double wK = w[idx3[0]];
    if (d > 1) wK *= w[idx3[1]];
    if (d > 2) wK *= w[idx3[2]];
    const double base_c = sign * dtf * area_frac * bN[idx3[dim]] / (h[dim] * wK);
    if (base_c == 0.0) continue;
    double* b = buf + static_cast<size_t>(s) * nv;
    for (int t = 0; t < nsub; ++t) {
      const int t0 = t % st[0], t1 = t / st[0];
      double c = base_c;
      if (nt > 0) c *= (1.0 / Ns) * pint[0][t0][idx3[tdims[0]]];
      if (nt > 1) c *= (1.0 / Ns) * pint[1][t1][idx3[tdims[1]]];
      const double* G = Gsub + static_cast<size_t>(t) * nv;
      for (int v = 0; v < nv; ++v) b[v] -= c * G[v];
    }
  }
}

namespace {

double dt_bound_from_speeds(const OperatorSet& ops, int d, double lc, double lv,
                            const double h[3]) {
  double hmin = h[0];
  for (int j = 1; j < d; ++j) hmin = std::min(hmin, h[j]);
  const int S = std::max(2 * ops.N + 1, ops.Ns);
  const double denom = lc + lv * 2.0 * S / hmin;
  if (denom <= 0.0) return std::numeric_limits<double>::max();
  return hmin / (d * S) / denom;
}

}  // namespace

double cell_dt_bound(const OperatorSet& ops, const PdeModel& model, const double* u,
                     const double h[3]) {
  const int d = ops.d, nv = model.nvars();
  const int nsp = ops.nodes_nd();

  double lc = -1.0, lv = 0.0;
  auto sample = [&](const double* s) {
    for (int j = 0; j < d; ++j) {
      double n[3] = {0.0, 0.0, 0.0};
      n[j] = 1.0;
      lc = std::max(lc, model.max_convective_speed(s, n));
    }
    lv = std::max(lv, model.max_viscous_speed(s));
  };
  for (int s = 0; s < nsp; ++s) {
    const double* us = u + static_cast<size_t>(s) * nv;
    if (model.admissible(us)) sample(us);
  }
  if (lc < 0.0) {
    // Fall back to the cell mean.
    double mean[16] = {0.0};
    const int np = ops.np;
    const int m[3] = {np, (d > 1) ? np : 1, (d > 2) ? np : 1};
    for (int s = 0; s < nsp; ++s) {
      const int idx3[3] = {s % m[0], (s / m[0]) % m[1], s / (m[0] * m[1])};
      double wK = ops.quad.weights[idx3[0]];
      if (d > 1) wK *= ops.quad.weights[idx3[1]];
      if (d > 2) wK *= ops.quad.weights[idx3[2]];
      for (int v = 0; v < nv; ++v) mean[v] += wK * u[static_cast<size_t>(s) * nv + v];
    }
    if (!model.admissible(mean)) return -1.0;
    sample(mean);
  }
  return dt_bound_from_speeds(ops, d, lc, lv, h);
}

double single_state_dt_bound(const OperatorSet& ops, const PdeModel& model,
                             const double* state, const double h[3]) {
  const int d = ops.d;
  if (!model.admissible(state)) return -1.0;
  double lc = 0.0;
  for (int j = 0; j < d; ++j) {
    double n[3] = {0.0, 0.0, 0.0};
    n[j] = 1.0;
    lc = std::max(lc, model.max_convective_speed(state, n));
  }
  const double lv = model.max_viscous_speed(state);
  return dt_bound_from_speeds(ops, d, lc, lv, h);
}

}  // namespace aderdg
