//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/predictor.hpp"

#include <cmath>
#include <cstring>

namespace aderdg {

namespace {

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

Predictor solve_predictor(const OperatorSet& ops, const PdeModel& model, const double* u,
                          const double h[3], double dt, double t0,
                          const PredictorOptions& opt) {
  Predictor pred;
  const int np = ops.np, d = ops.d, nv = model.nvars();
  pred.nv = nv;
  pred.d = d;
  pred.np = np;
  pred.t0 = t0;
  pred.dt = dt;
  for (int j = 0; j < 3; ++j) pred.h[j] = h[j];

  const int m1 = np, m2 = (d > 1) ? np : 1, m3 = (d > 2) ? np : 1;
  const int nsp = m1 * m2 * m3;
  pred.nsp = nsp;
  const int nst = np * nsp;
  const int stride[3] = {1, m1, m1 * m2};
  const int msize[3] = {m1, m2, m3};

  pred.q.resize(static_cast<size_t>(nst) * nv);
  pred.grad.assign(static_cast<size_t>(nst) * d * nv, 0.0);
  pred.favg.assign(static_cast<size_t>(nsp) * d * nv, 0.0);

  // Initial guess: time-constant extension of the data at t0.
  for (int a = 0; a < np; ++a) {
    std::memcpy(pred.q.data() + static_cast<size_t>(a) * nsp * nv, u,
                static_cast<size_t>(nsp) * nv * sizeof(double));
  }

  const auto& wt = ops.quad.weights;
  const int maxiter = opt.maxiter > 0 ? opt.maxiter : 2 * np;

  std::vector<double> flx(static_cast<size_t>(nst) * d * nv);
  std::vector<double> rhs(static_cast<size_t>(nst) * nv);
  std::vector<double> qnew(static_cast<size_t>(nst) * nv);

  auto compute_gradients = [&]() {
    for (int a = 0; a < np; ++a) {
      for (int s = 0; s < nsp; ++s) {
        const int idx3[3] = {s % m1, (s / m1) % m2, s / (m1 * m2)};
        double* g = pred.grad.data() + (static_cast<size_t>(a) * nsp + s) * d * nv;
        for (int j = 0; j < d; ++j) {
          const int base = s - idx3[j] * stride[j];
          const double inv_h = 1.0 / h[j];
          for (int v = 0; v < nv; ++v) g[j * nv + v] = 0.0;
          for (int p = 0; p < msize[j]; ++p) {
            const double c = ops.diff[idx3[j] * np + p] * inv_h;
            const double* qp =
                pred.q.data() + (static_cast<size_t>(a) * nsp + base + p * stride[j]) * nv;
            for (int v = 0; v < nv; ++v) g[j * nv + v] += c * qp[v];
          }
        }
      }
    }
  };

  auto compute_fluxes = [&]() {
    for (int a = 0; a < np; ++a) {
      for (int s = 0; s < nsp; ++s) {
        const size_t n = static_cast<size_t>(a) * nsp + s;
        model.flux(pred.q.data() + n * nv, pred.grad.data() + n * d * nv, d,
                   flx.data() + n * d * nv);
      }
    }
  };

  double prev_max_q = 0.0;
  for (double x : pred.q) prev_max_q = std::max(prev_max_q, std::abs(x));

  for (int iter = 0; iter < maxiter; ++iter) {
    compute_gradients();
    compute_fluxes();

    // rhs_b = phi_b(0) u - dt w_b div F(q_b); then contract with the inverse of the
    // space-time matrix along the temporal index.
    for (int b = 0; b < np; ++b) {
      for (int s = 0; s < nsp; ++s) {
        const int idx3[3] = {s % m1, (s / m1) % m2, s / (m1 * m2)};
        double* r = rhs.data() + (static_cast<size_t>(b) * nsp + s) * nv;
        for (int v = 0; v < nv; ++v) r[v] = ops.bleft[b] * u[s * nv + v];
        for (int j = 0; j < d; ++j) {
          const int base = s - idx3[j] * stride[j];
          const double scale = dt * wt[b] / h[j];
          for (int p = 0; p < msize[j]; ++p) {
            const double c = scale * ops.diff[idx3[j] * np + p];
            const double* fp =
                flx.data() + ((static_cast<size_t>(b) * nsp + base + p * stride[j]) * d + j) * nv;
            for (int v = 0; v < nv; ++v) r[v] -= c * fp[v];
          }
        }
      }
    }
    for (int a = 0; a < np; ++a) {
      for (int s = 0; s < nsp; ++s) {
        double* qn = qnew.data() + (static_cast<size_t>(a) * nsp + s) * nv;
        for (int v = 0; v < nv; ++v) qn[v] = 0.0;
        for (int b = 0; b < np; ++b) {
          const double c = ops.tinv[a * np + b];
          const double* r = rhs.data() + (static_cast<size_t>(b) * nsp + s) * nv;
          for (int v = 0; v < nv; ++v) qn[v] += c * r[v];
        }
      }
    }

    pred.iterations = iter + 1;
    if (!all_finite(qnew)) {
      pred.ok = false;
      pred.q.swap(qnew);
      break;
    }

    // Per-variable relative update.
    double worst = 0.0, worst_abs = 0.0;
    for (int v = 0; v < nv; ++v) {
      double dmax = 0.0, qmax = 0.0;
      for (int n = 0; n < nst; ++n) {
        dmax = std::max(dmax, std::abs(qnew[static_cast<size_t>(n) * nv + v] -
                                       pred.q[static_cast<size_t>(n) * nv + v]));
        qmax = std::max(qmax, std::abs(qnew[static_cast<size_t>(n) * nv + v]));
      }
      worst = std::max(worst, dmax / std::max(qmax, 1e-14));
      worst_abs = std::max(worst_abs, dmax);
    }
    pred.residual_history.push_back(worst_abs);
    pred.q.swap(qnew);
    if (worst < opt.tol) {
      pred.converged = true;
      break;
    }
    pred.converged = (iter + 1 < maxiter);
  }

  // Final gradients and time-averaged fluxes from the accepted iterate.
  if (pred.ok) {
    compute_gradients();
    compute_fluxes();
    for (int a = 0; a < np; ++a) {
      for (int s = 0; s < nsp; ++s) {
        const size_t n = static_cast<size_t>(a) * nsp + s;
        for (int j = 0; j < d; ++j) {
          for (int v = 0; v < nv; ++v) {
            pred.favg[(static_cast<size_t>(s) * d + j) * nv + v] +=
                wt[a] * flx[(n * d + j) * nv + v];
          }
        }
      }
    }
    if (!all_finite(pred.favg) || !all_finite(pred.grad)) pred.ok = false;
  }
  return pred;
}

void predictor_eval(const OperatorSet& ops, const Predictor& pred, const double xi[3],
                    double tau, double* state, double* grad) {
  const int np = pred.np, d = pred.d, nv = pred.nv, nsp = pred.nsp;
  const int m1 = np, m2 = (d > 1) ? np : 1;
  double phix[3][16];
  double phit[16];
  for (int j = 0; j < d; ++j) lagrange_eval_all(ops.quad, xi[j], phix[j]);
  lagrange_eval_all(ops.quad, tau, phit);

  for (int v = 0; v < nv; ++v) state[v] = 0.0;
  if (grad) {
    for (int j = 0; j < d * nv; ++j) grad[j] = 0.0;
  }
  for (int a = 0; a < np; ++a) {
    if (phit[a] == 0.0) continue;
    for (int s = 0; s < nsp; ++s) {
      const int i1 = s % m1, i2 = (s / m1) % m2, i3 = s / (m1 * m2);
      double wgt = phix[0][i1];
      if (d > 1) wgt *= phix[1][i2];
      if (d > 2) wgt *= phix[2][i3];
      if (wgt == 0.0 && !grad) continue;
      const double c = phit[a] * wgt;
      const size_t n = static_cast<size_t>(a) * nsp + s;
      const double* qs = pred.q.data() + n * nv;
      for (int v = 0; v < nv; ++v) state[v] += c * qs[v];
      if (grad) {
        const double* gs = pred.grad.data() + n * d * nv;
        for (int j = 0; j < d * nv; ++j) grad[j] += c * gs[j];
      }
    }
  }
}

void predictor_time_slice(const OperatorSet& ops, const Predictor& pred, double tau,
                          double* out) {
  const int np = pred.np, nv = pred.nv, nsp = pred.nsp;
  double phit[16];
  lagrange_eval_all(ops.quad, tau, phit);
  for (int i = 0; i < nsp * nv; ++i) out[i] = 0.0;
  for (int a = 0; a < np; ++a) {
    const double c = phit[a];
    if (c == 0.0) continue;
    const double* qa = pred.q.data() + static_cast<size_t>(a) * nsp * nv;
    for (int i = 0; i < nsp * nv; ++i) out[i] += c * qa[i];
  }
}

FaceTraces face_traces(const OperatorSet& ops, const Predictor& pred, int face) {
  const int np = pred.np, d = pred.d, nv = pred.nv, nsp = pred.nsp;
  const int dim = face / 2, side = face % 2;
  const int m[3] = {np, (d > 1) ? np : 1, (d > 2) ? np : 1};
  const int stride[3] = {1, m[0], m[0] * m[1]};

  FaceTraces tr;
  tr.ntan = nsp / m[dim];
  tr.state.assign(static_cast<size_t>(np) * tr.ntan * nv, 0.0);
  tr.grad.assign(static_cast<size_t>(np) * tr.ntan * d * nv, 0.0);
  const auto& bvec = side == 0 ? ops.bleft : ops.bright;

  for (int a = 0; a < np; ++a) {
    for (int t = 0; t < tr.ntan; ++t) {
      // tangential index t enumerates the remaining dims in ascending order
      int idx3[3] = {0, 0, 0};
      int rem = t;
      for (int j = 0; j < d; ++j) {
        if (j == dim) continue;
        idx3[j] = rem % m[j];
        rem /= m[j];
      }
      double* st = tr.state.data() + (static_cast<size_t>(a) * tr.ntan + t) * nv;
      double* gr = tr.grad.data() + (static_cast<size_t>(a) * tr.ntan + t) * d * nv;
      for (int p = 0; p < m[dim]; ++p) {
        idx3[dim] = p;
        const int s = idx3[0] * stride[0] + idx3[1] * stride[1] + idx3[2] * stride[2];
        const double c = bvec[p];
        const size_t n = static_cast<size_t>(a) * nsp + s;
        const double* qs = pred.q.data() + n * nv;
        for (int v = 0; v < nv; ++v) st[v] += c * qs[v];
        const double* gs = pred.grad.data() + n * d * nv;
        for (int j = 0; j < d * nv; ++j) gr[j] += c * gs[j];
      }
    }
  }
  return tr;
}

}  // namespace aderdg
