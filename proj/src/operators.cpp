//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/operators.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace aderdg {

namespace linalg {

void lu_solve(std::vector<double> a, int n, std::vector<double>& rhs, int nrhs) {
  std::vector<int> piv(n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  for (int col = 0; col < n; ++col) {
    int p = col;
    for (int i = col + 1; i < n; ++i) {
      if (std::abs(a[i * n + col]) > std::abs(a[p * n + col])) p = i;
    }
    if (a[p * n + col] == 0.0) throw std::runtime_error("lu_solve: singular matrix");
    if (p != col) {
      for (int j = 0; j < n; ++j) std::swap(a[p * n + j], a[col * n + j]);
      for (int j = 0; j < nrhs; ++j) std::swap(rhs[p * nrhs + j], rhs[col * nrhs + j]);
    }
    for (int i = col + 1; i < n; ++i) {
      const double f = a[i * n + col] / a[col * n + col];
      a[i * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j) a[i * n + j] -= f * a[col * n + j];
      for (int j = 0; j < nrhs; ++j) rhs[i * nrhs + j] -= f * rhs[col * nrhs + j];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < nrhs; ++j) {
      double s = rhs[i * nrhs + j];
      for (int k = i + 1; k < n; ++k) s -= a[i * n + k] * rhs[k * nrhs + j];
      rhs[i * nrhs + j] = s / a[i * n + i];
    }
  }
}

std::vector<double> invert(const std::vector<double>& a, int n) {
  std::vector<double> rhs(n * n, 0.0);
  for (int i = 0; i < n; ++i) rhs[i * n + i] = 1.0;
  lu_solve(a, n, rhs, n);
  return rhs;
}

}  // namespace linalg

int OperatorSet::nodes_nd() const {
  int m = 1;
  for (int i = 0; i < d; ++i) m *= np;
  return m;
}

int OperatorSet::subcells_nd() const {
  int m = 1;
  for (int i = 0; i < d; ++i) m *= Ns;
  return m;
}

OperatorSet build_operators(int N, int d, int Ns, int r) {
  if (N < 0 || N > 5) throw std::invalid_argument("build_operators: degree must be in [0,5]");
  if (d < 1 || d > 3) throw std::invalid_argument("build_operators: dimension must be 1, 2 or 3");
  if (Ns < N + 1)
    throw std::invalid_argument("build_operators: subcell count must be at least N+1");
  if (r < 2) throw std::invalid_argument("build_operators: refinement factor must be >= 2");

  OperatorSet op;
  op.N = N;
  op.d = d;
  op.Ns = Ns;
  op.r = r;
  op.np = N + 1;
  op.quad = gauss_legendre(N + 1);
  const int np = op.np;
  const auto& x = op.quad.nodes;
  const auto& w = op.quad.weights;
  const auto& b = op.quad.bary;

  // Differentiation matrix from barycentric weights.
  op.diff.assign(np * np, 0.0);
  for (int i = 0; i < np; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < np; ++j) {
      if (j == i) continue;
      const double dij = (b[j] / b[i]) / (x[i] - x[j]);
      op.diff[i * np + j] = dij;
      rowsum += dij;
    }
    op.diff[i * np + i] = -rowsum;
  }

  op.bleft.resize(np);
  op.bright.resize(np);
  lagrange_eval_all(op.quad, 0.0, op.bleft.data());
  lagrange_eval_all(op.quad, 1.0, op.bright.data());

  // Space-time predictor matrix: T_ab = phi_a(1) phi_b(1) - w_b D_ba.
  {
    std::vector<double> T(np * np);
    for (int a = 0; a < np; ++a) {
      for (int bb = 0; bb < np; ++bb) {
        T[a * np + bb] = op.bright[a] * op.bright[bb] - w[bb] * op.diff[bb * np + a];
      }
    }
    op.tinv = linalg::invert(T, np);
  }

  // Subcell projection: exact averages of the basis over Ns uniform subintervals,
  // computed by GL quadrature on each subinterval (degree-N integrand, exact).
  op.psub.assign(Ns * np, 0.0);
  {
    std::vector<double> phi(np);
    for (int s = 0; s < Ns; ++s) {
      for (int q = 0; q < np; ++q) {
        const double xi = (s + x[q]) / Ns;
        lagrange_eval_all(op.quad, xi, phi.data());
        for (int k = 0; k < np; ++k) op.psub[s * np + k] += w[q] * phi[k];
      }
    }
  }

  // Conservative least-squares reconstruction: minimize |P u - wbar|^2 subject to the
  // element mean of u matching the mean of wbar. KKT system solved per unit vector.
  {
    const int m = np + 1;
    std::vector<double> kkt(m * m, 0.0);
    for (int i = 0; i < np; ++i) {
      for (int j = 0; j < np; ++j) {
        double s = 0.0;
        for (int q = 0; q < Ns; ++q) s += op.psub[q * np + i] * op.psub[q * np + j];
        kkt[i * m + j] = 2.0 * s;
      }
      kkt[i * m + np] = w[i];
      kkt[np * m + i] = w[i];
    }
    std::vector<double> rhs(m * Ns, 0.0);
    for (int s = 0; s < Ns; ++s) {
      for (int i = 0; i < np; ++i) rhs[i * Ns + s] = 2.0 * op.psub[s * np + i];
      rhs[np * Ns + s] = 1.0 / Ns;
    }
    linalg::lu_solve(kkt, m, rhs, Ns);
    op.rsub.assign(np * Ns, 0.0);
    for (int k = 0; k < np; ++k) {
      for (int s = 0; s < Ns; ++s) op.rsub[k * Ns + s] = rhs[k * Ns + s];
    }
  }

  // Inter-level transfers. Restriction of a degree-N polynomial to a child interval
  // stays in the space, so the child projection is nodal sampling.
  op.child_proj.resize(r);
  op.parent_avg.resize(r);
  {
    std::vector<double> phi(np);
    for (int c = 0; c < r; ++c) {
      op.child_proj[c].assign(np * np, 0.0);
      for (int k = 0; k < np; ++k) {
        const double xi = (c + x[k]) / r;
        lagrange_eval_all(op.quad, xi, phi.data());
        for (int j = 0; j < np; ++j) op.child_proj[c][k * np + j] = phi[j];
      }
      // parent_avg[c]_kj = (1/(r w_k)) \int phi_k((c+s)/r) phi_j(s) ds
      op.parent_avg[c].assign(np * np, 0.0);
      for (int q = 0; q < np; ++q) {
        const double xi = (c + x[q]) / r;
        lagrange_eval_all(op.quad, xi, phi.data());
        for (int k = 0; k < np; ++k) {
          for (int j = 0; j < np; ++j) {
            // quadrature node x[q] carries phi_j(x[q]) = delta_jq
            if (j == q) op.parent_avg[c][k * np + j] += w[q] * phi[k] / (r * w[k]);
          }
        }
      }
    }
  }

  return op;
}


void tensor_apply_axis(const double* M, int nrow, int ncol, int axis, int sz[3], int nv,
                       std::vector<double>& data) {
  const int s1 = sz[0], s2 = sz[1], s3 = sz[2];
  (void)s3;
  int osz[3] = {sz[0], sz[1], sz[2]};
  osz[axis] = nrow;
  std::vector<double> out(static_cast<size_t>(osz[0]) * osz[1] * osz[2] * nv, 0.0);
  for (int k = 0; k < osz[2]; ++k) {
    for (int j = 0; j < osz[1]; ++j) {
      for (int i = 0; i < osz[0]; ++i) {
        int oidx[3] = {i, j, k};
        double* dst =
            out.data() + (static_cast<size_t>(k) * osz[1] * osz[0] + static_cast<size_t>(j) * osz[0] + i) * nv;
        for (int c = 0; c < ncol; ++c) {
          int iidx[3] = {oidx[0], oidx[1], oidx[2]};
          iidx[axis] = c;
          const double m = M[oidx[axis] * ncol + c];
          if (m == 0.0) continue;
          const double* srcp =
              data.data() +
              (static_cast<size_t>(iidx[2]) * s2 * s1 + static_cast<size_t>(iidx[1]) * s1 + iidx[0]) * nv;
          for (int v = 0; v < nv; ++v) dst[v] += m * srcp[v];
        }
      }
    }
  }
  sz[0] = osz[0];
  sz[1] = osz[1];
  sz[2] = osz[2];
  data.swap(out);
}

const OperatorSet& operators(int N, int d, int Ns, int r) {
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int, int>, std::unique_ptr<OperatorSet>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_tuple(N, d, Ns, r);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<OperatorSet>(build_operators(N, d, Ns, r))).first;
  }
  return *it->second;
}

}  // namespace aderdg
