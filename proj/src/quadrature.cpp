//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aderdg {

namespace {

// Legendre polynomial P_n and its derivative at x in [-1,1], by the three-term
// recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = p0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

Quadrature1D gauss_legendre(int n) {
  if (n < 1 || n > 16) {
    throw std::invalid_argument("gauss_legendre: point count must be in [1,16], got " +
                                std::to_string(n));
  }
  Quadrature1D q;
  q.n = n;
  q.nodes.resize(n);
  q.weights.resize(n);

  // Newton iteration on P_n, starting from Chebyshev-like guesses. Symmetry of the
  // node set is enforced explicitly afterwards.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = 0.5 * (1.0 + x);
    q.weights[i] = 0.5 * w;
    q.nodes[n - 1 - i] = 0.5 * (1.0 - x);
    q.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) {
    q.nodes[n / 2] = 0.5;
    double p, dp;
    legendre(n, 0.0, p, dp);
    q.weights[n / 2] = 1.0 / (dp * dp);
  }

  q.bary.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) q.bary[i] /= (q.nodes[i] - q.nodes[j]);
    }
  }
  return q;
}

double lagrange_eval(const Quadrature1D& q, int k, double x) {
  if (k < 0 || k >= q.n) {
    throw std::invalid_argument("lagrange_eval: node index out of range");
  }
  double v = 1.0;
  for (int j = 0; j < q.n; ++j) {
    if (j != k) v *= (x - q.nodes[j]) / (q.nodes[k] - q.nodes[j]);
  }
  return v;
}

void lagrange_eval_all(const Quadrature1D& q, double x, double* out) {
  // Exact cardinality when x coincides with a node.
  for (int j = 0; j < q.n; ++j) {
    if (x == q.nodes[j]) {
      for (int k = 0; k < q.n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
  }
  for (int k = 0; k < q.n; ++k) {
    double v = 1.0;
    for (int j = 0; j < q.n; ++j) {
      if (j != k) v *= (x - q.nodes[j]) / (q.nodes[k] - q.nodes[j]);
    }
    out[k] = v;
  }
}

}  // namespace aderdg
