//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================
//! \file test_quadrature.cpp
//  \brief Gauss-Legendre node/weight construction and Lagrange basis properties.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "aderdg/quadrature.hpp"
#include "doctest.h"

using namespace aderdg;

TEST_CASE("midpoint rule for n=1") {
  const auto q = gauss_legendre(1);
  CHECK(q.nodes[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(q.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("closed-form nodes for n=2") {
  const auto q = gauss_legendre(2);
  const double off = 1.0 / (2.0 * std::sqrt(3.0));
  CHECK(q.nodes[0] == doctest::Approx(0.5 - off).epsilon(1e-14));
  CHECK(q.nodes[1] == doctest::Approx(0.5 + off).epsilon(1e-14));
  CHECK(q.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(q.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("n=3 integrates x^5 exactly") {
  const auto q = gauss_legendre(3);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += q.weights[i] * std::pow(q.nodes[i], 5);
  CHECK(std::abs(s - 1.0 / 6.0) < 1e-14);
}

TEST_CASE("exactness for monomials up to degree 2n-1") {
  for (int n = 1; n <= 8; ++n) {
    const auto q = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
      const double exact = 1.0 / (k + 1);
      CHECK(std::abs(s - exact) / exact < 1e-13);
    }
  }
}

TEST_CASE("node/weight invariants") {
  for (int n = 1; n <= 16; ++n) {
    const auto q = gauss_legendre(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(q.nodes[i] > 0.0);
      CHECK(q.nodes[i] < 1.0);
      CHECK(q.weights[i] > 0.0);
      if (i > 0) CHECK(q.nodes[i] > q.nodes[i - 1]);
      wsum += q.weights[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("rejects n outside [1,16]") {
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(17), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(-3), std::invalid_argument);
}

TEST_CASE("cardinality at the nodes") {
  const auto q = gauss_legendre(2);
  CHECK(lagrange_eval(q, 0, q.nodes[0]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(lagrange_eval(q, 0, q.nodes[1])) < 1e-14);
}

TEST_CASE("partition of unity at random points") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int n : {3, 5, 8}) {
    const auto q = gauss_legendre(n);
    for (int trial = 0; trial < 50; ++trial) {
      const double x = dist(rng);
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += lagrange_eval(q, k, x);
      CHECK(std::abs(s - 1.0) < 1e-13);
      // cardinality against the vectorized evaluator
      double all[16];
      lagrange_eval_all(q, x, all);
      for (int k = 0; k < n; ++k) CHECK(all[k] == doctest::Approx(lagrange_eval(q, k, x)));
    }
  }
}

TEST_CASE("out-of-range basis index rejected") {
  const auto q = gauss_legendre(3);
  CHECK_THROWS_AS(lagrange_eval(q, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(lagrange_eval(q, -1, 0.5), std::invalid_argument);
}
