// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace hdgmd {

void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights) {
  points.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n over [-1,1], Chebyshev initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 1; j < n; ++j) {
        const double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    points[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

EdgeQuadratureRule edge_quadrature_rule(int exactness) {
  if (exactness < 0 || exactness > 63)
    throw InputError("edge_quadrature_rule: unsupported exactness " + std::to_string(exactness));
  EdgeQuadratureRule rule;
  const int n = (exactness + 2) / 2;
  gauss_legendre(n, rule.points, rule.weights);
  rule.exactness = 2 * n - 1;
  return rule;
}

QuadratureRule quadrature_rule(int exactness) {
  if (exactness < 0 || exactness > 30)
    throw InputError("quadrature_rule: unsupported exactness " + std::to_string(exactness));
  QuadratureRule rule;
  if (exactness <= 1) {
    rule.points = {Vec2(1.0 / 3.0, 1.0 / 3.0)};
    rule.weights = {0.5};
    rule.exactness = 1;
    return rule;
  }
  if (exactness == 2) {
    rule.points = {Vec2(1.0 / 6.0, 1.0 / 6.0), Vec2(2.0 / 3.0, 1.0 / 6.0), Vec2(1.0 / 6.0, 2.0 / 3.0)};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    rule.exactness = 2;
    return rule;
  }
  // Collapsed square: x = s, y = t(1-s) with Jacobian (1-s). A polynomial
  // of total degree m becomes degree m+1 in s and m in t.
  const int n = (exactness + 3) / 2;
  std::vector<double> gp, gw;
  gauss_legendre(n, gp, gw);
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = gp[i], t = gp[j];
      rule.points.emplace_back(s, t * (1.0 - s));
      rule.weights.push_back(gw[i] * gw[j] * (1.0 - s));
    }
  }
  rule.exactness = exactness;
  return rule;
}

} // namespace hdgmd
