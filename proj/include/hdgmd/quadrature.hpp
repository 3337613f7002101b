// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_QUADRATURE_HPP
#define HDGMD_QUADRATURE_HPP

#include "hdgmd/common.hpp"

#include <vector>

namespace hdgmd {

/// Positive-weight rule on the reference triangle {x,y >= 0, x+y <= 1}.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights; // sum to 1/2
  int exactness = 0;
};

/// Gauss-Legendre rule on [0,1].
struct EdgeQuadratureRule {
  std::vector<double> points;
  std::vector<double> weights; // sum to 1
  int exactness = 0;
};

/// Triangle rule exact for all polynomials of total degree <= exactness.
/// Degree <= 1 returns the centroid rule; higher degrees use a collapsed
/// tensor-product construction. Throws for exactness > 30.
QuadratureRule quadrature_rule(int exactness);

EdgeQuadratureRule edge_quadrature_rule(int exactness);

/// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre(int n, std::vector<double>& points, std::vector<double>& weights);

} // namespace hdgmd

#endif
