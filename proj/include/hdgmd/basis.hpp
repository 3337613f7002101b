// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_BASIS_HPP
#define HDGMD_BASIS_HPP

#include "hdgmd/quadrature.hpp"

#include <array>
#include <vector>

namespace hdgmd {

/// Jacobi polynomials P_0..P_n at x (alpha, beta > -1).
void jacobi_all(int n, double alpha, double beta, double x, std::vector<double>& values);

/// L2-orthonormal scalar basis of P_k on the reference triangle
/// (Dubiner-type, built from Jacobi polynomials; the first function is
/// the constant).
class CellBasis {
public:
  explicit CellBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return size_; }

  /// values[i] = phi_i(p)
  void eval(const Vec2& p, std::vector<double>& values) const;
  /// gradients[i] = grad phi_i(p)
  void eval_gradients(const Vec2& p, std::vector<Vec2>& gradients) const;

private:
  int degree_;
  int size_;
  std::vector<double> scale_; // orthonormalization factors
};

/// L2-orthonormal basis of P_k on the reference edge [0,1]
/// (scaled Legendre; first function is the constant).
class FaceBasis {
public:
  explicit FaceBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }

  void eval(double s, std::vector<double>& values) const;

private:
  int degree_;
  std::vector<double> scale_;
};

/// Raviart-Thomas basis of degree k on the reference triangle, dual to
/// the DOFs: normal moments against the orthonormal edge basis on each
/// of the three edges (in local traversal direction, outward normal),
/// then interior moments against the orthonormal vector P_{k-1} basis.
class RTBasis {
public:
  explicit RTBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return size_; }
  int num_interior_dofs() const { return size_ - 3 * (degree_ + 1); }

  /// values[i] = R_i(p), divergences[i] = div R_i(p)
  void eval(const Vec2& p, std::vector<Vec2>& values, std::vector<double>* divergences = nullptr) const;

private:
  void eval_generators(const Vec2& p, std::vector<Vec2>& vals, std::vector<double>* divs) const;

  int degree_;
  int size_;
  CellBasis scalar_;   // degree k, for the vector part
  CellBasis interior_; // degree k-1, for the interior moments
  Eigen::MatrixXd dual_coeffs_; // column b: generator coefficients of R_b
};

/// Reference-edge endpoints and outward normals of the local edges.
struct ReferenceEdge {
  Vec2 a, b;
  Vec2 normal;
  double length;
};
const std::array<ReferenceEdge, 3>& reference_edges();

} // namespace hdgmd

#endif
