// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/basis.hpp"

#include <cassert>
#include <cmath>

namespace hdgmd {

void jacobi_all(int n, double alpha, double beta, double x, std::vector<double>& values) {
  values.resize(n + 1);
  if (n < 0) return;
  values[0] = 1.0;
  if (n == 0) return;
  values[1] = (alpha + 1.0) + (alpha + beta + 2.0) * (x - 1.0) / 2.0;
  for (int m = 2; m <= n; ++m) {
    const double a = alpha, b = beta;
    const double c1 = 2.0 * m * (m + a + b) * (2.0 * m + a + b - 2.0);
    const double c2 = (2.0 * m + a + b - 1.0) *
                      ((2.0 * m + a + b) * (2.0 * m + a + b - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * (2.0 * m + a + b);
    values[m] = (c2 * values[m - 1] - c3 * values[m - 2]) / c1;
  }
}

namespace {

// Scaled Legendre factors f_i(x,y) = (1-y)^i P_i((2x+y-1)/(1-y)) and their
// partial derivatives; polynomial recurrences, no division by (1-y).
void scaled_legendre(int n, double x, double y, std::vector<double>& f,
                     std::vector<double>* fx = nullptr, std::vector<double>* fy = nullptr) {
  f.resize(n + 1);
  if (fx) fx->resize(n + 1);
  if (fy) fy->resize(n + 1);
  if (n < 0) return;
  const double u = 2.0 * x + y - 1.0;
  const double v = 1.0 - y;
  f[0] = 1.0;
  if (fx) (*fx)[0] = 0.0;
  if (fy) (*fy)[0] = 0.0;
  if (n == 0) return;
  f[1] = u;
  if (fx) (*fx)[1] = 2.0;
  if (fy) (*fy)[1] = 1.0;
  for (int i = 1; i < n; ++i) {
    f[i + 1] = ((2.0 * i + 1.0) * u * f[i] - i * v * v * f[i - 1]) / (i + 1.0);
    if (fx)
      (*fx)[i + 1] =
          ((2.0 * i + 1.0) * (2.0 * f[i] + u * (*fx)[i]) - i * v * v * (*fx)[i - 1]) / (i + 1.0);
    if (fy)
      (*fy)[i + 1] = ((2.0 * i + 1.0) * (f[i] + u * (*fy)[i]) -
                      i * (-2.0 * v * f[i - 1] + v * v * (*fy)[i - 1])) /
                     (i + 1.0);
  }
}

} // namespace

CellBasis::CellBasis(int degree) : degree_(degree) {
  size_ = degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2;
  scale_.assign(size_, 1.0);
  if (size_ == 0) return;
  const QuadratureRule rule = quadrature_rule(std::max(2 * degree, 1));
  std::vector<double> norms(size_, 0.0), vals;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    eval(rule.points[q], vals);
    for (int m = 0; m < size_; ++m) norms[m] += rule.weights[q] * vals[m] * vals[m];
  }
  for (int m = 0; m < size_; ++m) scale_[m] = 1.0 / std::sqrt(norms[m]);
}

void CellBasis::eval(const Vec2& p, std::vector<double>& values) const {
  values.resize(size_);
  if (size_ == 0) return;
  std::vector<double> f;
  scaled_legendre(degree_, p.x(), p.y(), f);
  const double b = 2.0 * p.y() - 1.0;
  int m = 0;
  std::vector<double> jac;
  for (int d = 0; d <= degree_; ++d) {
    for (int i = 0; i <= d; ++i) {
      const int j = d - i;
      jacobi_all(j, 2.0 * i + 1.0, 0.0, b, jac);
      values[m] = scale_[m] * f[i] * jac[j];
      ++m;
    }
  }
}

void CellBasis::eval_gradients(const Vec2& p, std::vector<Vec2>& gradients) const {
  gradients.resize(size_);
  if (size_ == 0) return;
  std::vector<double> f, fx, fy;
  scaled_legendre(degree_, p.x(), p.y(), f, &fx, &fy);
  const double b = 2.0 * p.y() - 1.0;
  int m = 0;
  std::vector<double> jac, djac;
  for (int d = 0; d <= degree_; ++d) {
    for (int i = 0; i <= d; ++i) {
      const int j = d - i;
      jacobi_all(j, 2.0 * i + 1.0, 0.0, b, jac);
      double dg = 0.0;
      if (j > 0) {
        jacobi_all(j - 1, 2.0 * i + 2.0, 1.0, b, djac);
        dg = 0.5 * (j + 2.0 * i + 2.0) * djac[j - 1];
      }
      gradients[m].x() = scale_[m] * fx[i] * jac[j];
      gradients[m].y() = scale_[m] * (fy[i] * jac[j] + f[i] * 2.0 * dg);
      ++m;
    }
  }
}

FaceBasis::FaceBasis(int degree) : degree_(degree) {
  scale_.resize(degree + 1);
  for (int j = 0; j <= degree; ++j) scale_[j] = std::sqrt(2.0 * j + 1.0);
}

void FaceBasis::eval(double s, std::vector<double>& values) const {
  jacobi_all(degree_, 0.0, 0.0, 2.0 * s - 1.0, values);
  for (int j = 0; j <= degree_; ++j) values[j] *= scale_[j];
}

const std::array<ReferenceEdge, 3>& reference_edges() {
  static const std::array<ReferenceEdge, 3> edges = {
      ReferenceEdge{Vec2(0, 0), Vec2(1, 0), Vec2(0, -1), 1.0},
      ReferenceEdge{Vec2(1, 0), Vec2(0, 1), Vec2(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)),
                    std::sqrt(2.0)},
      ReferenceEdge{Vec2(0, 1), Vec2(0, 0), Vec2(-1, 0), 1.0}};
  return edges;
}

RTBasis::RTBasis(int degree)
    : degree_(degree), size_((degree + 1) * (degree + 3)), scalar_(degree), interior_(degree - 1) {
  if (degree < 0) throw InputError("RTBasis: degree must be >= 0");
  const int ngen = size_;
  Eigen::MatrixXd dof_matrix(ngen, ngen);

  const FaceBasis edge_basis(degree_);
  const EdgeQuadratureRule edge_rule = edge_quadrature_rule(2 * degree_ + 1);
  std::vector<Vec2> gen_vals;
  std::vector<double> mu;

  int row = 0;
  for (int le = 0; le < 3; ++le) {
    const ReferenceEdge& edge = reference_edges()[le];
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(degree_ + 1, ngen);
    for (size_t q = 0; q < edge_rule.points.size(); ++q) {
      const double s = edge_rule.points[q];
      const Vec2 p = edge.a + s * (edge.b - edge.a);
      eval_generators(p, gen_vals, nullptr);
      edge_basis.eval(s, mu);
      const double w = edge_rule.weights[q] * edge.length;
      for (int j = 0; j <= degree_; ++j) {
        // orthonormal w.r.t. arc length: mu_j / sqrt(length)
        const double m = mu[j] / std::sqrt(edge.length);
        for (int g = 0; g < ngen; ++g)
          moments(j, g) += w * (gen_vals[g].dot(edge.normal)) * m;
      }
    }
    dof_matrix.middleRows(row, degree_ + 1) = moments;
    row += degree_ + 1;
  }

  if (interior_.size() > 0) {
    const QuadratureRule volume_rule = quadrature_rule(std::max(2 * degree_, 1));
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(2 * interior_.size(), ngen);
    std::vector<double> wvals;
    for (size_t q = 0; q < volume_rule.points.size(); ++q) {
      eval_generators(volume_rule.points[q], gen_vals, nullptr);
      interior_.eval(volume_rule.points[q], wvals);
      const double w = volume_rule.weights[q];
      for (int m = 0; m < interior_.size(); ++m) {
        for (int g = 0; g < ngen; ++g) {
          moments(2 * m, g) += w * gen_vals[g].x() * wvals[m];
          moments(2 * m + 1, g) += w * gen_vals[g].y() * wvals[m];
        }
      }
    }
    dof_matrix.middleRows(row, 2 * interior_.size()) = moments;
    row += 2 * interior_.size();
  }
  assert(row == ngen);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(dof_matrix);
  dual_coeffs_ = lu.solve(Eigen::MatrixXd::Identity(ngen, ngen));
  const double defect = (dof_matrix * dual_coeffs_ - Eigen::MatrixXd::Identity(ngen, ngen)).norm();
  if (!(defect < 1e-8)) throw Error("RTBasis: degree-of-freedom matrix is not unisolvent");
}

void RTBasis::eval_generators(const Vec2& p, std::vector<Vec2>& vals, std::vector<double>* divs) const {
  const int nk = scalar_.size();
  vals.resize(size_);
  if (divs) divs->resize(size_);
  std::vector<double> sv;
  scalar_.eval(p, sv);
  std::vector<Vec2> sg;
  if (divs) scalar_.eval_gradients(p, sg);
  for (int m = 0; m < nk; ++m) {
    vals[2 * m] = Vec2(sv[m], 0.0);
    vals[2 * m + 1] = Vec2(0.0, sv[m]);
    if (divs) {
      (*divs)[2 * m] = sg[m].x();
      (*divs)[2 * m + 1] = sg[m].y();
    }
  }
  // Tails x * m_i with m_i the degree-k homogeneous monomials.
  for (int i = 0; i <= degree_; ++i) {
    const double mono = std::pow(p.x(), degree_ - i) * std::pow(p.y(), i);
    vals[2 * nk + i] = mono * p;
    if (divs) (*divs)[2 * nk + i] = (degree_ + 2.0) * mono;
  }
}

void RTBasis::eval(const Vec2& p, std::vector<Vec2>& values, std::vector<double>* divergences) const {
  std::vector<Vec2> gen_vals;
  std::vector<double> gen_divs;
  eval_generators(p, gen_vals, divergences ? &gen_divs : nullptr);
  values.assign(size_, Vec2::Zero());
  if (divergences) divergences->assign(size_, 0.0);
  for (int b = 0; b < size_; ++b) {
    for (int g = 0; g < size_; ++g) {
      const double c = dual_coeffs_(g, b);
      if (c == 0.0) continue;
      values[b] += c * gen_vals[g];
      if (divergences) (*divergences)[b] += c * gen_divs[g];
    }
  }
}

} // namespace hdgmd
