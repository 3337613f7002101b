// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/fem.hpp"

#include <cassert>
#include <cmath>

namespace hdgmd {

ElementGeometry element_geometry(const Mesh& mesh, int cell) {
  ElementGeometry g;
  const Vec2 p0 = mesh.vertex_of_cell(cell, 0);
  const Vec2 p1 = mesh.vertex_of_cell(cell, 1);
  const Vec2 p2 = mesh.vertex_of_cell(cell, 2);
  g.origin = p0;
  g.jac.col(0) = p1 - p0;
  g.jac.col(1) = p2 - p0;
  g.detjac = g.jac.determinant();
  g.jac_inv_t = g.jac.inverse().transpose();
  return g;
}

FeSpace::FeSpace(const Mesh& mesh, int degree, int quad_boost)
    : cell_basis(degree),
      sub_basis(degree - 1),
      face_basis(degree),
      rt_basis(degree),
      volume_rule(quadrature_rule(2 * degree + 2 + quad_boost)),
      face_rule(edge_quadrature_rule(2 * degree + 3 + quad_boost)),
      mesh_(&mesh),
      degree_(degree) {
  const int nq = static_cast<int>(volume_rule.points.size());
  vol_values.resize(nq);
  vol_gradients.resize(nq);
  sub_values.resize(nq);
  rt_values.resize(nq);
  rt_divs.resize(nq);
  for (int q = 0; q < nq; ++q) {
    cell_basis.eval(volume_rule.points[q], vol_values[q]);
    cell_basis.eval_gradients(volume_rule.points[q], vol_gradients[q]);
    sub_basis.eval(volume_rule.points[q], sub_values[q]);
    rt_basis.eval(volume_rule.points[q], rt_values[q], &rt_divs[q]);
  }

  const int nfq = static_cast<int>(face_rule.points.size());
  for (int le = 0; le < 3; ++le) {
    const ReferenceEdge& edge = reference_edges()[le];
    for (int o = 0; o < 2; ++o) {
      trace_values[le][o].resize(nfq);
      rt_trace_values[le][o].resize(nfq);
      for (int q = 0; q < nfq; ++q) {
        const double s = face_rule.points[q];
        const double r = (o == 0) ? s : 1.0 - s;
        const Vec2 p = edge.a + r * (edge.b - edge.a);
        cell_basis.eval(p, trace_values[le][o][q]);
        rt_basis.eval(p, rt_trace_values[le][o][q]);
      }
    }
  }

  face_values.resize(nfq);
  for (int q = 0; q < nfq; ++q) face_basis.eval(face_rule.points[q], face_values[q]);
}

ElementContext::ElementContext(const FeSpace& space_, int cell_)
    : space(space_), cell(cell_), geom(element_geometry(space_.mesh(), cell_)) {
  inv_sqrt_detjac = 1.0 / std::sqrt(geom.detjac);
  for (int lf = 0; lf < 3; ++lf) sqrt_face_length[lf] = std::sqrt(face_length(lf));
  const int nq = this->nq();
  const int nk = space.cell_dim();
  phys_gradients.resize(nq);
  phys_rt_values.resize(nq);
  for (int q = 0; q < nq; ++q) {
    phys_gradients[q].resize(nk);
    for (int i = 0; i < nk; ++i)
      phys_gradients[q][i] = geom.jac_inv_t * space.vol_gradients[q][i] * inv_sqrt_detjac;
    phys_rt_values[q].resize(space.rt_dim());
    for (int i = 0; i < space.rt_dim(); ++i)
      phys_rt_values[q][i] = piola(geom, space.rt_values[q][i]);
  }
}

Vec2 ElementContext::face_point(int lf, int q) const {
  const Mesh& mesh = space.mesh();
  const auto& f = mesh.faces[face_id(lf)];
  const double s = space.face_rule.points[q];
  return mesh.vertices[f[0]] + s * (mesh.vertices[f[1]] - mesh.vertices[f[0]]);
}

const std::vector<std::vector<double>>& ElementContext::trace_tab(int lf) const {
  const CellFace& cf = space.mesh().cell_faces[cell][lf];
  return space.trace_values[cf.local_edge][cf.forward ? 0 : 1];
}

const std::vector<std::vector<Vec2>>& ElementContext::rt_trace_tab(int lf) const {
  const CellFace& cf = space.mesh().cell_faces[cell][lf];
  return space.rt_trace_values[cf.local_edge][cf.forward ? 0 : 1];
}

double eval_scalar(const ElementContext& ctx, std::span<const double> coeffs, int q) {
  double v = 0.0;
  for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * ctx.value(q, static_cast<int>(i));
  return v;
}

Vec2 eval_vector(const ElementContext& ctx, std::span<const double> coeffs, int q) {
  Vec2 v = Vec2::Zero();
  const int nk = ctx.space.cell_dim();
  for (int i = 0; i < nk; ++i) {
    const double phi = ctx.value(q, i);
    v.x() += coeffs[2 * i] * phi;
    v.y() += coeffs[2 * i + 1] * phi;
  }
  return v;
}

Vec2 eval_rt(const ElementContext& ctx, std::span<const double> coeffs, int q) {
  Vec2 v = Vec2::Zero();
  for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * ctx.rt_value(q, static_cast<int>(i));
  return v;
}

double eval_scalar_trace(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q) {
  double v = 0.0;
  for (size_t i = 0; i < coeffs.size(); ++i)
    v += coeffs[i] * ctx.trace_value(lf, q, static_cast<int>(i));
  return v;
}

Vec2 eval_vector_trace(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q) {
  Vec2 v = Vec2::Zero();
  const int nk = ctx.space.cell_dim();
  for (int i = 0; i < nk; ++i) {
    const double phi = ctx.trace_value(lf, q, i);
    v.x() += coeffs[2 * i] * phi;
    v.y() += coeffs[2 * i + 1] * phi;
  }
  return v;
}

Vec2 eval_rt_trace(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q) {
  Vec2 v = Vec2::Zero();
  for (size_t i = 0; i < coeffs.size(); ++i)
    v += coeffs[i] * ctx.rt_trace_value(lf, q, static_cast<int>(i));
  return v;
}

double eval_face(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q) {
  double v = 0.0;
  for (size_t j = 0; j < coeffs.size(); ++j) v += coeffs[j] * ctx.face_mu(lf, q, static_cast<int>(j));
  return v;
}

namespace {

Vec2 pull_back(const ElementGeometry& g, const Vec2& x) { return g.jac.inverse() * (x - g.origin); }

} // namespace

double eval_scalar_at(const FeSpace& space, const CellField& field, int cell, const Vec2& x) {
  const ElementGeometry g = element_geometry(space.mesh(), cell);
  std::vector<double> vals;
  space.cell_basis.eval(pull_back(g, x), vals);
  double v = 0.0;
  const auto coeffs = field.cell(cell);
  for (size_t i = 0; i < vals.size(); ++i) v += coeffs[i] * vals[i];
  return v / std::sqrt(g.detjac);
}

Vec2 eval_vector_at(const FeSpace& space, const CellField& field, int cell, const Vec2& x) {
  const ElementGeometry g = element_geometry(space.mesh(), cell);
  std::vector<double> vals;
  space.cell_basis.eval(pull_back(g, x), vals);
  Vec2 v = Vec2::Zero();
  const auto coeffs = field.cell(cell);
  for (size_t i = 0; i < vals.size(); ++i) {
    v.x() += coeffs[2 * i] * vals[i];
    v.y() += coeffs[2 * i + 1] * vals[i];
  }
  return v / std::sqrt(g.detjac);
}

Vec2 eval_rt_at(const FeSpace& space, const CellField& field, int cell, const Vec2& x) {
  const ElementGeometry g = element_geometry(space.mesh(), cell);
  std::vector<Vec2> vals;
  space.rt_basis.eval(pull_back(g, x), vals);
  Vec2 v = Vec2::Zero();
  const auto coeffs = field.cell(cell);
  for (size_t i = 0; i < vals.size(); ++i) v += coeffs[i] * piola(g, vals[i]);
  return v;
}

namespace {

// Local mass matrix of the physical scalar basis (orthonormal up to
// quadrature error; assembled and solved anyway).
Eigen::MatrixXd cell_mass(const ElementContext& ctx) {
  const int nk = ctx.space.cell_dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nk, nk);
  for (int q = 0; q < ctx.nq(); ++q) {
    const double w = ctx.weight(q);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) += w * ctx.value(q, i) * ctx.value(q, j);
  }
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return m;
}

} // namespace

CellField project_cells(const FeSpace& space, const std::function<double(const Vec2&)>& f) {
  const int nk = space.cell_dim();
  CellField out(space.mesh().num_cells(), nk);
  parallel_for(space.mesh().num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk);
      for (int q = 0; q < ctx.nq(); ++q) {
        const double wf = ctx.weight(q) * f(ctx.point(q));
        for (int i = 0; i < nk; ++i) rhs[i] += wf * ctx.value(q, i);
      }
      Eigen::VectorXd coeffs = Eigen::PartialPivLU<Eigen::MatrixXd>(cell_mass(ctx)).solve(rhs);
      std::copy(coeffs.data(), coeffs.data() + nk, out.cell(e).begin());
    }
  });
  return out;
}

CellField project_cells_vector(const FeSpace& space, const std::function<Vec2(const Vec2&)>& f) {
  const int nk = space.cell_dim();
  CellField out(space.mesh().num_cells(), 2 * nk);
  parallel_for(space.mesh().num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, 2);
      for (int q = 0; q < ctx.nq(); ++q) {
        const Vec2 v = f(ctx.point(q));
        const double w = ctx.weight(q);
        for (int i = 0; i < nk; ++i) {
          rhs(i, 0) += w * v.x() * ctx.value(q, i);
          rhs(i, 1) += w * v.y() * ctx.value(q, i);
        }
      }
      Eigen::MatrixXd coeffs = Eigen::PartialPivLU<Eigen::MatrixXd>(cell_mass(ctx)).solve(rhs);
      auto dst = out.cell(e);
      for (int i = 0; i < nk; ++i) {
        dst[2 * i] = coeffs(i, 0);
        dst[2 * i + 1] = coeffs(i, 1);
      }
    }
  });
  return out;
}

FaceField project_faces(const FeSpace& space, const std::function<double(const Vec2&)>& f) {
  const Mesh& mesh = space.mesh();
  const int nf = space.face_dim();
  FaceField out(mesh.num_faces(), nf);
  parallel_for(mesh.num_faces(), [&](int begin, int end) {
    for (int face = begin; face < end; ++face) {
      const Vec2 a = mesh.vertices[mesh.faces[face][0]];
      const Vec2 b = mesh.vertices[mesh.faces[face][1]];
      const double len = mesh.face_lengths[face];
      Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nf, nf);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
      for (size_t q = 0; q < space.face_rule.points.size(); ++q) {
        const double s = space.face_rule.points[q];
        const double w = space.face_rule.weights[q] * len;
        const double fv = f(a + s * (b - a));
        for (int i = 0; i < nf; ++i) {
          const double mi = space.face_values[q][i] / std::sqrt(len);
          rhs[i] += w * fv * mi;
          for (int j = 0; j <= i; ++j)
            mass(i, j) += w * mi * space.face_values[q][j] / std::sqrt(len);
        }
      }
      mass.triangularView<Eigen::StrictlyUpper>() = mass.transpose();
      Eigen::VectorXd coeffs = Eigen::PartialPivLU<Eigen::MatrixXd>(mass).solve(rhs);
      std::copy(coeffs.data(), coeffs.data() + nf, out.face(face).begin());
    }
  });
  return out;
}

CellField lift_gradient(const FeSpace& space, const CellField& w, const FaceField& w_hat) {
  const int nk = space.cell_dim();
  CellField out(space.mesh().num_cells(), 2 * nk);
  parallel_for(space.mesh().num_cells(), [&](int begin, int end) {
    for (int e = begin; e < end; ++e) {
      ElementContext ctx(space, e);
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, 2);
      const auto wc = w.cell(e);
      for (int q = 0; q < ctx.nq(); ++q) {
        Vec2 grad = Vec2::Zero();
        for (int i = 0; i < nk; ++i) grad += wc[i] * ctx.gradient(q, i);
        const double wq = ctx.weight(q);
        for (int i = 0; i < nk; ++i) {
          rhs(i, 0) += wq * grad.x() * ctx.value(q, i);
          rhs(i, 1) += wq * grad.y() * ctx.value(q, i);
        }
      }
      for (int lf = 0; lf < 3; ++lf) {
        const Vec2 n = ctx.normal_sign(lf) * ctx.face_normal(lf);
        const auto hat = w_hat.face(ctx.face_id(lf));
        for (int q = 0; q < ctx.nfq(); ++q) {
          const double jumpv = eval_scalar_trace(ctx, wc, lf, q) - eval_face(ctx, hat, lf, q);
          const double wq = ctx.face_weight(lf, q) * jumpv;
          for (int i = 0; i < nk; ++i) {
            const double phi = ctx.trace_value(lf, q, i);
            rhs(i, 0) -= wq * phi * n.x();
            rhs(i, 1) -= wq * phi * n.y();
          }
        }
      }
      Eigen::MatrixXd coeffs = Eigen::PartialPivLU<Eigen::MatrixXd>(cell_mass(ctx)).solve(rhs);
      auto dst = out.cell(e);
      for (int i = 0; i < nk; ++i) {
        dst[2 * i] = coeffs(i, 0);
        dst[2 * i + 1] = coeffs(i, 1);
      }
    }
  });
  return out;
}

double l2_norm_scalar(const FeSpace& space, const CellField& field) {
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q) {
      const double v = eval_scalar(ctx, field.cell(e), q);
      sum += ctx.weight(q) * v * v;
    }
  }
  return std::sqrt(sum);
}

double l2_norm_vector(const FeSpace& space, const CellField& field) {
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q)
      sum += ctx.weight(q) * eval_vector(ctx, field.cell(e), q).squaredNorm();
  }
  return std::sqrt(sum);
}

double l2_norm_rt(const FeSpace& space, const CellField& field) {
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q)
      sum += ctx.weight(q) * eval_rt(ctx, field.cell(e), q).squaredNorm();
  }
  return std::sqrt(sum);
}

double jump_norm(const FeSpace& space, const CellField& w, const FaceField& w_hat) {
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int lf = 0; lf < 3; ++lf) {
      const auto hat = w_hat.face(ctx.face_id(lf));
      for (int q = 0; q < ctx.nfq(); ++q) {
        const double d = eval_scalar_trace(ctx, w.cell(e), lf, q) - eval_face(ctx, hat, lf, q);
        sum += ctx.face_weight(lf, q) * d * d;
      }
    }
  }
  return std::sqrt(sum);
}

Norm1h norm_1h(const FeSpace& space, const CellField& w, const FaceField& w_hat) {
  const CellField lifted = lift_gradient(space, w, w_hat);
  const double l2 = l2_norm_scalar(space, w);
  const double grad = l2_norm_vector(space, lifted);
  const double jump = jump_norm(space, w, w_hat);
  Norm1h n;
  n.semi = std::sqrt(grad * grad + jump * jump);
  n.full = std::sqrt(l2 * l2 + grad * grad + jump * jump);
  return n;
}

} // namespace hdgmd
