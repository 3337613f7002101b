// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_FEM_HPP
#define HDGMD_FEM_HPP

#include "hdgmd/basis.hpp"
#include "hdgmd/fields.hpp"
#include "hdgmd/mesh.hpp"

#include <functional>
#include <vector>

namespace hdgmd {

/// Affine map x = origin + J x_ref of one cell; det J = 2 |E| > 0.
struct ElementGeometry {
  Mat2 jac;
  Mat2 jac_inv_t;
  double detjac = 0.0;
  Vec2 origin;
};

ElementGeometry element_geometry(const Mesh& mesh, int cell);

/// Piola transform of a reference vector value.
inline Vec2 piola(const ElementGeometry& g, const Vec2& ref_value) {
  return (g.jac * ref_value) / g.detjac;
}

/// Reference-element tables for degree k on a fixed mesh. The default
/// quadrature is exact to 2k+2 on cells and 2k+3 on faces; `quad_boost`
/// raises both. All tables are immutable after construction.
class FeSpace {
public:
  FeSpace(const Mesh& mesh, int degree, int quad_boost = 0);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int cell_dim() const { return cell_basis.size(); }   // dim P_k
  int vec_dim() const { return 2 * cell_basis.size(); } // dim (P_k)^2
  int face_dim() const { return degree_ + 1; }
  int rt_dim() const { return rt_basis.size(); }
  int num_trace_dofs() const { return mesh_->num_faces() * face_dim(); }

  CellBasis cell_basis;
  CellBasis sub_basis; // degree k-1, for the RT interior moments
  FaceBasis face_basis;
  RTBasis rt_basis;
  QuadratureRule volume_rule;
  EdgeQuadratureRule face_rule;

  // Reference tables at the volume rule points.
  std::vector<std::vector<double>> vol_values;  // [q][i]
  std::vector<std::vector<Vec2>> vol_gradients; // [q][i], reference gradients
  std::vector<std::vector<double>> sub_values;  // [q][i]
  std::vector<std::vector<Vec2>> rt_values;     // [q][i]
  std::vector<std::vector<double>> rt_divs;     // [q][i]

  // Cell-basis and RT traces at the face rule points of local edge le,
  // in forward (o=0) and reversed (o=1) traversal.
  std::vector<std::vector<double>> trace_values[3][2];
  std::vector<std::vector<Vec2>> rt_trace_values[3][2];

  // Face basis at the face rule points (reference edge).
  std::vector<std::vector<double>> face_values; // [q][j]

private:
  const Mesh* mesh_;
  int degree_;
};

/// Per-element evaluation data: physical quadrature points/weights,
/// physical basis values, gradients, RT values and traces.
class ElementContext {
public:
  ElementContext(const FeSpace& space, int cell);

  const FeSpace& space;
  int cell;
  ElementGeometry geom;

  int nq() const { return static_cast<int>(space.volume_rule.points.size()); }
  int nfq() const { return static_cast<int>(space.face_rule.points.size()); }

  Vec2 point(int q) const { return geom.origin + geom.jac * space.volume_rule.points[q]; }
  double weight(int q) const { return space.volume_rule.weights[q] * geom.detjac; }

  double value(int q, int i) const { return space.vol_values[q][i] * inv_sqrt_detjac; }
  double sub_value(int q, int i) const { return space.sub_values[q][i] * inv_sqrt_detjac; }
  const Vec2& gradient(int q, int i) const { return phys_gradients[q][i]; }
  const Vec2& rt_value(int q, int i) const { return phys_rt_values[q][i]; }
  double rt_div(int q, int i) const { return space.rt_divs[q][i] / geom.detjac; }

  int face_id(int lf) const { return space.mesh().cell_faces[cell][lf].face; }
  int normal_sign(int lf) const { return space.mesh().cell_faces[cell][lf].normal_sign; }
  Vec2 face_normal(int lf) const { return space.mesh().face_normals[face_id(lf)]; }
  double face_length(int lf) const { return space.mesh().face_lengths[face_id(lf)]; }
  /// Physical point at global face parameter s_q (same point for both
  /// adjacent cells).
  Vec2 face_point(int lf, int q) const;
  double face_weight(int lf, int q) const {
    return space.face_rule.weights[q] * face_length(lf);
  }
  /// Trace of the physical cell basis at face point q.
  double trace_value(int lf, int q, int i) const {
    return trace_tab(lf)[q][i] * inv_sqrt_detjac;
  }
  Vec2 rt_trace_value(int lf, int q, int i) const {
    return piola(geom, rt_trace_tab(lf)[q][i]);
  }
  /// Global face basis (orthonormal on the face) at face point q.
  double face_mu(int lf, int q, int j) const {
    return space.face_values[q][j] / sqrt_face_length[lf];
  }

  double inv_sqrt_detjac = 0.0;
  double sqrt_face_length[3] = {};
  std::vector<std::vector<Vec2>> phys_gradients;
  std::vector<std::vector<Vec2>> phys_rt_values;

private:
  const std::vector<std::vector<double>>& trace_tab(int lf) const;
  const std::vector<std::vector<Vec2>>& rt_trace_tab(int lf) const;
};

// Field evaluation on one element.
double eval_scalar(const ElementContext& ctx, std::span<const double> coeffs, int q);
Vec2 eval_vector(const ElementContext& ctx, std::span<const double> coeffs, int q);
Vec2 eval_rt(const ElementContext& ctx, std::span<const double> coeffs, int q);
double eval_scalar_trace(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q);
Vec2 eval_vector_trace(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q);
Vec2 eval_rt_trace(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q);
double eval_face(const ElementContext& ctx, std::span<const double> coeffs, int lf, int q);

/// Pointwise evaluation of discrete fields at arbitrary physical points.
double eval_scalar_at(const FeSpace& space, const CellField& field, int cell, const Vec2& x);
Vec2 eval_vector_at(const FeSpace& space, const CellField& field, int cell, const Vec2& x);
Vec2 eval_rt_at(const FeSpace& space, const CellField& field, int cell, const Vec2& x);

/// Elementwise L2 projection onto P_k (scalar) / (P_k)^2 (vector).
CellField project_cells(const FeSpace& space, const std::function<double(const Vec2&)>& f);
CellField project_cells_vector(const FeSpace& space, const std::function<Vec2(const Vec2&)>& f);
/// Facewise L2 projection onto the trace space.
FaceField project_faces(const FeSpace& space, const std::function<double(const Vec2&)>& f);

/// Discrete gradient lifting: the unique G in (P_k)^2 per cell with
/// (G, v)_E = (grad w, v)_E - <w - w_hat, v.n>_dE for all v.
CellField lift_gradient(const FeSpace& space, const CellField& w, const FaceField& w_hat);

/// Discrete H1-type norms of a (cell, trace) pair; `full` includes the
/// L2 term, `semi` does not.
struct Norm1h {
  double full = 0.0;
  double semi = 0.0;
};
Norm1h norm_1h(const FeSpace& space, const CellField& w, const FaceField& w_hat);

// L2 norms by the space's own quadrature.
double l2_norm_scalar(const FeSpace& space, const CellField& field);
double l2_norm_vector(const FeSpace& space, const CellField& field);
double l2_norm_rt(const FeSpace& space, const CellField& field);
/// sum_E ||w - w_hat||^2_{dE}, square-rooted.
double jump_norm(const FeSpace& space, const CellField& w, const FaceField& w_hat);

} // namespace hdgmd

#endif
