// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_TRANSPORT_HPP
#define HDGMD_TRANSPORT_HPP

#include "hdgmd/fem.hpp"
#include "hdgmd/linalg.hpp"
#include "hdgmd/model.hpp"

#include <utility>

namespace hdgmd {

/// Velocity fed into the transport step: either an H(div)-conforming RT
/// field (normal traces single-valued, taken from the owning cell) or a
/// raw cellwise polynomial field (each cell uses its own trace).
class VelocityInput {
public:
  static VelocityInput conforming(const CellField& rt_field) { return {&rt_field, nullptr}; }
  static VelocityInput raw(const CellField& cell_field) { return {nullptr, &cell_field}; }

  bool is_conforming() const { return rt_ != nullptr; }
  const CellField& field() const { return rt_ ? *rt_ : *raw_; }

  Vec2 eval(const ElementContext& ctx, int q) const {
    return rt_ ? eval_rt(ctx, rt_->cell(ctx.cell), q) : eval_vector(ctx, raw_->cell(ctx.cell), q);
  }
  Vec2 eval_trace(const ElementContext& ctx, int lf, int q) const {
    return rt_ ? eval_rt_trace(ctx, rt_->cell(ctx.cell), lf, q)
               : eval_vector_trace(ctx, raw_->cell(ctx.cell), lf, q);
  }

private:
  VelocityInput(const CellField* rt, const CellField* raw) : rt_(rt), raw_(raw) {}
  const CellField* rt_;
  const CellField* raw_;
};

/// Scalar energy bookkeeping of one transport step, accumulated with the
/// assembly quadrature.
struct TransportStepAudit {
  double conc_sq = 0.0;          // ||c||^2
  double mass_sq = 0.0;          // ||phi^1/2 c||^2
  double mass_sq_prev = 0.0;     // ||phi^1/2 c_prev||^2
  double time_deriv_sq = 0.0;    // ||phi^1/2 (c - c_prev)/tau||^2
  double dispersion_energy = 0.0;// (D(U) theta, theta)
  double injection_sq = 0.0;     // ||f_I^1/2 c||^2
  double production_sq = 0.0;    // ||f_P^1/2 c||^2
  double reaction = 0.0;         // ((f_I + f_P) c, c)
  double stabilization = 0.0;    // <(sigma_D + |U.n|)(c - c_hat), (c - c_hat)>
  double source_pairing = 0.0;   // (f_I cbar, c)
  double source_sq = 0.0;        // ||f_I^1/2 cbar||^2
  double skew_term = 0.0;        // -1/2 <U.n_E c_hat, c_hat> over all element faces
  double identity_defect = 0.0;  // residual of the exact per-step balance
  double min_face_weight = 0.0;  // min over face points of sigma_D + |U.n|
};

struct TransportSolution {
  double time = 0.0;
  CellField aux_gradient;   // vector P_k (equals -G_h(c, c_hat))
  CellField dispersive_flux;// vector P_k
  CellField concentration;  // scalar P_k
  FaceField concentration_trace;
  TransportStepAudit audit;
};

/// One backward Euler transport step, condensing (aux gradient, flux,
/// concentration) onto the concentration trace.
class TransportSolver {
public:
  TransportSolver(const FeSpace& space, const PhysicalModel& model, const Discretization& disc);

  TransportSolution step(const CellField& c_prev, const VelocityInput& velocity, double t) const;

  const FeSpace& space() const { return *space_; }

private:
  const FeSpace* space_;
  const PhysicalModel* model_;
  const Discretization* disc_;
};

/// c_h^0 and c_hat_h^0 as L2 projections of the initial concentration.
std::pair<CellField, FaceField> initialize_concentration(const FeSpace& space,
                                                         const PhysicalModel& model);

} // namespace hdgmd

#endif
