// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_FLOW_HPP
#define HDGMD_FLOW_HPP

#include "hdgmd/fem.hpp"
#include "hdgmd/linalg.hpp"
#include "hdgmd/model.hpp"

namespace hdgmd {

struct FlowSolution {
  double time = 0.0;
  CellField velocity;            // vector P_k
  CellField pressure;            // scalar P_k, mean zero
  FaceField pressure_trace;      // P_k per face
  CellField conforming_velocity; // RT_k; empty until reconstructed

  bool has_reconstruction() const { return !conforming_velocity.empty(); }
};

/// Hybridized solver for the Darcy step: condenses the (velocity,
/// pressure) pair onto the pressure trace, solves the facet system with
/// constant deflation, and post-processes an H(div)-conforming velocity.
class FlowSolver {
public:
  FlowSolver(const FeSpace& space, const PhysicalModel& model, const Discretization& disc);

  /// One Darcy solve with the lagged concentration; no reconstruction.
  FlowSolution solve(const CellField& c_prev, double t) const;

  /// Element-wise RT_k post-processing of an existing solution.
  void reconstruct(FlowSolution& solution) const;

  const FeSpace& space() const { return *space_; }
  const PhysicalModel& model() const { return *model_; }
  const Discretization& disc() const { return *disc_; }

  /// f_I - f_P (+ manufactured divergence forcing) at one time level.
  /// Any forcing is rebalanced by its quadrature mean so the discrete
  /// system stays compatible; the shift decays at the quadrature order.
  struct SourceSlice {
    const PhysicalModel* model;
    double t;
    double shift; // forcing mean
    double operator()(const Vec2& x) const {
      double f = model->f_inject(x, t) - model->f_produce(x, t);
      if (model->flow_forcing) f += model->flow_forcing(x, t) - shift;
      return f;
    }
  };
  SourceSlice source_slice(double t) const;

private:
  const FeSpace* space_;
  const PhysicalModel* model_;
  const Discretization* disc_;
  double domain_area_ = 0.0;
  CellField const_cell_;  // representation of the constant 1 per cell
  FaceField const_face_;  // representation of the constant 1 per face
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> rt_lu_; // RT DOF solves
};

/// Exact discrete energy balance of one flow solve:
/// (K^{-1} u, u) + ||sigma_u^{1/2}(p - p_hat)||^2 vs (source, p).
struct FlowEnergy {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect() const;
};
FlowEnergy flow_energy_identity(const FlowSolver& solver, const CellField& c_prev,
                                const FlowSolution& solution);

/// max over cells of || div U - pi_k(source) ||_{L2(E)}, plus the source
/// L2 norm for relative scaling.
struct DivergenceDefect {
  double max_defect = 0.0;
  double source_norm = 0.0;
};
DivergenceDefect flow_divergence_defect(const FeSpace& space, const FlowSolver& solver,
                                        const FlowSolution& solution);

/// max over interior faces of the L2 norm of the U.n jump.
double flow_normal_jump(const FeSpace& space, const FlowSolution& solution);

/// ||U - u|| / (h^{1/2} ||sigma_u^{1/2}(p - p_hat)||_{dE}).
double reconstruction_scaling_ratio(const FeSpace& space, const Discretization& disc,
                                    const FlowSolution& solution);

/// ||u|| + ||G_h(p, p_hat)|| + ||sigma_u^{1/2}(p - p_hat)||_{dE}.
double flow_stability_functional(const FeSpace& space, const Discretization& disc,
                                 const FlowSolution& solution);

} // namespace hdgmd

#endif
