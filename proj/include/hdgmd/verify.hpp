// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_VERIFY_HPP
#define HDGMD_VERIFY_HPP

#include "hdgmd/sim.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hdgmd {

// L2 errors against closed forms, integrated with a rule of exactness
// 2k+4 on each cell.
double l2_error_scalar(const FeSpace& space, const CellField& field,
                       const std::function<double(const Vec2&)>& exact);
double l2_error_vector(const FeSpace& space, const CellField& field,
                       const std::function<Vec2(const Vec2&)>& exact);
double l2_error_rt(const FeSpace& space, const CellField& field,
                   const std::function<Vec2(const Vec2&)>& exact);

/// One refinement level of a convergence study.
struct LevelErrors {
  int level = 0;
  double h = 0.0;
  int cells = 0;
  int trace_dofs = 0;
  double err_p = 0.0, err_u = 0.0, err_U = 0.0, err_c = 0.0, err_q = 0.0;
  double scaling_ratio = 0.0;     // ||U-u|| / (h^1/2 ||sigma^1/2(p-p_hat)||)
  double flow_stability_sup = 0.0;
  double poincare_ratio = 0.0;    // ||c|| / ||(c, c_hat)||_{1,h}
};

/// Fields measured in a study, in column order.
inline constexpr std::array<const char*, 5> kErrorFields = {"p", "u", "U", "c", "q"};

struct ErrorReport {
  std::vector<LevelErrors> levels;
  /// rates[i][f]: log2(err(level i-1) / err(level i)); row 0 is NaN.
  std::vector<std::array<double, 5>> rates;

  void compute_rates();
  /// Rates of the finest level pair.
  std::array<double, 5> finest_rates() const;
  bool rates_within(double target, double band) const;
};

/// Runs the manufactured scenario on `levels` uniformly refined meshes
/// with tau = min(tau_cap, h^{k+1}) and measures final-time errors.
ErrorReport convergence_study(int degree, int levels, bool reconstruct = true,
                              double final_time = 0.1, double tau_cap = 0.01,
                              const RunOptions& base_options = {});

/// Cumulative energy-inequality rows recomputed from stored states;
/// requires a trajectory that stored every step.
struct AuditRow {
  double time = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};
std::vector<AuditRow> energy_audit(const FeSpace& space, const PhysicalModel& model,
                                   const Discretization& disc, const Trajectory& trajectory);

/// Average concentration over a cell region for every stored state.
std::vector<std::pair<double, double>> breakthrough_curve(const FeSpace& space,
                                                          const Trajectory& trajectory,
                                                          const std::vector<int>& region);

/// Least-surprise rate estimate between two consecutive errors.
inline double observed_rate(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace hdgmd

#endif
