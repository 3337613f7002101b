// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_SIM_HPP
#define HDGMD_SIM_HPP

#include "hdgmd/fields.hpp"
#include "hdgmd/flow.hpp"
#include "hdgmd/scenario.hpp"
#include "hdgmd/transport.hpp"

#include <limits>
#include <string>
#include <vector>

namespace hdgmd {

/// Per-step audit record: discrete identities, stability bookkeeping and
/// the running energy inequality of the transport scheme.
struct StepAudit {
  int step = 0;
  double time = 0.0;
  double flow_energy_defect = 0.0; // relative defect of the flow balance
  double div_defect = 0.0;         // max elementwise ||div U - pi(source)||
  double div_scale = 0.0;          // 1 + ||source||
  double normal_jump = 0.0;        // max face L2 jump of U.n
  double velocity_norm = 0.0;      // ||U|| (or ||u|| without reconstruction)
  double flow_stability = 0.0;     // ||u|| + ||G_h(p,p_hat)|| + stabilization
  double theta_lift_defect = 0.0;  // ||theta + G_h(c, c_hat)||
  double theta_norm = 0.0;
  double transport_identity_defect = 0.0;
  double energy_lhs = 0.0; // cumulative inequality left side
  double energy_rhs = 0.0; // cumulative inequality right side
  double slack = 0.0;      // rhs - lhs
  double skew_term = 0.0;
  int overshoot_cells = 0;
  int undershoot_cells = 0;
  double breakthrough = 0.0; // production-well average concentration
};

struct Trajectory {
  std::vector<double> times;         // stored state times (t = 0 included)
  std::vector<DiscreteState> states; // stored on the snapshot schedule
  std::vector<StepAudit> audits;     // one per completed step
  double initial_breakthrough = 0.0; // production-well average of c_h^0
  int steps_completed = 0;
  bool failed = false;
  double failure_time = std::numeric_limits<double>::quiet_NaN();
  std::string failure_reason;
};

struct RunOptions {
  bool reconstruct = true;
  enum class AuditMode { Off, Record, Enforce };
  AuditMode audit = AuditMode::Record;
  bool store_all_states = false; // override the snapshot schedule
  bool self_test = true;         // manufactured-solution identity checks
  int quad_boost = 0;
};

/// Coupled backward Euler loop: flow solve with the lagged concentration,
/// H(div) reconstruction, then the transport step.
Trajectory run(const Scenario& scenario, const RunOptions& options = {});

/// Same loop with the raw velocity fed to transport. Solver failures are
/// reported in the trajectory instead of thrown.
Trajectory run_without_reconstruction(const Scenario& scenario, const RunOptions& options = {});

/// Count of cells whose concentration exceeds 1.001 (over) or falls below
/// -0.001 (under) at the quadrature points or vertices.
struct OvershootCount {
  int over = 0;
  int under = 0;
  std::vector<unsigned char> flags; // per cell: 1 over, 2 under, 3 both
};
OvershootCount overshoot_map(const FeSpace& space, const CellField& concentration);

/// Average of the concentration over a cell set (the production well).
double region_average(const FeSpace& space, const CellField& concentration,
                      const std::vector<int>& cells);

} // namespace hdgmd

#endif
