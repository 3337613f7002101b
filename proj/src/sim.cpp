// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/sim.hpp"

#include <cmath>

namespace hdgmd {

namespace {

struct EnergyTally {
  double lhs_running = 0.0; // tau-weighted sums on the left side
  double rhs_running = 0.0; // tau-weighted sums on the right side
  double initial_mass = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
};

Trajectory run_loop(const Scenario& scenario, const RunOptions& options, bool reconstruct) {
  scenario.model.validate();
  scenario.disc.validate(scenario.is_mms());
  if (options.self_test) verify_manufactured(scenario);

  const Mesh mesh = scenario.build_mesh();
  Discretization disc = scenario.disc;
  disc.quad_boost = std::max(disc.quad_boost, options.quad_boost);
  FeSpace space(mesh, disc.degree, disc.quad_boost);
  const FlowSolver flow_solver(space, scenario.model, disc);
  const TransportSolver transport_solver(space, scenario.model, disc);
  const std::vector<int> production = scenario.production_cells(mesh);

  const int nsteps = disc.num_steps();
  const double tau = disc.tau;
  const bool audits_on = options.audit != RunOptions::AuditMode::Off;

  Trajectory traj;
  auto [c, c_hat] = initialize_concentration(space, scenario.model);
  traj.initial_breakthrough = region_average(space, c, production);

  EnergyTally tally;
  tally.phi_min = scenario.model.phi_min();
  tally.phi_max = scenario.model.phi_max();
  {
    // ||c_0||^2 with the assembly quadrature (projection stability keeps
    // the inequality exact at the discrete level).
    double c0_sq = 0.0;
    for (int e = 0; e < mesh.num_cells(); ++e) {
      ElementContext ctx(space, e);
      for (int q = 0; q < ctx.nq(); ++q) {
        const double v = scenario.model.initial_conc(ctx.point(q));
        c0_sq += ctx.weight(q) * v * v;
      }
    }
    tally.initial_mass = c0_sq;
  }

  auto store_state = [&](double t, const FlowSolution* fs, const TransportSolution* ts) {
    DiscreteState state;
    state.time = t;
    if (fs) {
      state.velocity = fs->velocity;
      state.pressure = fs->pressure;
      state.pressure_trace = fs->pressure_trace;
      state.conforming_velocity = fs->conforming_velocity;
    }
    if (ts) {
      state.aux_gradient = ts->aux_gradient;
      state.dispersive_flux = ts->dispersive_flux;
      state.concentration = ts->concentration;
      state.concentration_trace = ts->concentration_trace;
    } else {
      state.concentration = c;
      state.concentration_trace = c_hat;
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(state));
  };

  auto scheduled = [&](double t) {
    if (options.store_all_states) return true;
    for (double s : scenario.snapshot_times)
      if (std::abs(t - s) < 0.5 * tau) return true;
    return false;
  };

  if (scheduled(0.0)) store_state(0.0, nullptr, nullptr);

  for (int step = 1; step <= nsteps; ++step) {
    const double t = step * tau;
    FlowSolution fs;
    TransportSolution ts;
    try {
      fs = flow_solver.solve(c, t);
      if (reconstruct) flow_solver.reconstruct(fs);
      const VelocityInput velocity = reconstruct
                                         ? VelocityInput::conforming(fs.conforming_velocity)
                                         : VelocityInput::raw(fs.velocity);
      ts = transport_solver.step(c, velocity, t);
    } catch (const SolverError& err) {
      if (!reconstruct) {
        traj.failed = true;
        traj.failure_time = t;
        traj.failure_reason = err.what();
        return traj;
      }
      throw SolverError("step " + std::to_string(step) + " (t = " + std::to_string(t) +
                        "): " + err.what());
    }

    StepAudit audit;
    audit.step = step;
    audit.time = t;
    audit.breakthrough = production.empty()
                             ? region_average(space, ts.concentration, {})
                             : region_average(space, ts.concentration, production);

    if (audits_on) {
      const FlowEnergy fe = flow_energy_identity(flow_solver, c, fs);
      audit.flow_energy_defect = fe.defect();
      audit.flow_stability = flow_stability_functional(space, disc, fs);
      if (reconstruct) {
        const DivergenceDefect dd = flow_divergence_defect(space, flow_solver, fs);
        audit.div_defect = dd.max_defect;
        audit.div_scale = 1.0 + dd.source_norm;
        audit.normal_jump = flow_normal_jump(space, fs);
        audit.velocity_norm = l2_norm_rt(space, fs.conforming_velocity);
      } else {
        audit.velocity_norm = l2_norm_vector(space, fs.velocity);
      }

      // theta = -G_h(c, c_hat)
      const CellField lifted = lift_gradient(space, ts.concentration, ts.concentration_trace);
      double defect_sq = 0.0;
      for (int e = 0; e < mesh.num_cells(); ++e) {
        ElementContext ctx(space, e);
        for (int q = 0; q < ctx.nq(); ++q) {
          const Vec2 d =
              eval_vector(ctx, ts.aux_gradient.cell(e), q) + eval_vector(ctx, lifted.cell(e), q);
          defect_sq += ctx.weight(q) * d.squaredNorm();
        }
      }
      audit.theta_lift_defect = std::sqrt(defect_sq);
      audit.theta_norm = l2_norm_vector(space, ts.aux_gradient);
      audit.transport_identity_defect = ts.audit.identity_defect;
      audit.skew_term = ts.audit.skew_term;

      // Cumulative energy inequality. The concentration term carries the
      // production weight: the per-step balance pairs the injection term
      // against the source exactly, so only the f_P part survives the
      // absorption; the remaining coefficients follow the proven bound.
      tally.lhs_running += tau * (ts.audit.production_sq + ts.audit.stabilization +
                                  tau * ts.audit.time_deriv_sq + ts.audit.dispersion_energy);
      tally.rhs_running += tau * ts.audit.source_sq;
      audit.energy_lhs = tally.phi_min * ts.audit.conc_sq + tally.lhs_running;
      audit.energy_rhs = tally.phi_max * tally.initial_mass + tally.rhs_running;
      audit.slack = audit.energy_rhs - audit.energy_lhs;

      const OvershootCount oc = overshoot_map(space, ts.concentration);
      audit.overshoot_cells = oc.over;
      audit.undershoot_cells = oc.under;

      if (options.audit == RunOptions::AuditMode::Enforce &&
          audit.slack < -1e-8 * std::max(audit.energy_rhs, 1e-30))
        throw AuditError("energy inequality violated at step " + std::to_string(step) +
                         " (slack " + std::to_string(audit.slack) + ")");
    }
    traj.audits.push_back(audit);

    c = ts.concentration;
    c_hat = ts.concentration_trace;
    traj.steps_completed = step;
    if (scheduled(t)) store_state(t, &fs, &ts);
  }
  return traj;
}

} // namespace

Trajectory run(const Scenario& scenario, const RunOptions& options) {
  return run_loop(scenario, options, options.reconstruct);
}

Trajectory run_without_reconstruction(const Scenario& scenario, const RunOptions& options) {
  return run_loop(scenario, options, false);
}

OvershootCount overshoot_map(const FeSpace& space, const CellField& concentration) {
  OvershootCount out;
  const Mesh& mesh = space.mesh();
  out.flags.assign(mesh.num_cells(), 0);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (int q = 0; q < ctx.nq(); ++q) {
      const double v = eval_scalar(ctx, concentration.cell(e), q);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (int v = 0; v < 3; ++v) {
      const double val = eval_scalar_at(space, concentration, e, mesh.vertex_of_cell(e, v));
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    if (hi > 1.001) {
      out.flags[e] |= 1;
      ++out.over;
    }
    if (lo < -0.001) {
      out.flags[e] |= 2;
      ++out.under;
    }
  }
  return out;
}

double region_average(const FeSpace& space, const CellField& concentration,
                      const std::vector<int>& cells) {
  double integral = 0.0, area = 0.0;
  auto accumulate = [&](int e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q) {
      integral += ctx.weight(q) * eval_scalar(ctx, concentration.cell(e), q);
      area += ctx.weight(q);
    }
  };
  if (cells.empty()) {
    for (int e = 0; e < space.mesh().num_cells(); ++e) accumulate(e);
  } else {
    for (int e : cells) accumulate(e);
  }
  if (area <= 0.0) throw Error("region_average: empty region");
  return integral / area;
}

} // namespace hdgmd
