// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/verify.hpp"

#include <cmath>

namespace hdgmd {

namespace {

// Error quadrature: exactness 2k+4, basis evaluated per cell (the points
// are not in the space's tables).
struct ErrorRule {
  QuadratureRule rule;
  std::vector<std::vector<double>> values;    // [q][i] cell basis
  std::vector<std::vector<Vec2>> rt_values;   // [q][i]

  ErrorRule(const FeSpace& space) : rule(quadrature_rule(2 * space.degree() + 4)) {
    values.resize(rule.points.size());
    rt_values.resize(rule.points.size());
    for (size_t q = 0; q < rule.points.size(); ++q) {
      space.cell_basis.eval(rule.points[q], values[q]);
      space.rt_basis.eval(rule.points[q], rt_values[q]);
    }
  }
};

} // namespace

double l2_error_scalar(const FeSpace& space, const CellField& field,
                       const std::function<double(const Vec2&)>& exact) {
  const ErrorRule er(space);
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    const ElementGeometry g = element_geometry(space.mesh(), e);
    const auto coeffs = field.cell(e);
    for (size_t q = 0; q < er.rule.points.size(); ++q) {
      double v = 0.0;
      for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * er.values[q][i];
      v /= std::sqrt(g.detjac);
      const double d = v - exact(g.origin + g.jac * er.rule.points[q]);
      sum += er.rule.weights[q] * g.detjac * d * d;
    }
  }
  return std::sqrt(sum);
}

double l2_error_vector(const FeSpace& space, const CellField& field,
                       const std::function<Vec2(const Vec2&)>& exact) {
  const ErrorRule er(space);
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    const ElementGeometry g = element_geometry(space.mesh(), e);
    const auto coeffs = field.cell(e);
    const int nk = space.cell_dim();
    for (size_t q = 0; q < er.rule.points.size(); ++q) {
      Vec2 v = Vec2::Zero();
      for (int i = 0; i < nk; ++i) {
        v.x() += coeffs[2 * i] * er.values[q][i];
        v.y() += coeffs[2 * i + 1] * er.values[q][i];
      }
      v /= std::sqrt(g.detjac);
      const Vec2 d = v - exact(g.origin + g.jac * er.rule.points[q]);
      sum += er.rule.weights[q] * g.detjac * d.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

double l2_error_rt(const FeSpace& space, const CellField& field,
                   const std::function<Vec2(const Vec2&)>& exact) {
  const ErrorRule er(space);
  double sum = 0.0;
  for (int e = 0; e < space.mesh().num_cells(); ++e) {
    const ElementGeometry g = element_geometry(space.mesh(), e);
    const auto coeffs = field.cell(e);
    for (size_t q = 0; q < er.rule.points.size(); ++q) {
      Vec2 v = Vec2::Zero();
      for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * piola(g, er.rt_values[q][i]);
      const Vec2 d = v - exact(g.origin + g.jac * er.rule.points[q]);
      sum += er.rule.weights[q] * g.detjac * d.squaredNorm();
    }
  }
  return std::sqrt(sum);
}

void ErrorReport::compute_rates() {
  rates.assign(levels.size(), {std::nan(""), std::nan(""), std::nan(""), std::nan(""), std::nan("")});
  for (size_t l = 1; l < levels.size(); ++l) {
    const auto& a = levels[l - 1];
    const auto& b = levels[l];
    rates[l] = {observed_rate(a.err_p, b.err_p), observed_rate(a.err_u, b.err_u),
                observed_rate(a.err_U, b.err_U), observed_rate(a.err_c, b.err_c),
                observed_rate(a.err_q, b.err_q)};
  }
}

std::array<double, 5> ErrorReport::finest_rates() const {
  if (rates.size() < 2) throw Error("ErrorReport: rates need at least 2 levels");
  return rates.back();
}

bool ErrorReport::rates_within(double target, double band) const {
  for (double r : finest_rates())
    if (!(std::abs(r - target) <= band)) return false;
  return true;
}

ErrorReport convergence_study(int degree, int levels, bool reconstruct, double final_time,
                              double tau_cap, const RunOptions& base_options) {
  if (levels < 2) throw InputError("convergence_study: need at least 2 levels");
  ErrorReport report;
  for (int level = 0; level < levels; ++level) {
    Scenario scenario = make_mms_square_scenario(degree, level, final_time, tau_cap);
    RunOptions options = base_options;
    options.reconstruct = reconstruct;
    options.store_all_states = false;
    scenario.snapshot_times = {final_time};
    const Trajectory traj = reconstruct ? run(scenario, options)
                                        : run_without_reconstruction(scenario, options);
    if (traj.states.empty()) throw Error("convergence_study: no final state stored");
    const DiscreteState& state = traj.states.back();

    const Mesh mesh = scenario.build_mesh();
    FeSpace space(mesh, degree, scenario.disc.quad_boost);
    const ManufacturedSolution& ex = *scenario.mms;
    const double t = final_time;

    LevelErrors le;
    le.level = level;
    le.h = mesh.h_max;
    le.cells = mesh.num_cells();
    le.trace_dofs = space.num_trace_dofs();
    le.err_p =
        l2_error_scalar(space, state.pressure, [&](const Vec2& x) { return ex.pressure(x, t); });
    le.err_u =
        l2_error_vector(space, state.velocity, [&](const Vec2& x) { return ex.velocity(x, t); });
    le.err_U = reconstruct ? l2_error_rt(space, state.conforming_velocity,
                                         [&](const Vec2& x) { return ex.velocity(x, t); })
                           : le.err_u;
    le.err_c = l2_error_scalar(space, state.concentration,
                               [&](const Vec2& x) { return ex.concentration(x, t); });
    le.err_q = l2_error_vector(space, state.dispersive_flux,
                               [&](const Vec2& x) { return ex.dispersive_flux(x, t); });

    if (!traj.audits.empty()) {
      double sup = 0.0;
      for (const auto& a : traj.audits) sup = std::max(sup, a.flow_stability);
      le.flow_stability_sup = sup;
    }
    if (reconstruct) {
      FlowSolution fs;
      fs.time = state.time;
      fs.velocity = state.velocity;
      fs.pressure = state.pressure;
      fs.pressure_trace = state.pressure_trace;
      fs.conforming_velocity = state.conforming_velocity;
      le.scaling_ratio = reconstruction_scaling_ratio(space, scenario.disc, fs);
    }
    {
      const Norm1h n = norm_1h(space, state.concentration, state.concentration_trace);
      const double cl2 = l2_norm_scalar(space, state.concentration);
      le.poincare_ratio = n.full > 0.0 ? cl2 / n.full : 0.0;
    }
    report.levels.push_back(le);
  }
  report.compute_rates();
  return report;
}

std::vector<AuditRow> energy_audit(const FeSpace& space, const PhysicalModel& model,
                                   const Discretization& disc, const Trajectory& trajectory) {
  if (trajectory.states.size() < 2)
    throw Error("energy_audit: trajectory must store consecutive states");
  const Mesh& mesh = space.mesh();
  const double tau = disc.tau;
  const double phi0 = model.phi_min();
  const double phi1 = model.phi_max();

  double c0_sq = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q) {
      const double v = model.initial_conc(ctx.point(q));
      c0_sq += ctx.weight(q) * v * v;
    }
  }

  std::vector<AuditRow> rows;
  double lhs_running = 0.0, rhs_running = 0.0;
  for (size_t s = 1; s < trajectory.states.size(); ++s) {
    const DiscreteState& cur = trajectory.states[s];
    const DiscreteState& prev = trajectory.states[s - 1];
    const double t = cur.time;
    if (std::abs((cur.time - prev.time) - tau) > 1e-9 * std::max(1.0, tau))
      throw Error("energy_audit: stored states are not consecutive steps");

    double conc_sq = 0.0, prod = 0.0, src = 0.0, td = 0.0, disp = 0.0, stab = 0.0;
    const bool conforming = !cur.conforming_velocity.empty();
    for (int e = 0; e < mesh.num_cells(); ++e) {
      ElementContext ctx(space, e);
      const double phi = model.porosity(mesh.region_tags[e]);
      for (int q = 0; q < ctx.nq(); ++q) {
        const double w = ctx.weight(q);
        const Vec2 x = ctx.point(q);
        const double cv = eval_scalar(ctx, cur.concentration.cell(e), q);
        const double cp = eval_scalar(ctx, prev.concentration.cell(e), q);
        const Vec2 th = eval_vector(ctx, cur.aux_gradient.cell(e), q);
        const Vec2 uval = conforming ? eval_rt(ctx, cur.conforming_velocity.cell(e), q)
                                     : eval_vector(ctx, cur.velocity.cell(e), q);
        conc_sq += w * cv * cv;
        prod += w * model.f_produce(x, t) * cv * cv;
        const double cbar = model.injected_conc(x, t);
        src += w * model.f_inject(x, t) * cbar * cbar;
        const double dc = (cv - cp) / tau;
        td += w * phi * dc * dc;
        disp += w * th.dot(dispersion(model.dispersion, uval) * th);
      }
      for (int lf = 0; lf < 3; ++lf) {
        const int f = ctx.face_id(lf);
        const int owner = mesh.face_cells[f][0];
        const auto chat = cur.concentration_trace.face(f);
        // sigma_D and |U.n| from the owning cell, as assembled.
        ElementContext octx(space, owner);
        int olf = 0;
        while (octx.face_id(olf) != f) ++olf;
        const Vec2 n = mesh.face_normals[f];
        for (int q = 0; q < ctx.nfq(); ++q) {
          Vec2 uface;
          if (conforming)
            uface = eval_rt_trace(octx, cur.conforming_velocity.cell(owner), olf, q);
          else
            uface = eval_vector_trace(ctx, cur.velocity.cell(e), lf, q);
          const double sig = dispersion_normal(model.dispersion, uface, n);
          const double aun = std::abs(uface.dot(n));
          const double d =
              eval_scalar_trace(ctx, cur.concentration.cell(e), lf, q) - eval_face(ctx, chat, lf, q);
          stab += ctx.face_weight(lf, q) * (sig + aun) * d * d;
        }
      }
    }
    lhs_running += tau * (prod + stab + tau * td + disp);
    rhs_running += tau * src;
    AuditRow row;
    row.time = t;
    row.lhs = phi0 * conc_sq + lhs_running;
    row.rhs = phi1 * c0_sq + rhs_running;
    row.slack = row.rhs - row.lhs;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<double, double>> breakthrough_curve(const FeSpace& space,
                                                          const Trajectory& trajectory,
                                                          const std::vector<int>& region) {
  std::vector<std::pair<double, double>> series;
  for (const DiscreteState& state : trajectory.states)
    series.emplace_back(state.time, region_average(space, state.concentration, region));
  return series;
}

} // namespace hdgmd
