// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdgmd/flow.hpp"
#include "hdgmd/scenario.hpp"
#include "hdgmd/verify.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace hdgmd;

namespace {

PhysicalModel simple_model(double mobility = 2.0) {
  PhysicalModel model;
  model.kappa_by_region[1] = Mat2::Identity();
  model.phi_by_region[1] = 0.2;
  model.viscosity = ViscosityLaw{1.0, mobility, 0.25};
  model.dispersion = DispersionParams{1.0, 1.8e-5, 1.8e-6};
  model.f_inject = [](const Vec2&, double) { return 0.0; };
  model.f_produce = [](const Vec2&, double) { return 0.0; };
  model.injected_conc = [](const Vec2&, double) { return 0.0; };
  model.initial_conc = [](const Vec2&) { return 0.0; };
  return model;
}

Mesh one_cell_mesh() {
  Mesh mesh;
  mesh.vertices = {Vec2(0.05, 0.1), Vec2(0.85, 0.3), Vec2(0.35, 0.9)};
  mesh.cells = {{0, 1, 2}};
  mesh.finalize();
  return mesh;
}

CellField random_field(const FeSpace& space, int dim, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  CellField field(space.mesh().num_cells(), dim);
  for (auto& v : field.data) v = dist(rng);
  return field;
}

} // namespace

TEST_CASE("viscosity: endpoints, mid-value oracle, mobility ratio") {
  const ViscosityLaw mu{1.0, 2.0, 0.25};
  CHECK(mu(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu(0.0) == doctest::Approx(2.0).epsilon(1e-15));

  // extended-precision evaluation of (0.5 + 0.5 * 2^(-1/4))^(-4)
  const long double mix = 0.5L + 0.5L * std::pow(2.0L, -0.25L);
  const long double expect = std::pow(mix, -4.0L);
  CHECK(mu(0.5) == doctest::Approx(static_cast<double>(expect)).epsilon(1e-15));

  CHECK(mu.mobility_ratio() == doctest::Approx(2.0));
  CHECK(mu(0.0) / mu(1.0) == doctest::Approx(2.0).epsilon(1e-15));

  // clamped outside [0,1]
  CHECK(mu(-0.3) == mu(0.0));
  CHECK(mu(1.7) == mu(1.0));
}

TEST_CASE("zero sources give the zero solution") {
  const Mesh mesh = generate_unit_square(2);
  const FeSpace space(mesh, 1);
  const PhysicalModel model = simple_model();
  Discretization disc;
  disc.degree = 1;
  const FlowSolver solver(space, model, disc);
  CellField c_prev = random_field(space, space.cell_dim(), 99, 0.3);
  FlowSolution sol = solver.solve(c_prev, 0.0);
  CHECK(l2_norm_vector(space, sol.velocity) < 1e-12);
  CHECK(l2_norm_scalar(space, sol.pressure) < 1e-12);
  solver.reconstruct(sol);
  CHECK(l2_norm_rt(space, sol.conforming_velocity) < 1e-12);
}

TEST_CASE("condensed solve equals the dense monolithic oracle") {
  for (int ncells : {1, 2}) {
    Mesh mesh = ncells == 1 ? one_cell_mesh() : generate_unit_square(1);
    for (int k : {1, 2}) {
      const FeSpace space(mesh, k);
      PhysicalModel model = simple_model();
      // f with zero mean over the domain: x - mean(x).
      double mean_x = 0.0, area = 0.0;
      for (int e = 0; e < mesh.num_cells(); ++e) {
        ElementContext ctx(space, e);
        for (int q = 0; q < ctx.nq(); ++q) {
          mean_x += ctx.weight(q) * ctx.point(q).x();
          area += ctx.weight(q);
        }
      }
      mean_x /= area;
      model.f_inject = [mean_x](const Vec2& x, double) { return std::max(x.x() - mean_x, 0.0); };
      model.f_produce = [mean_x](const Vec2& x, double) { return std::max(mean_x - x.x(), 0.0); };
      Discretization disc;
      disc.degree = k;
      const FlowSolver solver(space, model, disc);
      const CellField c_prev = random_field(space, space.cell_dim(), 7 * k + ncells, 0.4);

      const FlowSolution condensed = solver.solve(c_prev, 0.0);
      const FlowSolution dense = oracles::solve_darcy_dense(space, model, disc, c_prev, 0.0);

      const double scale = l2_norm_vector(space, dense.velocity) +
                           l2_norm_scalar(space, dense.pressure) + 1e-30;
      double diff = 0.0;
      for (size_t i = 0; i < condensed.velocity.data.size(); ++i)
        diff = std::max(diff, std::abs(condensed.velocity.data[i] - dense.velocity.data[i]));
      for (size_t i = 0; i < condensed.pressure.data.size(); ++i)
        diff = std::max(diff, std::abs(condensed.pressure.data[i] - dense.pressure.data[i]));
      for (size_t i = 0; i < condensed.pressure_trace.data.size(); ++i)
        diff = std::max(diff,
                        std::abs(condensed.pressure_trace.data[i] - dense.pressure_trace.data[i]));
      CHECK(diff / scale < 1e-10);
    }
  }
}

TEST_CASE("reconstruction reproduces polynomial velocities when p = p_hat") {
  // With matching traces the RT DOFs of U coincide with those of u.
  const Mesh mesh = generate_unit_square(2);
  const int k = 2;
  const FeSpace space(mesh, k);
  const PhysicalModel model = simple_model();
  Discretization disc;
  disc.degree = k;
  const FlowSolver solver(space, model, disc);

  auto ufn = [](const Vec2& x) { return Vec2(1.0 + x.y() - 0.3 * x.x() * x.x(), 2.0 * x.x()); };
  FlowSolution sol;
  sol.time = 0.0;
  sol.velocity = project_cells_vector(space, ufn);
  sol.pressure = CellField(mesh.num_cells(), space.cell_dim());
  sol.pressure_trace = FaceField(mesh.num_faces(), space.face_dim());
  solver.reconstruct(sol);
  const double err = l2_error_rt(space, sol.conforming_velocity, ufn);
  CHECK(err < 1e-11);
}

TEST_CASE("manufactured flow: divergence identity, conformity, energy, lifting identity") {
  const Scenario scenario = make_mms_square_scenario(2, 2);
  const Mesh mesh = scenario.build_mesh();
  const FeSpace space(mesh, 2);
  const FlowSolver solver(space, scenario.model, scenario.disc);
  const double t = 0.06;
  const CellField c_prev =
      project_cells(space, [&](const Vec2& x) { return scenario.mms->concentration(x, t); });

  FlowSolution sol = solver.solve(c_prev, t);
  solver.reconstruct(sol);

  const DivergenceDefect dd = flow_divergence_defect(space, solver, sol);
  CHECK(dd.max_defect <= 1e-9 * (1.0 + dd.source_norm));

  CHECK(flow_normal_jump(space, sol) <= 1e-9 * l2_norm_rt(space, sol.conforming_velocity));

  const FlowEnergy fe = flow_energy_identity(solver, c_prev, sol);
  CHECK(fe.defect() < 1e-8);

  // (G_h(p, p_hat), v) = -(K^{-1}(c_prev) u, v) for every test function,
  // with the assembly quadrature.
  const CellField lifted = lift_gradient(space, sol.pressure, sol.pressure_trace);
  double max_moment_defect = 0.0, scale_sq = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    const int nk = space.cell_dim();
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(2 * nk);
    for (int q = 0; q < ctx.nq(); ++q) {
      const Mat2 kinv =
          scenario.model.resistivity(mesh.region_tags[e], eval_scalar(ctx, c_prev.cell(e), q));
      const Vec2 ku = kinv * eval_vector(ctx, sol.velocity.cell(e), q);
      const Vec2 lv = eval_vector(ctx, lifted.cell(e), q);
      const Vec2 sum = lv + ku;
      for (int i = 0; i < nk; ++i) {
        const double phi = ctx.value(q, i);
        moments[2 * i] += ctx.weight(q) * sum.x() * phi;
        moments[2 * i + 1] += ctx.weight(q) * sum.y() * phi;
      }
      scale_sq += ctx.weight(q) * ku.squaredNorm();
    }
    max_moment_defect = std::max(max_moment_defect, moments.cwiseAbs().maxCoeff());
  }
  CHECK(max_moment_defect < 1e-9 * (1.0 + std::sqrt(scale_sq)));
}

TEST_CASE("solution map is linear in the sources") {
  const Mesh mesh = generate_unit_square(2);
  const int k = 1;
  const FeSpace space(mesh, k);
  Discretization disc;
  disc.degree = k;
  PhysicalModel model = simple_model();
  model.f_inject = [](const Vec2& x, double) { return x.x() < 0.5 ? 1.0 : 0.0; };
  model.f_produce = [](const Vec2& x, double) { return x.x() < 0.5 ? 0.0 : 1.0; };
  const CellField c_prev = random_field(space, space.cell_dim(), 31, 0.2);

  const FlowSolver solver(space, model, disc);
  const FlowSolution base = solver.solve(c_prev, 0.0);

  PhysicalModel scaled = model;
  const double s = 3.5;
  scaled.f_inject = [&model, s](const Vec2& x, double t) { return s * model.f_inject(x, t); };
  scaled.f_produce = [&model, s](const Vec2& x, double t) { return s * model.f_produce(x, t); };
  const FlowSolver scaled_solver(space, scaled, disc);
  const FlowSolution scaled_sol = scaled_solver.solve(c_prev, 0.0);

  double diff = 0.0;
  for (size_t i = 0; i < base.velocity.data.size(); ++i)
    diff = std::max(diff, std::abs(scaled_sol.velocity.data[i] - s * base.velocity.data[i]));
  for (size_t i = 0; i < base.pressure.data.size(); ++i)
    diff = std::max(diff, std::abs(scaled_sol.pressure.data[i] - s * base.pressure.data[i]));
  CHECK(diff < 1e-10 * s * (1.0 + l2_norm_vector(space, base.velocity)));
}

TEST_CASE("incompatible sources are rejected") {
  const Mesh mesh = generate_unit_square(1);
  const FeSpace space(mesh, 1);
  PhysicalModel model = simple_model();
  model.f_inject = [](const Vec2&, double) { return 1.0; }; // net injection
  Discretization disc;
  disc.degree = 1;
  const FlowSolver solver(space, model, disc);
  const CellField c_prev(mesh.num_cells(), space.cell_dim());
  CHECK_THROWS_WITH_AS(solver.solve(c_prev, 0.0), doctest::Contains("incompatible"), SolverError);
}

TEST_CASE("pressure mean is zero and the trace shift is joint") {
  const Scenario scenario = make_mms_square_scenario(1, 2);
  const Mesh mesh = scenario.build_mesh();
  const FeSpace space(mesh, 1);
  const FlowSolver solver(space, scenario.model, scenario.disc);
  const CellField c_prev = project_cells(space, [&](const Vec2& x) {
    return scenario.mms->concentration(x, 0.05);
  });
  FlowSolution sol = solver.solve(c_prev, 0.05);

  double mean = 0.0;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    ElementContext ctx(space, e);
    for (int q = 0; q < ctx.nq(); ++q)
      mean += ctx.weight(q) * eval_scalar(ctx, sol.pressure.cell(e), q);
  }
  CHECK(std::abs(mean) < 1e-10 * (1.0 + l2_norm_scalar(space, sol.pressure)));

  // After the joint shift the energy identity still holds (it involves
  // p - p_hat and (f, p) with a mean-zero-compatible source).
  const FlowEnergy fe = flow_energy_identity(solver, c_prev, sol);
  CHECK(fe.defect() < 1e-8);
}

TEST_CASE("flow stability functional stays bounded under refinement") {
  std::vector<double> values;
  for (int level = 0; level < 3; ++level) {
    const Scenario scenario = make_mms_square_scenario(1, level);
    const Mesh mesh = scenario.build_mesh();
    const FeSpace space(mesh, 1);
    const FlowSolver solver(space, scenario.model, scenario.disc);
    const CellField c_prev =
        project_cells(space, [&](const Vec2& x) { return scenario.mms->concentration(x, 0.1); });
    const FlowSolution sol = solver.solve(c_prev, 0.1);
    values.push_back(flow_stability_functional(space, scenario.disc, sol));
  }
  const double vmax = *std::max_element(values.begin(), values.end());
  const double vmin = *std::min_element(values.begin(), values.end());
  CHECK(vmax / vmin < 3.0);
}
