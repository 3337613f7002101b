// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/scenario.hpp"

#include <cmath>
#include <numbers>

namespace hdgmd {

namespace {
constexpr double kPi = std::numbers::pi;
}

TrigSolution::TrigSolution(double kappa, double phi, const ViscosityLaw& viscosity,
                           const DispersionParams& dispersion)
    : kappa_(kappa), phi_(phi), viscosity_(viscosity), dispersion_(dispersion) {}

double TrigSolution::pressure(const Vec2& x, double) const {
  return -std::cos(kPi * x.x()) * std::cos(kPi * x.y());
}

Vec2 TrigSolution::pressure_grad(const Vec2& x) const {
  return {kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()),
          kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y())};
}

double TrigSolution::concentration(const Vec2& x, double t) const {
  const double s2 = std::sin(2.0 * kPi * x.x());
  const double c2 = std::cos(2.0 * kPi * x.y());
  return 0.5 * std::sin(0.5 * kPi * t) * (s2 * s2 + c2 * c2);
}

double TrigSolution::concentration_dt(const Vec2& x, double t) const {
  const double s2 = std::sin(2.0 * kPi * x.x());
  const double c2 = std::cos(2.0 * kPi * x.y());
  return 0.25 * kPi * std::cos(0.5 * kPi * t) * (s2 * s2 + c2 * c2);
}

Vec2 TrigSolution::conc_grad(const Vec2& x, double t) const {
  const double amp = 0.5 * std::sin(0.5 * kPi * t);
  return {amp * 2.0 * kPi * std::sin(4.0 * kPi * x.x()),
          -amp * 2.0 * kPi * std::sin(4.0 * kPi * x.y())};
}

double TrigSolution::mobility_dc(double c) const {
  const double r = viscosity_.exponent;
  const double ap = std::pow(viscosity_.mu_solvent, -r) - std::pow(viscosity_.mu_oil, -r);
  const double a = c * std::pow(viscosity_.mu_solvent, -r) +
                   (1.0 - c) * std::pow(viscosity_.mu_oil, -r);
  return (1.0 / r) * std::pow(a, 1.0 / r - 1.0) * ap;
}

Vec2 TrigSolution::velocity(const Vec2& x, double t) const {
  return -kappa_ * mobility(concentration(x, t)) * pressure_grad(x);
}

Mat2 TrigSolution::velocity_jacobian(const Vec2& x, double t) const {
  const double c = concentration(x, t);
  const Vec2 gc = conc_grad(x, t);
  const Vec2 gp = pressure_grad(x);
  Mat2 hess_p;
  const double cx = std::cos(kPi * x.x()), cy = std::cos(kPi * x.y());
  const double sx = std::sin(kPi * x.x()), sy = std::sin(kPi * x.y());
  hess_p(0, 0) = kPi * kPi * cx * cy;
  hess_p(0, 1) = -kPi * kPi * sx * sy;
  hess_p(1, 0) = hess_p(0, 1);
  hess_p(1, 1) = kPi * kPi * cx * cy;
  // u_i = -kappa lambda(c) dp_i  =>  du_i/dx_j
  Mat2 jac;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      jac(i, j) = -kappa_ * (mobility_dc(c) * gc[j] * gp[i] + mobility(c) * hess_p(i, j));
  return jac;
}

double TrigSolution::velocity_div(const Vec2& x, double t) const {
  return velocity_jacobian(x, t).trace();
}

Vec2 TrigSolution::aux_gradient(const Vec2& x, double t) const { return -conc_grad(x, t); }

Vec2 TrigSolution::dispersive_flux(const Vec2& x, double t) const {
  return -(dispersion(dispersion_, velocity(x, t)) * conc_grad(x, t));
}

double TrigSolution::flow_forcing(const Vec2& x, double t) const {
  return velocity_div(x, t); // f_I - f_P cancels (both are 1)
}

double manufactured_injected_conc(const DispersionParams& dispersion, double phi, double f_inject,
                                  double f_produce, const ExactPointData& at) {
  const double divu = at.velocity_jac.trace();
  const double lap_c = at.conc_hess.trace();
  const double norm = at.velocity.norm();
  double div_q;
  if (norm < 1e-12) {
    div_q = -dispersion.d0 * lap_c;
  } else {
    // q = -(d0 + a_t |u|) grad c - (a_l - a_t) (u . grad c) u / |u|
    const Vec2 grad_norm = at.velocity_jac.transpose() * at.velocity / norm;
    const double wdot = at.velocity.dot(at.conc_grad);
    const Vec2 grad_wdot = at.velocity_jac.transpose() * at.conc_grad + at.conc_hess * at.velocity;
    const double da = dispersion.alpha_l - dispersion.alpha_t;
    div_q = -dispersion.alpha_t * grad_norm.dot(at.conc_grad) -
            (dispersion.d0 + dispersion.alpha_t * norm) * lap_c -
            da * ((grad_wdot * norm - wdot * grad_norm).dot(at.velocity) / (norm * norm) +
                  (wdot / norm) * divu);
  }
  // div(q + u c / 2) + u.grad(c)/2 expands to div q + (div u) c/2 + u.grad c.
  const double rhs = phi * at.conc_dt + div_q + 0.5 * divu * at.conc +
                     at.velocity.dot(at.conc_grad) + 0.5 * (f_inject + f_produce) * at.conc;
  return rhs / f_inject;
}

double TrigSolution::injected_conc(const Vec2& x, double t) const {
  ExactPointData at;
  at.conc = concentration(x, t);
  at.conc_dt = concentration_dt(x, t);
  at.conc_grad = conc_grad(x, t);
  const double amp = 0.5 * std::sin(0.5 * kPi * t);
  at.conc_hess(0, 0) = amp * 8.0 * kPi * kPi * std::cos(4.0 * kPi * x.x());
  at.conc_hess(1, 1) = -amp * 8.0 * kPi * kPi * std::cos(4.0 * kPi * x.y());
  at.velocity = velocity(x, t);
  at.velocity_jac = velocity_jacobian(x, t);
  return manufactured_injected_conc(dispersion_, phi_, 1.0, 1.0, at);
}

Mesh Scenario::build_mesh() const {
  Mesh mesh;
  switch (mesh_spec.kind) {
    case MeshSpec::Kind::UnitSquare:
      mesh = generate_unit_square(mesh_spec.cells_per_side);
      break;
    case MeshSpec::Kind::Lshape:
      mesh = generate_lshape(mesh_spec.well_size, mesh_spec.grading);
      break;
    case MeshSpec::Kind::File:
      mesh = load_mesh(mesh_spec.path);
      break;
  }
  for (int l = 0; l < refine_level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

std::vector<int> Scenario::production_cells(const Mesh& mesh) const {
  if (well_size <= 0.0) return {};
  const double w = well_size;
  if (placement == WellPlacement::Figure)
    return cells_in_box(mesh, Vec2(0.0, 0.0), Vec2(w, w));
  return cells_in_box(mesh, Vec2(1.0 - w, 1.0 - w), Vec2(1.0, 1.0));
}

Scenario make_mms_square_scenario(int degree, int refine_level, double final_time, double tau_cap) {
  Scenario s;
  s.name = "mms-square";
  s.mesh_spec.kind = MeshSpec::Kind::UnitSquare;
  s.mesh_spec.cells_per_side = 1;
  s.refine_level = refine_level;

  const double kappa = 1.0;
  s.model.kappa_by_region[1] = kappa * Mat2::Identity();
  s.model.phi_by_region[1] = 0.2;
  s.model.viscosity = ViscosityLaw{1.0, 2.0, 0.25}; // mobility ratio 2
  s.model.dispersion = DispersionParams{1.0, 1.8e-5, 1.8e-6};

  auto exact = std::make_shared<TrigSolution>(kappa, 0.2, s.model.viscosity, s.model.dispersion);
  s.mms = exact;
  s.model.f_inject = [](const Vec2&, double) { return 1.0; };
  s.model.f_produce = [](const Vec2&, double) { return 1.0; };
  s.model.injected_conc = [exact](const Vec2& x, double t) { return exact->injected_conc(x, t); };
  s.model.initial_conc = [exact](const Vec2& x) { return exact->concentration(x, 0.0); };
  s.model.flow_forcing = [exact](const Vec2& x, double t) { return exact->flow_forcing(x, t); };

  s.disc.degree = degree;
  s.disc.sigma_u = 1.0;
  s.disc.final_time = final_time;
  const double h = std::sqrt(2.0) / (1 << refine_level);
  s.disc.tau = fit_time_step(std::min(tau_cap, std::pow(h, degree + 1)), final_time);
  s.snapshot_times = {final_time};
  return s;
}

Scenario make_lshape_scenario(const LshapeOptions& options) {
  Scenario s;
  s.name = "lshape";
  s.mesh_spec.kind = MeshSpec::Kind::Lshape;
  s.mesh_spec.well_size = options.well_size;
  s.mesh_spec.grading = options.grading;
  s.placement = options.placement;
  s.well_size = options.well_size;

  s.model.kappa_by_region[1] = Mat2::Identity();
  s.model.kappa_by_region[2] = 1e-6 * Mat2::Identity();
  s.model.phi_by_region[1] = 0.1;
  s.model.phi_by_region[2] = 0.1;
  s.model.viscosity = ViscosityLaw{1.0, 4.0, 0.25}; // mobility ratio 4
  s.model.dispersion = DispersionParams{1.8e-6, 1.8e-4, 1.8e-5};

  const double w = options.well_size;
  const double rate = options.well_rate;
  const bool figure = options.placement == WellPlacement::Figure;
  const Vec2 inj_lo = figure ? Vec2(1.0 - w, 1.0 - w) : Vec2(0.0, 0.0);
  const Vec2 prod_lo = figure ? Vec2(0.0, 0.0) : Vec2(1.0 - w, 1.0 - w);
  auto box_indicator = [w](Vec2 lo) {
    return [lo, w](const Vec2& x, double) {
      return (x.x() >= lo.x() && x.x() <= lo.x() + w && x.y() >= lo.y() && x.y() <= lo.y() + w)
                 ? 1.0
                 : 0.0;
    };
  };
  auto inj = box_indicator(inj_lo);
  auto prod = box_indicator(prod_lo);
  s.model.f_inject = [inj, rate](const Vec2& x, double t) { return rate * inj(x, t); };
  s.model.f_produce = [prod, rate](const Vec2& x, double t) { return rate * prod(x, t); };
  s.model.injected_conc = [](const Vec2&, double) { return 1.0; };
  s.model.initial_conc = [](const Vec2&) { return 0.0; };

  s.disc.degree = options.degree;
  s.disc.sigma_u = 1.0;
  s.disc.final_time = options.final_time;
  s.disc.tau = fit_time_step(options.tau, options.final_time);
  s.snapshot_times = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  return s;
}

Scenario make_zero_scenario(int degree, int refine_level) {
  Scenario s;
  s.name = "zero";
  s.mesh_spec.kind = MeshSpec::Kind::UnitSquare;
  s.mesh_spec.cells_per_side = 1;
  s.refine_level = refine_level;
  s.model.kappa_by_region[1] = Mat2::Identity();
  s.model.phi_by_region[1] = 0.2;
  s.model.viscosity = ViscosityLaw{1.0, 2.0, 0.25};
  s.model.dispersion = DispersionParams{1.0, 1.8e-5, 1.8e-6};
  s.model.f_inject = [](const Vec2&, double) { return 0.0; };
  s.model.f_produce = [](const Vec2&, double) { return 0.0; };
  s.model.injected_conc = [](const Vec2&, double) { return 0.0; };
  s.model.initial_conc = [](const Vec2&) { return 0.0; };
  s.disc.degree = degree;
  s.disc.tau = 0.01;
  s.disc.final_time = 0.05;
  s.snapshot_times = {0.05};
  return s;
}

void verify_manufactured(const Scenario& scenario) {
  if (!scenario.is_mms()) return;
  const ManufacturedSolution& ex = *scenario.mms;
  const auto& model = scenario.model;
  const Mat2 kappa = model.kappa(1);

  const double times[] = {0.0, 0.037, 0.1, scenario.disc.final_time};
  const double coords[] = {0.05, 0.31, 0.5, 0.77, 0.93};
  for (double t : times) {
    for (double xs : coords) {
      for (double ys : coords) {
        const Vec2 x(xs, ys);
        const double c = ex.concentration(x, t);
        // velocity law u = -(kappa/mu(c)) grad p
        const auto* trig = dynamic_cast<const TrigSolution*>(&ex);
        if (trig) {
          const Vec2 u_law = -(kappa / model.viscosity(c)) * trig->pressure_grad(x);
          if ((u_law - ex.velocity(x, t)).norm() > 1e-10 * (1.0 + u_law.norm()))
            throw Error("manufactured solution: velocity law violated");
          const Vec2 th = ex.aux_gradient(x, t);
          if ((th + trig->conc_grad(x, t)).norm() > 1e-12 * (1.0 + th.norm()))
            throw Error("manufactured solution: aux gradient is not -grad c");
          const Vec2 q_law = dispersion(model.dispersion, ex.velocity(x, t)) * th;
          if ((q_law - ex.dispersive_flux(x, t)).norm() > 1e-10 * (1.0 + q_law.norm()))
            throw Error("manufactured solution: flux law violated");
        }
      }
    }
    // no-flux boundary conditions
    for (double s : coords) {
      const Vec2 pts[] = {Vec2(s, 0.0), Vec2(s, 1.0), Vec2(0.0, s), Vec2(1.0, s)};
      const Vec2 normals[] = {Vec2(0, -1), Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0)};
      for (int b = 0; b < 4; ++b) {
        if (std::abs(ex.velocity(pts[b], t).dot(normals[b])) > 1e-10)
          throw Error("manufactured solution: u.n != 0 on the boundary");
        if (std::abs(ex.aux_gradient(pts[b], t).dot(normals[b])) > 1e-10)
          throw Error("manufactured solution: theta.n != 0 on the boundary");
      }
    }
  }
}

} // namespace hdgmd
