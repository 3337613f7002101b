// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_SCENARIO_HPP
#define HDGMD_SCENARIO_HPP

#include "hdgmd/mesh.hpp"
#include "hdgmd/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hdgmd {

/// Pointwise exact-solution data needed to manufacture transport data.
struct ExactPointData {
  double conc = 0.0;
  double conc_dt = 0.0;
  Vec2 conc_grad = Vec2::Zero();
  Mat2 conc_hess = Mat2::Zero();
  Vec2 velocity = Vec2::Zero();
  Mat2 velocity_jac = Mat2::Zero();
};

/// Injected concentration that makes the exact fields solve the
/// skew-symmetrized transport equation with data (f_I, f_P):
///   f_I cbar = phi c_t + div(q + u c / 2) + u.grad(c)/2 + (f_I+f_P) c/2
/// with q = -D(u) grad c; all derivatives supplied analytically.
double manufactured_injected_conc(const DispersionParams& dispersion, double phi, double f_inject,
                                  double f_produce, const ExactPointData& at);

/// Closed-form exact solution with hand-derived derivatives; used to
/// manufacture problem data and to measure errors.
class ManufacturedSolution {
public:
  virtual ~ManufacturedSolution() = default;

  virtual double pressure(const Vec2& x, double t) const = 0;
  virtual double concentration(const Vec2& x, double t) const = 0;
  virtual double concentration_dt(const Vec2& x, double t) const = 0;
  virtual Vec2 velocity(const Vec2& x, double t) const = 0;
  virtual Vec2 aux_gradient(const Vec2& x, double t) const = 0;    // -grad c
  virtual Vec2 dispersive_flux(const Vec2& x, double t) const = 0; // -D(u) grad c
  /// div u - (f_I - f_P); enters the mass-balance right-hand side.
  virtual double flow_forcing(const Vec2& x, double t) const = 0;
  /// Injected concentration that makes the exact fields solve the
  /// skew-symmetrized transport equation with f_I = f_P = 1.
  virtual double injected_conc(const Vec2& x, double t) const = 0;
};

/// Trigonometric pressure/concentration pair on the unit square with the
/// quarter-power mixing law; no-flux boundary conditions hold exactly.
class TrigSolution : public ManufacturedSolution {
public:
  TrigSolution(double kappa, double phi, const ViscosityLaw& viscosity,
               const DispersionParams& dispersion);

  double pressure(const Vec2& x, double t) const override;
  double concentration(const Vec2& x, double t) const override;
  double concentration_dt(const Vec2& x, double t) const override;
  Vec2 velocity(const Vec2& x, double t) const override;
  Vec2 aux_gradient(const Vec2& x, double t) const override;
  Vec2 dispersive_flux(const Vec2& x, double t) const override;
  double flow_forcing(const Vec2& x, double t) const override;
  double injected_conc(const Vec2& x, double t) const override;

  Vec2 pressure_grad(const Vec2& x) const;
  Vec2 conc_grad(const Vec2& x, double t) const;
  Mat2 velocity_jacobian(const Vec2& x, double t) const;
  double velocity_div(const Vec2& x, double t) const;

private:
  double mobility(double c) const { return 1.0 / viscosity_(c); } // 1/mu
  double mobility_dc(double c) const;

  double kappa_;
  double phi_;
  ViscosityLaw viscosity_;
  DispersionParams dispersion_;
};

struct MeshSpec {
  enum class Kind { UnitSquare, Lshape, File };
  Kind kind = Kind::UnitSquare;
  int cells_per_side = 1;  // unit square
  double well_size = 0.01; // lshape
  LshapeGrading grading;   // lshape
  std::string path;        // file
};

enum class WellPlacement {
  Figure, // injection top-right, production bottom-left
  Text    // injection bottom-left, production top-right
};

struct Scenario {
  std::string name;
  MeshSpec mesh_spec;
  int refine_level = 0;
  PhysicalModel model;
  Discretization disc;
  std::shared_ptr<const ManufacturedSolution> mms; // null for physical runs
  WellPlacement placement = WellPlacement::Figure;
  double well_size = 0.0; // 0 = no wells
  std::vector<double> snapshot_times;

  bool is_mms() const { return mms != nullptr; }
  Mesh build_mesh() const;
  /// Cells of the production well (empty when there are no wells).
  std::vector<int> production_cells(const Mesh& mesh) const;
};

/// Manufactured unit-square scenario (smooth solution, k+1 rates).
Scenario make_mms_square_scenario(int degree, int refine_level, double final_time = 0.1,
                                  double tau_cap = 0.01);

struct LshapeOptions {
  int degree = 2;
  double tau = 0.05;
  double final_time = 5.0;
  double well_size = 0.01;
  double well_rate = 180.0;
  LshapeGrading grading;
  WellPlacement placement = WellPlacement::Figure;
};
/// Two-material L-shaped quarter-five-spot scenario.
Scenario make_lshape_scenario(const LshapeOptions& options = {});

/// All-zero data on the unit square; every discrete field stays zero.
Scenario make_zero_scenario(int degree = 1, int refine_level = 1);

/// Checks the algebraic identities of a manufactured scenario (velocity
/// law, flux law, boundary conditions) at quadrature-like sample points.
/// Throws on failure.
void verify_manufactured(const Scenario& scenario);

} // namespace hdgmd

#endif
