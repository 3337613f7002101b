// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_MODEL_HPP
#define HDGMD_MODEL_HPP

#include "hdgmd/common.hpp"

#include <map>

namespace hdgmd {

/// Quarter-power mixing law mu(c) = (c mu_s^-r + (1-c) mu_o^-r)^(-1/r).
/// The concentration is clamped to [0,1] before evaluation (fractional
/// powers are undefined below 0 and the scheme has no maximum principle).
struct ViscosityLaw {
  double mu_solvent = 1.0;
  double mu_oil = 1.0;
  double exponent = 0.25;

  double operator()(double c) const;
  double mobility_ratio() const { return mu_oil / mu_solvent; }
};

struct DispersionParams {
  double d0 = 1.0;
  double alpha_l = 0.0;
  double alpha_t = 0.0;
};

/// D(u) = d0 I + |u| (alpha_l E(u) + alpha_t (I - E(u))), E = u u^T/|u|^2.
/// The |u| -> 0 limit d0 I is used below 1e-14.
Mat2 dispersion(const DispersionParams& params, const Vec2& u);

/// n^T D(u) n for a unit normal n.
double dispersion_normal(const DispersionParams& params, const Vec2& u, const Vec2& n);

/// Coefficients and data of the coupled problem. Permeability and
/// porosity are constant per region tag; sources are time slices.
struct PhysicalModel {
  std::map<int, Mat2> kappa_by_region;   // symmetric positive definite
  std::map<int, double> phi_by_region;   // porosity
  ViscosityLaw viscosity;
  DispersionParams dispersion;

  SpaceTimeFn f_inject;      // f_I >= 0
  SpaceTimeFn f_produce;     // f_P >= 0, same integral as f_I
  SpaceTimeFn injected_conc; // \bar c
  SpaceFn initial_conc;      // c_0
  SpaceTimeFn flow_forcing;  // optional extra divergence source (manufactured runs)

  double phi_min() const;
  double phi_max() const;
  const Mat2& kappa(int region) const;
  double porosity(int region) const;
  /// kappa(x)/mu(c) applied through its inverse: mu(c) kappa^{-1}.
  Mat2 resistivity(int region, double c) const;

  void validate() const;
};

/// Discretization parameters shared by the flow and transport solvers.
struct Discretization {
  int degree = 1;       // k >= 1 (k = 0 only for manufactured runs)
  double sigma_u = 1.0; // flow stabilization, positive constant
  double tau = 0.01;    // uniform time step; N tau = T
  double final_time = 0.1;

  enum class SigmaDConvention { Owner, Max };
  struct FluxOptions {
    SigmaDConvention sigma_d = SigmaDConvention::Owner;
  };
  FluxOptions flux;
  int quad_boost = 0;

  int num_steps() const;
  void validate(bool mms_mode) const;
};

/// Largest tau <= tau_target that divides final_time into whole steps.
double fit_time_step(double tau_target, double final_time);

} // namespace hdgmd

#endif
