// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hdgmd {

double ViscosityLaw::operator()(double c) const {
  const double cc = std::clamp(c, 0.0, 1.0);
  const double mix =
      cc * std::pow(mu_solvent, -exponent) + (1.0 - cc) * std::pow(mu_oil, -exponent);
  return std::pow(mix, -1.0 / exponent);
}

Mat2 dispersion(const DispersionParams& params, const Vec2& u) {
  const double norm = u.norm();
  if (norm < 1e-14) return params.d0 * Mat2::Identity();
  const Mat2 along = (u * u.transpose()) / (norm * norm);
  return params.d0 * Mat2::Identity() +
         norm * (params.alpha_l * along + params.alpha_t * (Mat2::Identity() - along));
}

double dispersion_normal(const DispersionParams& params, const Vec2& u, const Vec2& n) {
  return n.dot(dispersion(params, u) * n);
}

double PhysicalModel::phi_min() const {
  double v = std::numeric_limits<double>::max();
  for (const auto& [tag, phi] : phi_by_region) v = std::min(v, phi);
  return v;
}

double PhysicalModel::phi_max() const {
  double v = 0.0;
  for (const auto& [tag, phi] : phi_by_region) v = std::max(v, phi);
  return v;
}

const Mat2& PhysicalModel::kappa(int region) const {
  const auto it = kappa_by_region.find(region);
  if (it == kappa_by_region.end())
    throw InputError("PhysicalModel: no permeability for region " + std::to_string(region));
  return it->second;
}

double PhysicalModel::porosity(int region) const {
  const auto it = phi_by_region.find(region);
  if (it == phi_by_region.end())
    throw InputError("PhysicalModel: no porosity for region " + std::to_string(region));
  return it->second;
}

Mat2 PhysicalModel::resistivity(int region, double c) const {
  return viscosity(c) * kappa(region).inverse();
}

void PhysicalModel::validate() const {
  if (phi_by_region.empty() || kappa_by_region.empty())
    throw InputError("PhysicalModel: porosity/permeability not set");
  if (!(phi_min() > 0.0)) throw InputError("PhysicalModel: porosity must be positive");
  for (const auto& [tag, kap] : kappa_by_region) {
    if ((kap - kap.transpose()).norm() > 1e-14 * kap.norm())
      throw InputError("PhysicalModel: permeability must be symmetric (region " +
                       std::to_string(tag) + ")");
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(kap);
    if (!(eig.eigenvalues().minCoeff() > 0.0))
      throw InputError("PhysicalModel: permeability must be positive definite (region " +
                       std::to_string(tag) + ")");
  }
  if (!(viscosity(0.0) > 0.0) || !(viscosity(1.0) > 0.0) || !(viscosity(0.5) > 0.0))
    throw InputError("PhysicalModel: viscosity law not positive on [0,1]");
  if (!(dispersion.d0 > 0.0)) throw InputError("PhysicalModel: d0 must be positive");
  if (dispersion.alpha_l < 0.0 || dispersion.alpha_t < 0.0)
    throw InputError("PhysicalModel: dispersivities must be nonnegative");
  if (!f_inject || !f_produce || !injected_conc || !initial_conc)
    throw InputError("PhysicalModel: source/initial data not set");
}

int Discretization::num_steps() const {
  const double n = final_time / tau;
  const int rounded = static_cast<int>(std::lround(n));
  if (rounded < 1 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw InputError("Discretization: final_time must be an integer multiple of tau");
  return rounded;
}

void Discretization::validate(bool mms_mode) const {
  if (degree < 0) throw InputError("Discretization: degree must be >= 0");
  if (degree < 1 && !mms_mode)
    throw InputError("Discretization: degree 0 is only supported for manufactured runs");
  if (!(sigma_u > 0.0)) throw InputError("Discretization: sigma_u must be positive");
  if (!(tau > 0.0)) throw InputError("Discretization: tau must be positive");
  if (!(final_time > 0.0)) throw InputError("Discretization: final_time must be positive");
  num_steps();
}

double fit_time_step(double tau_target, double final_time) {
  const int n = std::max(1, static_cast<int>(std::ceil(final_time / tau_target - 1e-12)));
  return final_time / n;
}

} // namespace hdgmd
