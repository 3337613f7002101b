// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_FIELDS_HPP
#define HDGMD_FIELDS_HPP

#include <span>
#include <vector>

namespace hdgmd {

/// Cellwise coefficient storage (discontinuous fields).
struct CellField {
  int ncells = 0;
  int dim = 0;
  std::vector<double> data;

  CellField() = default;
  CellField(int ncells_, int dim_) : ncells(ncells_), dim(dim_), data(size_t(ncells_) * dim_, 0.0) {}

  std::span<double> cell(int e) { return {data.data() + size_t(e) * dim, size_t(dim)}; }
  std::span<const double> cell(int e) const { return {data.data() + size_t(e) * dim, size_t(dim)}; }
  bool empty() const { return data.empty(); }
};

/// Facewise coefficient storage (trace fields).
struct FaceField {
  int nfaces = 0;
  int dim = 0;
  std::vector<double> data;

  FaceField() = default;
  FaceField(int nfaces_, int dim_) : nfaces(nfaces_), dim(dim_), data(size_t(nfaces_) * dim_, 0.0) {}

  std::span<double> face(int f) { return {data.data() + size_t(f) * dim, size_t(dim)}; }
  std::span<const double> face(int f) const { return {data.data() + size_t(f) * dim, size_t(dim)}; }
  bool empty() const { return data.empty(); }
};

/// All discrete fields of one time level.
struct DiscreteState {
  double time = 0.0;
  CellField velocity;            // vector P_k
  CellField pressure;            // scalar P_k, global mean zero
  FaceField pressure_trace;      // P_k per face
  CellField conforming_velocity; // RT_k coefficients (empty without reconstruction)
  CellField aux_gradient;        // vector P_k
  CellField dispersive_flux;     // vector P_k
  CellField concentration;       // scalar P_k
  FaceField concentration_trace; // P_k per face
};

} // namespace hdgmd

#endif
