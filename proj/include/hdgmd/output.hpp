// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_OUTPUT_HPP
#define HDGMD_OUTPUT_HPP

#include "hdgmd/sim.hpp"
#include "hdgmd/verify.hpp"

#include <iosfwd>
#include <string>

namespace hdgmd {

// CSV writers: header row, 17 significant digits, deterministic.
void write_rates_csv(const ErrorReport& report, const std::string& path);
void write_breakthrough_csv(const Trajectory& trajectory, const std::string& path);
void write_audit_csv(const Trajectory& trajectory, const std::string& path);

/// Legacy-ASCII VTK unstructured grid: region and overshoot flags as cell
/// data, the conforming velocity at cell centroids as cell vectors, and
/// the vertex-averaged concentration as point data.
void write_vtk_snapshot(const FeSpace& space, const DiscreteState& state, const std::string& path);
void write_vtk_snapshot(const FeSpace& space, const DiscreteState& state, std::ostream& out);

} // namespace hdgmd

#endif
