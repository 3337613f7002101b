// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/output.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <vector>

namespace hdgmd {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("output: cannot open " + path);
  out << std::setprecision(17);
  return out;
}

} // namespace

void write_rates_csv(const ErrorReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "level,h,cells,trace_dofs,err_p,err_u,err_U,err_c,err_q,"
         "rate_p,rate_u,rate_U,rate_c,rate_q\n";
  for (size_t l = 0; l < report.levels.size(); ++l) {
    const auto& e = report.levels[l];
    out << e.level << ',' << e.h << ',' << e.cells << ',' << e.trace_dofs << ',' << e.err_p << ','
        << e.err_u << ',' << e.err_U << ',' << e.err_c << ',' << e.err_q;
    for (double r : report.rates[l]) out << ',' << r;
    out << '\n';
  }
}

void write_breakthrough_csv(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,avg_c\n";
  out << 0.0 << ',' << trajectory.initial_breakthrough << '\n';
  for (const StepAudit& a : trajectory.audits) out << a.time << ',' << a.breakthrough << '\n';
}

void write_audit_csv(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "step,t,flow_energy_defect,div_defect,div_scale,normal_jump,velocity_norm,"
         "flow_stability,theta_lift_defect,transport_identity_defect,"
         "energy_lhs,energy_rhs,slack,skew_term,overshoot_cells,undershoot_cells\n";
  for (const StepAudit& a : trajectory.audits) {
    out << a.step << ',' << a.time << ',' << a.flow_energy_defect << ',' << a.div_defect << ','
        << a.div_scale << ',' << a.normal_jump << ',' << a.velocity_norm << ',' << a.flow_stability
        << ',' << a.theta_lift_defect << ',' << a.transport_identity_defect << ',' << a.energy_lhs
        << ',' << a.energy_rhs << ',' << a.slack << ',' << a.skew_term << ','
        << a.overshoot_cells << ',' << a.undershoot_cells << '\n';
  }
}

void write_vtk_snapshot(const FeSpace& space, const DiscreteState& state, std::ostream& out) {
  const Mesh& mesh = space.mesh();
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n";
  out << "hdgmd snapshot t=" << state.time << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices) out << v.x() << ' ' << v.y() << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int e = 0; e < mesh.num_cells(); ++e) out << "5\n";

  out << "CELL_DATA " << mesh.num_cells() << '\n';
  out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int tag : mesh.region_tags) out << tag << '\n';
  const OvershootCount oc = overshoot_map(space, state.concentration);
  out << "SCALARS overshoot int 1\nLOOKUP_TABLE default\n";
  for (unsigned char f : oc.flags) out << static_cast<int>(f) << '\n';
  out << "VECTORS velocity double\n";
  for (int e = 0; e < mesh.num_cells(); ++e) {
    Vec2 v = Vec2::Zero();
    const Vec2 xc = mesh.cell_centroid(e);
    if (!state.conforming_velocity.empty())
      v = eval_rt_at(space, state.conforming_velocity, e, xc);
    else if (!state.velocity.empty())
      v = eval_vector_at(space, state.velocity, e, xc);
    out << v.x() << ' ' << v.y() << " 0\n";
  }

  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  out << "SCALARS concentration double 1\nLOOKUP_TABLE default\n";
  std::vector<double> accum(mesh.num_vertices(), 0.0);
  std::vector<int> count(mesh.num_vertices(), 0);
  for (int e = 0; e < mesh.num_cells(); ++e) {
    for (int v = 0; v < 3; ++v) {
      const int vid = mesh.cells[e][v];
      accum[vid] += eval_scalar_at(space, state.concentration, e, mesh.vertices[vid]);
      count[vid] += 1;
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v)
    out << (count[v] ? accum[v] / count[v] : 0.0) << '\n';
}

void write_vtk_snapshot(const FeSpace& space, const DiscreteState& state, const std::string& path) {
  std::ofstream out = open_out(path);
  write_vtk_snapshot(space, state, out);
}

} // namespace hdgmd
