// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/config.hpp"
#include "hdgmd/output.hpp"
#include "hdgmd/verify.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

namespace py = pybind11;
using namespace hdgmd;

namespace {

struct RunResult {
  std::vector<double> times;
  std::vector<double> breakthrough;
  std::vector<double> slack;
  double min_slack = 0.0;
  double max_div_defect = 0.0;
  double max_normal_jump = 0.0;
  double max_theta_defect = 0.0;
  int max_overshoot_cells = 0;
  int max_undershoot_cells = 0;
  int steps_completed = 0;
  bool failed = false;
  double failure_time = 0.0;
  std::string failure_reason;
};

RunResult summarize(const Trajectory& traj) {
  RunResult r;
  r.steps_completed = traj.steps_completed;
  r.failed = traj.failed;
  r.failure_time = traj.failure_time;
  r.failure_reason = traj.failure_reason;
  r.min_slack = std::numeric_limits<double>::max();
  for (const StepAudit& a : traj.audits) {
    r.times.push_back(a.time);
    r.breakthrough.push_back(a.breakthrough);
    r.slack.push_back(a.slack);
    r.min_slack = std::min(r.min_slack, a.slack);
    r.max_div_defect = std::max(r.max_div_defect, a.div_defect);
    r.max_normal_jump = std::max(r.max_normal_jump, a.normal_jump);
    r.max_theta_defect = std::max(r.max_theta_defect, a.theta_lift_defect);
    r.max_overshoot_cells = std::max(r.max_overshoot_cells, a.overshoot_cells);
    r.max_undershoot_cells = std::max(r.max_undershoot_cells, a.undershoot_cells);
  }
  if (traj.audits.empty()) r.min_slack = 0.0;
  return r;
}

RunOptions options_from(bool reconstruct, const std::string& audit) {
  RunOptions opt;
  opt.reconstruct = reconstruct;
  if (audit == "off")
    opt.audit = RunOptions::AuditMode::Off;
  else if (audit == "enforce")
    opt.audit = RunOptions::AuditMode::Enforce;
  else
    opt.audit = RunOptions::AuditMode::Record;
  return opt;
}

} // namespace

PYBIND11_MODULE(_hdgmd, m) {
  m.doc() = "HDG solver for miscible displacement in porous media";

  py::register_exception<Error>(m, "HdgmdError");

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_cells", &Mesh::num_cells)
      .def_property_readonly("num_faces", &Mesh::num_faces)
      .def_readonly("h_max", &Mesh::h_max)
      .def("total_area", &Mesh::total_area)
      .def("max_shape_ratio", &Mesh::max_shape_ratio)
      .def("__repr__", [](const Mesh& mesh) {
        return "<hdgmd.Mesh cells=" + std::to_string(mesh.num_cells()) +
               " h=" + std::to_string(mesh.h_max) + ">";
      });

  m.def("unit_square", &generate_unit_square, py::arg("n"));
  m.def(
      "lshape",
      [](double well_size, double h_min, double ratio) {
        return generate_lshape(well_size, LshapeGrading{h_min, ratio});
      },
      py::arg("well_size") = 0.01, py::arg("h_min") = 0.005, py::arg("ratio") = 1.15);
  m.def("refine", &refine_uniform, py::arg("mesh"));
  m.def("save_mesh", &save_mesh, py::arg("mesh"), py::arg("path"));
  m.def(
      "load_mesh", [](const std::string& path) { return load_mesh(path); }, py::arg("path"));

  m.def(
      "viscosity",
      [](double mu_solvent, double mu_oil, double c) {
        return ViscosityLaw{mu_solvent, mu_oil, 0.25}(c);
      },
      py::arg("mu_solvent"), py::arg("mu_oil"), py::arg("c"));
  m.def(
      "dispersion",
      [](double d0, double alpha_l, double alpha_t, std::pair<double, double> u) {
        const Mat2 d = dispersion(DispersionParams{d0, alpha_l, alpha_t}, Vec2(u.first, u.second));
        return std::vector<std::vector<double>>{{d(0, 0), d(0, 1)}, {d(1, 0), d(1, 1)}};
      },
      py::arg("d0"), py::arg("alpha_l"), py::arg("alpha_t"), py::arg("u"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_property_readonly("degree", [](const Scenario& s) { return s.disc.degree; })
      .def_property_readonly("tau", [](const Scenario& s) { return s.disc.tau; })
      .def_property_readonly("final_time", [](const Scenario& s) { return s.disc.final_time; });

  m.def("mms_square_scenario", &make_mms_square_scenario, py::arg("degree"), py::arg("level"),
        py::arg("final_time") = 0.1, py::arg("tau_cap") = 0.01);
  m.def(
      "lshape_scenario",
      [](int degree, double tau, double final_time, double well_size, double well_rate,
         double h_min, double ratio, const std::string& placement) {
        LshapeOptions opt;
        opt.degree = degree;
        opt.tau = tau;
        opt.final_time = final_time;
        opt.well_size = well_size;
        opt.well_rate = well_rate;
        opt.grading = LshapeGrading{h_min, ratio};
        opt.placement = placement == "text" ? WellPlacement::Text : WellPlacement::Figure;
        return make_lshape_scenario(opt);
      },
      py::arg("degree") = 2, py::arg("tau") = 0.05, py::arg("final_time") = 5.0,
      py::arg("well_size") = 0.01, py::arg("well_rate") = 180.0, py::arg("h_min") = 0.005,
      py::arg("ratio") = 1.15, py::arg("placement") = "figure");
  m.def("zero_scenario", &make_zero_scenario, py::arg("degree") = 1, py::arg("level") = 1);
  m.def(
      "scenario_from_config",
      [](const std::string& path) { return Config::from_file(path).make_scenario(); },
      py::arg("path"));

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("times", &RunResult::times)
      .def_readonly("breakthrough", &RunResult::breakthrough)
      .def_readonly("slack", &RunResult::slack)
      .def_readonly("min_slack", &RunResult::min_slack)
      .def_readonly("max_div_defect", &RunResult::max_div_defect)
      .def_readonly("max_normal_jump", &RunResult::max_normal_jump)
      .def_readonly("max_theta_defect", &RunResult::max_theta_defect)
      .def_readonly("max_overshoot_cells", &RunResult::max_overshoot_cells)
      .def_readonly("max_undershoot_cells", &RunResult::max_undershoot_cells)
      .def_readonly("steps_completed", &RunResult::steps_completed)
      .def_readonly("failed", &RunResult::failed)
      .def_readonly("failure_time", &RunResult::failure_time)
      .def_readonly("failure_reason", &RunResult::failure_reason);

  m.def(
      "simulate",
      [](const Scenario& scenario, bool reconstruct, const std::string& audit) {
        const RunOptions opt = options_from(reconstruct, audit);
        const Trajectory traj =
            reconstruct ? run(scenario, opt) : run_without_reconstruction(scenario, opt);
        return summarize(traj);
      },
      py::arg("scenario"), py::arg("reconstruct") = true, py::arg("audit") = "record");

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_property_readonly("h",
                             [](const ErrorReport& r) {
                               std::vector<double> h;
                               for (const auto& l : r.levels) h.push_back(l.h);
                               return h;
                             })
      .def_property_readonly("errors",
                             [](const ErrorReport& r) {
                               py::dict d;
                               std::vector<double> p, u, U, c, q;
                               for (const auto& l : r.levels) {
                                 p.push_back(l.err_p);
                                 u.push_back(l.err_u);
                                 U.push_back(l.err_U);
                                 c.push_back(l.err_c);
                                 q.push_back(l.err_q);
                               }
                               d["p"] = p;
                               d["u"] = u;
                               d["U"] = U;
                               d["c"] = c;
                               d["q"] = q;
                               return d;
                             })
      .def_property_readonly("finest_rates", [](const ErrorReport& r) {
        py::dict d;
        const auto rates = r.finest_rates();
        for (size_t i = 0; i < kErrorFields.size(); ++i) d[kErrorFields[i]] = rates[i];
        return d;
      });

  m.def("convergence_study",
        [](int degree, int levels, bool reconstruct, double final_time, double tau_cap) {
          return convergence_study(degree, levels, reconstruct, final_time, tau_cap);
        },
        py::arg("degree"), py::arg("levels"), py::arg("reconstruct") = true,
        py::arg("final_time") = 0.1, py::arg("tau_cap") = 0.01);
}
