// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/config.hpp"
#include "hdgmd/output.hpp"
#include "hdgmd/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace hdgmd;

// Exit codes: 0 success, 1 solver error, 2 acceptance failure, 3 audit
// violation.
constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kAcceptanceFailure = 2;
constexpr int kAuditViolation = 3;

std::string out_path(const Config& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string snapshot_name(double t) {
  std::ostringstream name;
  name << "snapshot_t" << t << ".vtk";
  return name.str();
}

int cmd_converge(const Config& cfg) {
  const int k = cfg.degree < 0 ? 1 : cfg.degree;
  bool check_rates = true;
  if (k == 0) {
    std::cerr << "warning: analysis requires k >= 1; running k = 0 without the rate check\n";
    check_rates = false;
  }
  const double T = cfg.final_time > 0.0 ? cfg.final_time : 0.1;
  const double tau_cap = cfg.tau > 0.0 ? cfg.tau : 0.01;
  RunOptions options = cfg.make_run_options();
  const ErrorReport report =
      convergence_study(k, cfg.levels, cfg.reconstruction, T, tau_cap, options);
  write_rates_csv(report, out_path(cfg, "rates.csv"));

  if (!check_rates) return kOk;
  const double target = k + 1.0;
  if (!report.rates_within(target, 0.3)) {
    std::cerr << "convergence rates outside " << target << " +- 0.3:";
    for (double r : report.finest_rates()) std::cerr << ' ' << r;
    std::cerr << '\n';
    return kAcceptanceFailure;
  }
  return kOk;
}

int cmd_run(const Config& cfg) {
  const Scenario scenario = cfg.make_scenario();
  const RunOptions options = cfg.make_run_options();
  const Trajectory traj = options.reconstruct ? run(scenario, options)
                                              : run_without_reconstruction(scenario, options);
  write_breakthrough_csv(traj, out_path(cfg, "breakthrough.csv"));
  if (options.audit != RunOptions::AuditMode::Off)
    write_audit_csv(traj, out_path(cfg, "audit.csv"));

  const Mesh mesh = scenario.build_mesh();
  const FeSpace space(mesh, scenario.disc.degree, scenario.disc.quad_boost);
  for (const DiscreteState& state : traj.states)
    write_vtk_snapshot(space, state, out_path(cfg, snapshot_name(state.time)));

  if (traj.failed) {
    std::cerr << "solver failed at t = " << traj.failure_time << ": " << traj.failure_reason
              << '\n';
    return kSolverFailure;
  }
  return kOk;
}

int cmd_snapshot(const Config& cfg, double t) {
  const Scenario scenario = cfg.make_scenario();
  bool on_schedule = false;
  for (double s : scenario.snapshot_times)
    if (std::abs(s - t) < 0.5 * scenario.disc.tau) on_schedule = true;
  if (!on_schedule) {
    std::ostringstream msg;
    msg << "snapshot: t = " << t << " is not on the output schedule; available times:";
    for (double s : scenario.snapshot_times) msg << ' ' << s;
    throw InputError(msg.str());
  }
  const RunOptions options = cfg.make_run_options();
  const Trajectory traj = options.reconstruct ? run(scenario, options)
                                              : run_without_reconstruction(scenario, options);
  const Mesh mesh = scenario.build_mesh();
  const FeSpace space(mesh, scenario.disc.degree, scenario.disc.quad_boost);
  for (const DiscreteState& state : traj.states) {
    if (std::abs(state.time - t) < 0.5 * scenario.disc.tau) {
      write_vtk_snapshot(space, state, out_path(cfg, snapshot_name(state.time)));
      return kOk;
    }
  }
  std::cerr << "snapshot: run ended before t = " << t << '\n';
  return kSolverFailure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for coupled porous-media flow and transport"};
  app.require_subcommand(1);

  Config cfg;
  std::string scenario_arg;
  double snapshot_time = 0.0;
  bool no_reconstruction = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_arg, "scenario name (mms-square|lshape|zero) or config file");
    cmd->add_option("--k", cfg.degree, "polynomial degree");
    cmd->add_option("--tau", cfg.tau, "time step");
    cmd->add_option("--T", cfg.final_time, "final time");
    cmd->add_option("--refine", cfg.refine, "uniform refinements of the base mesh");
    cmd->add_option("--sigma-u", cfg.sigma_u, "flow stabilization constant");
    cmd->add_flag("--no-reconstruction", no_reconstruction, "feed the raw velocity to transport");
    cmd->add_option("--audit", cfg.audit, "record|enforce|off")
        ->check(CLI::IsMember({"record", "enforce", "off"}));
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--sigma-d", cfg.sigma_d, "owner|max face dispersion convention")
        ->check(CLI::IsMember({"owner", "max"}));
    cmd->add_option("--well-size", cfg.well_size, "well square side length");
    cmd->add_option("--well-rate", cfg.well_rate, "well source magnitude");
    cmd->add_option("--placement", cfg.placement, "well placement: figure|text")
        ->check(CLI::IsMember({"figure", "text"}));
    cmd->add_option("--hmin", cfg.mesh_hmin, "graded mesh: size at attractors");
    cmd->add_option("--ratio", cfg.mesh_ratio, "graded mesh: growth ratio");
  };

  CLI::App* converge = app.add_subcommand("converge", "manufactured-solution convergence study");
  add_common(converge);
  converge->add_option("--levels", cfg.levels, "number of refinement levels");

  CLI::App* run_cmd = app.add_subcommand("run", "time-dependent simulation");
  add_common(run_cmd);

  CLI::App* snapshot = app.add_subcommand("snapshot", "write one VTK snapshot");
  add_common(snapshot);
  snapshot->add_option("--t", snapshot_time, "snapshot time (must be on the schedule)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!scenario_arg.empty()) {
      if (Config::looks_like_path(scenario_arg)) {
        // File values first, explicit flags on top.
        Config file_cfg = Config::from_file(scenario_arg);
        const Config cli_cfg = cfg;
        auto keep = [&](auto member, auto sentinel) {
          if (cli_cfg.*member != sentinel) file_cfg.*member = cli_cfg.*member;
        };
        keep(&Config::degree, -1);
        keep(&Config::tau, 0.0);
        keep(&Config::final_time, 0.0);
        keep(&Config::refine, -1);
        if (cli_cfg.out_dir != ".") file_cfg.out_dir = cli_cfg.out_dir;
        if (cli_cfg.sigma_u != 1.0) file_cfg.sigma_u = cli_cfg.sigma_u;
        if (cli_cfg.audit != "record") file_cfg.audit = cli_cfg.audit;
        if (cli_cfg.sigma_d != "owner") file_cfg.sigma_d = cli_cfg.sigma_d;
        cfg = file_cfg;
      } else {
        cfg.scenario = scenario_arg;
      }
    } else if (converge->parsed()) {
      cfg.scenario = "mms-square";
    }
    if (no_reconstruction) cfg.reconstruction = false;

    if (converge->parsed()) return cmd_converge(cfg);
    if (run_cmd->parsed()) return cmd_run(cfg);
    if (snapshot->parsed()) return cmd_snapshot(cfg, snapshot_time);
  } catch (const AuditError& err) {
    std::cerr << "audit violation: " << err.what() << '\n';
    return kAuditViolation;
  } catch (const hdgmd::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kSolverFailure;
  }
  return kOk;
}
