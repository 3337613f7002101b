// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_CONFIG_HPP
#define HDGMD_CONFIG_HPP

#include "hdgmd/scenario.hpp"
#include "hdgmd/sim.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hdgmd {

/// Flat key=value configuration with [section] headers and # comments.
/// Keys are stored as "section.key" ("run" when no section is open).
class KeyValueFile {
public:
  static KeyValueFile parse(const std::string& text);
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Everything a CLI command needs to run one experiment.
struct Config {
  std::string scenario = "lshape"; // name or config-file path
  int degree = -1;                 // -1 = scenario default
  double tau = 0.0;                // 0 = scenario default
  double final_time = 0.0;         // 0 = scenario default
  int levels = 4;                  // convergence levels
  int refine = -1;                 // refinement applied to the base mesh
  double sigma_u = 1.0;
  bool reconstruction = true;
  std::string audit = "record"; // record | enforce | off
  std::string out_dir = ".";
  std::vector<double> snapshot_times;
  std::string sigma_d = "owner"; // owner | max
  // lshape knobs
  double well_size = 0.01;
  double well_rate = 180.0;
  std::string placement = "figure"; // figure | text
  double mesh_hmin = 0.005;
  double mesh_ratio = 1.15;
  int square_n = 1;
  std::string mesh_file;

  /// Merge values from a parsed file (CLI flags are applied on top).
  void apply(const KeyValueFile& file);
  void validate() const;

  /// Defaults overridden by the file's values.
  static Config from_file(const std::string& path);
  static bool looks_like_path(const std::string& scenario_arg);

  Scenario make_scenario() const;
  RunOptions make_run_options() const;
};

} // namespace hdgmd

#endif
