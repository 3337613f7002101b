// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hdgmd {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

} // namespace

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile out;
  std::istringstream in(text);
  std::string line, section = "run";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InputError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty key");
    out.values_[section + "." + key] = value;
  }
  return out;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string KeyValueFile::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw InputError("config: field '" + key + "' is not a number: " + it->second);
  }
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  if (v != std::floor(v)) throw InputError("config: field '" + key + "' is not an integer");
  return static_cast<int>(v);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw InputError("config: field '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> KeyValueFile::get_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("config: field '" + key + "' has a non-numeric entry: " + item);
    }
  }
  return out;
}

void Config::apply(const KeyValueFile& file) {
  scenario = file.get("run.scenario", scenario);
  degree = file.get_int("run.k", degree);
  tau = file.get_double("run.tau", tau);
  final_time = file.get_double("run.T", final_time);
  levels = file.get_int("run.levels", levels);
  refine = file.get_int("run.refine", refine);
  sigma_u = file.get_double("run.sigma_u", sigma_u);
  reconstruction = file.get_bool("run.reconstruction", reconstruction);
  audit = file.get("run.audit", audit);
  out_dir = file.get("run.out", out_dir);
  if (file.has("run.snapshots")) snapshot_times = file.get_list("run.snapshots");
  sigma_d = file.get("run.sigma_d", sigma_d);

  well_size = file.get_double("wells.size", well_size);
  well_rate = file.get_double("wells.rate", well_rate);
  placement = file.get("wells.placement", placement);

  mesh_hmin = file.get_double("mesh.hmin", mesh_hmin);
  mesh_ratio = file.get_double("mesh.ratio", mesh_ratio);
  square_n = file.get_int("mesh.n", square_n);
  mesh_file = file.get("mesh.file", mesh_file);
}

void Config::validate() const {
  if (audit != "record" && audit != "enforce" && audit != "off")
    throw InputError("config: field 'audit' must be record|enforce|off, got " + audit);
  if (sigma_d != "owner" && sigma_d != "max")
    throw InputError("config: field 'sigma_d' must be owner|max, got " + sigma_d);
  if (placement != "figure" && placement != "text")
    throw InputError("config: field 'placement' must be figure|text, got " + placement);
  if (!(sigma_u > 0.0)) throw InputError("config: field 'sigma_u' must be positive");
  if (tau < 0.0) throw InputError("config: field 'tau' must be positive");
  if (levels < 2) throw InputError("config: field 'levels' must be at least 2");
  if (well_size <= 0.0 || well_size > 0.5)
    throw InputError("config: field 'wells.size' must be in (0, 1/2]");
}

Config Config::from_file(const std::string& path) {
  Config cfg;
  cfg.apply(KeyValueFile::load(path));
  return cfg;
}

bool Config::looks_like_path(const std::string& scenario_arg) {
  return scenario_arg.find('/') != std::string::npos ||
         scenario_arg.find(".cfg") != std::string::npos ||
         scenario_arg.find(".txt") != std::string::npos;
}

Scenario Config::make_scenario() const {
  validate();
  const std::string& name = scenario;
  Scenario s;
  if (name == "mms-square" || name == "mms") {
    const int k = degree < 0 ? 1 : degree;
    const int level = refine < 0 ? 2 : refine;
    s = make_mms_square_scenario(k, level, final_time > 0.0 ? final_time : 0.1,
                                 tau > 0.0 ? tau : 0.01);
  } else if (name == "lshape") {
    LshapeOptions opt;
    opt.degree = degree < 0 ? 2 : degree;
    opt.tau = tau > 0.0 ? tau : 0.05;
    opt.final_time = final_time > 0.0 ? final_time : 5.0;
    opt.well_size = well_size;
    opt.well_rate = well_rate;
    opt.grading.h_min = mesh_hmin;
    opt.grading.ratio = mesh_ratio;
    opt.placement = placement == "figure" ? WellPlacement::Figure : WellPlacement::Text;
    s = make_lshape_scenario(opt);
    if (refine > 0) s.refine_level = refine;
  } else if (name == "zero") {
    s = make_zero_scenario(degree < 0 ? 1 : degree, refine < 0 ? 1 : refine);
    if (tau > 0.0) s.disc.tau = fit_time_step(tau, s.disc.final_time);
    if (final_time > 0.0) {
      s.disc.final_time = final_time;
      s.disc.tau = fit_time_step(tau > 0.0 ? tau : 0.01, final_time);
    }
  } else {
    throw InputError("config: unknown scenario '" + name +
                     "' (expected mms-square, lshape, zero, or a config-file path)");
  }
  s.disc.sigma_u = sigma_u;
  s.disc.flux.sigma_d = sigma_d == "max" ? Discretization::SigmaDConvention::Max
                                         : Discretization::SigmaDConvention::Owner;
  if (!snapshot_times.empty()) s.snapshot_times = snapshot_times;
  if (!mesh_file.empty()) {
    s.mesh_spec.kind = MeshSpec::Kind::File;
    s.mesh_spec.path = mesh_file;
  }
  return s;
}

RunOptions Config::make_run_options() const {
  RunOptions opt;
  opt.reconstruct = reconstruction;
  if (audit == "off") opt.audit = RunOptions::AuditMode::Off;
  if (audit == "record") opt.audit = RunOptions::AuditMode::Record;
  if (audit == "enforce") opt.audit = RunOptions::AuditMode::Enforce;
  return opt;
}

} // namespace hdgmd
