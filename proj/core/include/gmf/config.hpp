#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmf/time_grid.hpp"

namespace gmf {

/// Resolved study configuration. Core keys: model, phi, epsilon, beta,
/// n_grid, replicas, dt, delta, T, master_seed, output_dir. Optional keys:
/// n (single-filter particle count, default n_grid front), slope_min /
/// slope_max (rate-study acceptance band, default predicted slope +- 0.35),
/// oracle_particles / oracle_batches (bootstrap reference for nonlinear
/// models), observation_seed (frozen path of the distribution study,
/// default master_seed). Unknown keys are rejected by name.
struct StudyConfig {
  std::string model = "linear_ou";
  std::string phi = "x";
  double epsilon = 0.5;
  double beta = 1.0;
  std::vector<int> n_grid = {50, 100, 200, 400, 800};
  int replicas = 200;
  double dt = 1e-3;
  double delta = 0.05;
  double horizon = 1.0;  // key "T"
  std::uint64_t master_seed = 20240817;
  bool master_seed_explicit = false;  // set when a file/override supplied it
  std::string output_dir = "out";

  std::optional<int> n;
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  long oracle_particles = 1000000;
  int oracle_batches = 20;
  std::optional<std::uint64_t> observation_seed;

  int single_filter_n() const { return n ? *n : n_grid.front(); }
};

StudyConfig parse_config(const std::string& json_text);

/// Reads and parses a JSON config file; a missing file raises an error whose
/// message contains the path.
StudyConfig load_config_file(const std::string& path);

/// Applies one "key=value" override; n_grid takes a comma-separated list.
/// Errors name the offending key.
void apply_override(StudyConfig& cfg, const std::string& assignment);

TimeGrid study_grid(const StudyConfig& cfg);

/// Study invariants: n_grid strictly increasing with >= 4 entries and every
/// n >= 2; replicas >= 50. Error messages name the violated key.
void validate_study(const StudyConfig& cfg);

/// Resolved key-value dump (JSON text, fixed key order) for manifests.
std::string config_to_json(const StudyConfig& cfg);

}  // namespace gmf
