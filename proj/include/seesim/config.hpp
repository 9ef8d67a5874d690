#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seesim/model.hpp"
#include "seesim/simulator.hpp"
#include "seesim/spectral_space.hpp"

namespace seesim {

/// Fully validated experiment description. Parsing is strict: unknown keys
/// are rejected and every violated constraint is reported, not just the
/// first.
struct ExperimentConfig {
  DiagonalOperator op;
  std::shared_ptr<const Model> model;
  TimeGrid grid;
  int k = 1;
  std::vector<double> deltas;
  double p = 2.0;
  double alpha = 0.0;
  double beta = 0.0;
  int samples = 1024;
  std::uint64_t seed = 0;
  Vec x;
  std::optional<Vec> y;  // lipschitz probe point
  std::vector<Vec> directions;
  std::vector<std::vector<int>> mode_schedule;  // 1-based eigenmode tuples
  std::vector<double> eps_ladder;
  std::vector<std::string> observables;

  /// Canonical serialization of the parsed config (key-sorted JSON); hashed
  /// into the run manifest.
  std::string canonical_text;
};

/// Parses and validates a config file. Throws std::runtime_error whose
/// message lists every violation.
ExperimentConfig parse_config(const std::string& path);

/// Same, from an in-memory JSON document (used by tests).
ExperimentConfig parse_config_text(const std::string& text);

/// FNV-1a 64-bit hash, printed as 16 hex digits; stable across runs.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace seesim
