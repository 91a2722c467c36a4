// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration files. One JSON document per experiment:
//
//   {
//     "instance":   {"name": "obstacle-1d", "params": {"N": 64}},
//     "solver":     {"tol_kkt": 1e-10, ...},
//     "experiment": {"type": "rate-study", "radii": [1e-2, 1e-3], "samples": 20},
//     "output":     {"dir": "out", "format": "both", "timing": false},
//     "seed":       1
//   }
//
// Every section except "instance" is optional.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabsqp/driver.hpp"
#include "stabsqp/instances.hpp"

namespace stabsqp::bench {

/// Raised for anything wrong with a configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SingleSolve {
  /// Explicit start; otherwise reference + radius-perturbation when radius is
  /// set, otherwise the instance default start.
  std::optional<PrimalDual> start;
  std::optional<double> radius;
};

struct RateStudy {
  std::vector<double> radii{1e-2, 1e-3};
  int samples = 20;
};

struct ErrorBoundStudy {
  int samples = 100;
  double radius = 1e-3;
  double spread_bound = 1e4;
};

struct ContrastStudy {
  std::optional<PrimalDual> start;
  std::optional<double> radius;
  /// Primal agreement tolerance reported when both drivers converge.
  double agreement_tol = 1e-8;
  /// Multiplier norm above which the ordinary run is flagged as blowing up.
  double blowup_threshold = 1e6;
};

using Experiment = std::variant<SingleSolve, RateStudy, ErrorBoundStudy, ContrastStudy>;

[[nodiscard]] std::string_view experiment_name(const Experiment& e);

enum class Format { kCsv, kJson, kBoth };

[[nodiscard]] Format format_from_string(std::string_view s);
[[nodiscard]] std::string_view to_string(Format f);

struct OutputConfig {
  std::filesystem::path dir = "stabsqp-out";
  Format format = Format::kBoth;
  /// Off by default so that reruns are byte-identical.
  bool timing = false;
};

struct ExperimentConfig {
  InstanceSpec instance;
  SolverOptions solver;
  Experiment experiment = SingleSolve{};
  OutputConfig output;
  std::uint64_t seed = 1;

  /// Radii positive and strictly decreasing, samples >= 10 for error bounds,
  /// perturbation radii positive.
  void validate() const;
};

/// `kind` names the experiment when the document has no "experiment.type"
/// (one of solve, rate-study, error-bound, contrast); a conflicting type is
/// rejected.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j, std::string_view kind);

/// Parses text; syntax errors carry line and column.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text, std::string_view kind);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path, std::string_view kind);

/// Canonical form: merged instance parameters and full solver options.
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);

/// FNV-1a over the canonical JSON of everything that determines results
/// (instance, solver, experiment, seed); output settings are excluded.
[[nodiscard]] std::string config_hash(const ExperimentConfig& config);

}  // namespace stabsqp::bench
