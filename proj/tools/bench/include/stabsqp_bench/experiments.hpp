// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// The four experiment kinds behind the CLI verbs. Each cmd_* writes its
// report files into config.output.dir, prints a short table to `out` and
// returns the process exit code.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stabsqp/driver.hpp"
#include "stabsqp/problem.hpp"
#include "stabsqp_bench/config.hpp"

namespace stabsqp::bench {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kMaxOuter = 2;
inline constexpr int kSubproblemFailure = 3;
/// A study ran to completion but its pass condition did not hold.
inline constexpr int kCheckFailed = 4;
}  // namespace exit_code

[[nodiscard]] int exit_code_for(SolveStatus status);

/// Solver version string attached to every report row.
[[nodiscard]] std::string version_string();

/// Seed for run `index` of group `group`; independent of the job count.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t base, std::uint64_t group, std::uint64_t index);

/// center + delta with a Gaussian direction scaled so ||delta||_V == radius.
[[nodiscard]] PrimalDual perturb(const ProblemOracles& problem, const PrimalDual& center, double radius,
                                 std::uint64_t seed);

/// Runs fn(0..n-1) on up to `jobs` threads. Results come back in index order;
/// the first exception (by index) is rethrown after all workers finish.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn);

/// Per-run summary used by the rate study.
struct RunRate {
  SolveStatus status = SolveStatus::kMaxOuter;
  int outer_iterations = 0;
  double final_sigma = 0.0;
  /// Empty when fewer than three usable errors remain.
  std::optional<double> order;
  /// NaN when no iteration has sigma_k in [1e-7, 1e-2].
  double max_contraction = 0.0;
  bool sigma_proxy = false;
};

/// Rate analysis of one trace; this is also the hook used to feed synthetic
/// traces to the study code.
[[nodiscard]] RunRate analyze_run(const ProblemOracles& problem, const SolveTrace& trace,
                                  const std::optional<PrimalDual>& reference);

struct RateGroup {
  double radius = 0.0;
  int runs = 0;
  int kkt_reached = 0;
  int estimable = 0;
  /// Over runs with an order estimate; NaN when there are none.
  double median_order = 0.0;
  double min_order = 0.0;
  double max_contraction = 0.0;
};

[[nodiscard]] RateGroup summarize_rates(double radius, const std::vector<RunRate>& runs);

struct RunOptions {
  int jobs = 1;
};

int cmd_solve(const ExperimentConfig& config, const RunOptions& run, std::ostream& out);
int cmd_rate_study(const ExperimentConfig& config, const RunOptions& run, std::ostream& out);
int cmd_error_bound_study(const ExperimentConfig& config, const RunOptions& run, std::ostream& out);
int cmd_contrast(const ExperimentConfig& config, const RunOptions& run, std::ostream& out);

/// Dispatches on the experiment kind.
int run_experiment(const ExperimentConfig& config, const RunOptions& run, std::ostream& out);

void list_instances(std::ostream& out);

}  // namespace stabsqp::bench

#include "stabsqp_bench/parallel.inl"
