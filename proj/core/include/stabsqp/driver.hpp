// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Outer loop of the stabilized SQP method: at v_k solve the stabilized
// subproblem with weight sigma(v_k) and take the unit step
// v_{k+1} = (x_k + d_k, mu_k). No line search, no merit function; the method
// is local by construction and divergence is reported as kMaxOuter.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stabsqp/problem.hpp"
#include "stabsqp/subproblem.hpp"

namespace stabsqp {

struct SolverOptions {
  /// Stop once sigma(v_k) <= tol_kkt * (1 + ||v_k||).
  double tol_kkt = 1e-10;
  int max_outer = 50;
  /// Subproblem tolerance eps_k = clamp(sigma_k^power, epsilon_floor, epsilon_cap).
  double subproblem_power = 6.0;
  double epsilon_cap = 1e-2;
  double epsilon_floor = 1e-14;
  /// Safeguard radius of the localized subproblem; diagnostic only.
  std::optional<double> ball_nu;
  /// Solve the ordinary (unstabilized) SQP subproblem instead.
  bool baseline = false;
  /// Record wall-clock time per iteration (disable for bit-exact reports).
  bool record_timing = true;
  NewtonOptions newton;

  void validate() const;
  [[nodiscard]] double subproblem_tolerance(double sigma) const;
};

enum class SolveStatus { kKktReached, kMaxOuter, kSubproblemFailure };

[[nodiscard]] std::string_view to_string(SolveStatus status);

struct IterationRecord {
  int k = 0;
  PrimalDual point;
  double sigma = 0.0;
  /// Subproblem fields are empty on the record of the final point.
  std::optional<SubproblemPoint> step;
  std::optional<double> step_norm;     // ||d||_X + ||mu - lambda||_Y
  std::optional<double> d_norm;
  std::optional<double> mu_step_norm;  // ||mu - lambda||_Y
  std::optional<double> sub_residual;
  std::optional<int> sub_iters;
  std::optional<SubproblemStatus> sub_status;
  std::optional<bool> hit_ball;
  std::optional<double> err_to_ref;
  double wall_ms = 0.0;
};

struct SolveTrace {
  std::vector<IterationRecord> iterations;
  SolveStatus status = SolveStatus::kMaxOuter;
  SolverOptions options;
  bool baseline = false;
};

struct SolveResult {
  PrimalDual v;
  SolveTrace trace;
};

/// The reference point, when given (or stored in the problem), fills err_to_ref.
[[nodiscard]] SolveResult run_stabilized_sqp(const ProblemOracles& problem, const PrimalDual& v0,
                                             const SolverOptions& opts,
                                             const std::optional<PrimalDual>& reference = std::nullopt);

[[nodiscard]] SolveResult run_ordinary_sqp(const ProblemOracles& problem, const PrimalDual& v0,
                                           const SolverOptions& opts,
                                           const std::optional<PrimalDual>& reference = std::nullopt);

/// Dispatches on opts.baseline.
[[nodiscard]] SolveResult run_sqp(const ProblemOracles& problem, const PrimalDual& v0, const SolverOptions& opts,
                                  const std::optional<PrimalDual>& reference = std::nullopt);

struct RateEstimate {
  /// Least-squares slope of log e_{k+1} against log e_k.
  double order = 0.0;
  /// e_{k+1} / e_k^2 for consecutive usable errors.
  std::vector<double> ratios;
  std::vector<double> errors;
  bool sigma_proxy = false;
};

/// Uses the leading run of errors above noise_floor, minus any prefix that
/// ends in a non-decreasing pair; needs at least three errors after that.
[[nodiscard]] RateEstimate estimate_order(std::span<const double> errors, double noise_floor);

/// Errors are ||v_k - reference||_V, or sigma_k when no reference is given.
/// Errors at or below 100 * machine epsilon are treated as noise.
[[nodiscard]] RateEstimate estimate_rate(const ProblemOracles& problem, const SolveTrace& trace,
                                         const std::optional<PrimalDual>& reference);

/// max sigma_{k+1} / sigma_k^2 over iterations with sigma_k in [lo, hi];
/// NaN when no iteration qualifies.
[[nodiscard]] double max_sigma_contraction(const SolveTrace& trace, double lo = 1e-7, double hi = 1e-2);

/// Largest multiplier norm along the trace, including the mu of every
/// attempted subproblem step.
[[nodiscard]] double max_multiplier_norm(const ProblemOracles& problem, const SolveTrace& trace);

}  // namespace stabsqp
