// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "stabsqp/error.hpp"

namespace stabsqp {
namespace {

SolveResult run_loop(const ProblemOracles& problem, const PrimalDual& v0, const SolverOptions& opts,
                     const std::optional<PrimalDual>& reference, bool baseline) {
  problem.validate();
  problem.check_point(v0);
  opts.validate();
  const std::optional<PrimalDual>& ref = reference ? reference : problem.reference_kkt;

  SolveResult result{v0, {}};
  result.trace.options = opts;
  result.trace.baseline = baseline;
  PrimalDual& v = result.v;

  using Clock = std::chrono::steady_clock;
  for (int k = 0;; ++k) {
    const auto start = Clock::now();
    IterationRecord rec;
    rec.k = k;
    rec.point = v;
    rec.sigma = sigma(problem, v);
    if (ref) rec.err_to_ref = distance(problem, v, *ref);

    auto stamp = [&] {
      if (opts.record_timing) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      }
    };

    if (rec.sigma <= opts.tol_kkt * (1.0 + norm(problem, v))) {
      result.trace.status = SolveStatus::kKktReached;
      stamp();
      result.trace.iterations.push_back(std::move(rec));
      break;
    }
    if (k >= opts.max_outer) {
      result.trace.status = SolveStatus::kMaxOuter;
      stamp();
      result.trace.iterations.push_back(std::move(rec));
      break;
    }

    const double eps = opts.subproblem_tolerance(rec.sigma);
    SubproblemSolution sol;
    if (baseline) {
      sol = solve_ordinary(problem, v, eps, opts.newton);
    } else {
      const auto sub = StabilizedSubproblem::with_weight(problem, v, rec.sigma, eps, opts.ball_nu);
      sol = solve_stabilized(sub, opts.newton);
    }
    rec.sub_residual = sol.residual;
    rec.sub_iters = sol.iterations;
    rec.sub_status = sol.status;
    rec.hit_ball = sol.hit_ball;
    rec.d_norm = problem.x_space.norm(sol.d);
    rec.mu_step_norm = problem.y_space.norm(sol.mu - v.lambda);
    rec.step_norm = *rec.d_norm + *rec.mu_step_norm;
    rec.step = SubproblemPoint{sol.d, sol.mu};

    if (sol.status != SubproblemStatus::kConverged) {
      result.trace.status = SolveStatus::kSubproblemFailure;
      stamp();
      result.trace.iterations.push_back(std::move(rec));
      break;
    }

    // Unit step.
    v.x = v.x + sol.d;
    v.lambda = sol.mu;
    stamp();
    result.trace.iterations.push_back(std::move(rec));
  }
  return result;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol_kkt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol_kkt must be positive");
  if (max_outer < 0) throw Error(ErrorCode::kInvalidArgument, "max_outer must be nonnegative");
  if (!(subproblem_power >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "subproblem_power must be >= 1");
  if (!(epsilon_cap > 0.0) || !(epsilon_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon_cap and epsilon_floor must be positive");
  }
  if (epsilon_floor > epsilon_cap) throw Error(ErrorCode::kInvalidArgument, "epsilon_floor exceeds epsilon_cap");
  if (ball_nu && !(*ball_nu > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ball_nu must be positive");
}

double SolverOptions::subproblem_tolerance(double sigma) const {
  return std::clamp(std::pow(sigma, subproblem_power), epsilon_floor, epsilon_cap);
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kKktReached: return "KktReached";
    case SolveStatus::kMaxOuter: return "MaxOuter";
    case SolveStatus::kSubproblemFailure: return "SubproblemFailure";
  }
  return "Unknown";
}

SolveResult run_stabilized_sqp(const ProblemOracles& problem, const PrimalDual& v0, const SolverOptions& opts,
                               const std::optional<PrimalDual>& reference) {
  return run_loop(problem, v0, opts, reference, false);
}

SolveResult run_ordinary_sqp(const ProblemOracles& problem, const PrimalDual& v0, const SolverOptions& opts,
                             const std::optional<PrimalDual>& reference) {
  return run_loop(problem, v0, opts, reference, true);
}

SolveResult run_sqp(const ProblemOracles& problem, const PrimalDual& v0, const SolverOptions& opts,
                    const std::optional<PrimalDual>& reference) {
  return run_loop(problem, v0, opts, reference, opts.baseline);
}

RateEstimate estimate_order(std::span<const double> errors, double noise_floor) {
  RateEstimate est;
  std::vector<double> usable;
  for (double e : errors) {
    if (!(e > noise_floor) || !std::isfinite(e)) break;
    usable.push_back(e);
  }
  // Pre-asymptotic iterations (any error that failed to decrease) are cut off.
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    if (!(usable[i + 1] < usable[i])) start = i + 1;
  }
  est.errors.assign(usable.begin() + static_cast<std::ptrdiff_t>(start), usable.end());
  if (est.errors.size() < 3) {
    throw Error(ErrorCode::kInsufficientData, "rate estimation needs at least three errors above the noise floor");
  }
  const std::size_t pairs = est.errors.size() - 1;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    est.ratios.push_back(est.errors[i + 1] / (est.errors[i] * est.errors[i]));
    mx += std::log(est.errors[i]);
    my += std::log(est.errors[i + 1]);
  }
  mx /= static_cast<double>(pairs);
  my /= static_cast<double>(pairs);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double dx = std::log(est.errors[i]) - mx;
    sxy += dx * (std::log(est.errors[i + 1]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::kInsufficientData, "errors do not vary");
  est.order = sxy / sxx;
  return est;
}

RateEstimate estimate_rate(const ProblemOracles& problem, const SolveTrace& trace,
                           const std::optional<PrimalDual>& reference) {
  std::vector<double> errors;
  for (const auto& rec : trace.iterations) {
    errors.push_back(reference ? distance(problem, rec.point, *reference) : rec.sigma);
  }
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  RateEstimate est = estimate_order(errors, floor);
  est.sigma_proxy = !reference.has_value();
  return est;
}

double max_sigma_contraction(const SolveTrace& trace, double lo, double hi) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < trace.iterations.size(); ++i) {
    const double s = trace.iterations[i].sigma;
    if (s < lo || s > hi) continue;
    const double r = trace.iterations[i + 1].sigma / (s * s);
    if (std::isnan(best) || r > best) best = r;
  }
  return best;
}

double max_multiplier_norm(const ProblemOracles& problem, const SolveTrace& trace) {
  double best = 0.0;
  for (const auto& rec : trace.iterations) {
    best = std::max(best, problem.y_space.norm(rec.point.lambda));
    if (rec.step) best = std::max(best, problem.y_space.norm(rec.step->mu));
  }
  return best;
}

}  // namespace stabsqp
