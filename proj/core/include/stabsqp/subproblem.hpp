// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// The stabilized QP subproblem at v = (x, lambda) with weight s = sigma(v):
//
//   min_{d, mu}  (grad f(x), d)_X + 1/2 (L_xx(v) d, d)_X + s/2 ||mu||_Y^2
//   s.t.         w(d, mu) := G(x) + G'(x)d - s (mu - lambda)  in  K.
//
// Its constraint multiplier coincides with mu, so (d, mu) is a KKT point iff
//
//   F1 = grad f(x) + L_xx(v) d + G'(x)^* mu = 0,
//   F2 = w - P_K(w + mu)                    = 0.
//
// F is piecewise affine for box-like K and is solved by semismooth Newton.
// Setting s = 0 gives the ordinary SQP subproblem (constraint G + G'd in K).

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "stabsqp/problem.hpp"

namespace stabsqp {

enum class SubproblemStatus { kConverged, kMaxIter, kSingular, kInfeasible };

[[nodiscard]] std::string_view to_string(SubproblemStatus status);

struct NewtonOptions {
  int max_iterations = 100;
  double armijo = 1e-4;
  double min_step = 1e-12;
  /// Tikhonov shifts added to the (1,1) Jacobian block on restarts.
  std::vector<double> regularization_ladder{1e-8, 1e-6, 1e-4};
  /// Phase-1 distance above which the ordinary subproblem is declared infeasible.
  double infeasibility_tol = 1e-6;
};

/// grad f(x), G(x) and dense coordinate matrices of L_xx(v), G'(x), G'(x)^*.
struct Linearization {
  Vector grad_f;
  Vector G;
  Matrix H;
  Matrix J;
  Matrix J_adj;
};

[[nodiscard]] Linearization linearize(const ProblemOracles& problem, const PrimalDual& v);

class StabilizedSubproblem {
 public:
  /// Evaluates sigma(v); throws KktPoint when it vanishes.
  StabilizedSubproblem(const ProblemOracles& base, PrimalDual v, double epsilon, std::optional<double> nu = {});

  /// Uses a caller-supplied stabilization weight (> 0) instead of sigma(v).
  static StabilizedSubproblem with_weight(const ProblemOracles& base, PrimalDual v, double weight, double epsilon,
                                          std::optional<double> nu = {});

  [[nodiscard]] const ProblemOracles& base() const noexcept { return *base_; }
  [[nodiscard]] const PrimalDual& point() const noexcept { return v_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }
  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
  [[nodiscard]] const std::optional<double>& nu() const noexcept { return nu_; }
  [[nodiscard]] const Linearization& linearization() const noexcept { return lin_; }

  /// w(d, mu) = G(x) + G'(x)d - sigma (mu - lambda)
  [[nodiscard]] Vector constraint_value(const Vector& d, const Vector& mu) const;
  [[nodiscard]] double objective(const Vector& d, const Vector& mu) const;

 private:
  StabilizedSubproblem(const ProblemOracles& base, PrimalDual v, double weight, double epsilon,
                       std::optional<double> nu, bool);

  const ProblemOracles* base_;
  PrimalDual v_;
  double sigma_;
  double epsilon_;
  std::optional<double> nu_;
  Linearization lin_;
};

struct SubproblemSolution {
  Vector d;
  Vector mu;
  /// Constraint multiplier of the subproblem; equal to mu by mu-stationarity.
  Vector rho;
  /// ||F1||_X + ||F2||_Y at (d, mu).
  double residual = 0.0;
  /// Acceptance threshold actually applied: max(epsilon, attainable floor).
  double tolerance = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool hit_ball = false;
  SubproblemStatus status = SubproblemStatus::kMaxIter;
  /// 1/2 ||F||^2 after each accepted Newton step of the final attempt.
  std::vector<double> merit_history;
  /// Regularization shift of the attempt that produced the result.
  double regularization = 0.0;
};

struct SubproblemPoint {
  Vector d;
  Vector mu;
};

/// d = 0, mu = G/s + lambda - P_K(G + s lambda)/s, for which w = P_K(G + s lambda).
[[nodiscard]] SubproblemPoint feasible_init(const StabilizedSubproblem& sub);

/// Stacked (F1, F2) of length dim X + dim Y.
[[nodiscard]] Vector kkt_residual_map(const StabilizedSubproblem& sub, const Vector& d, const Vector& mu);

/// ||F1||_X + ||F2||_Y of a stacked residual.
[[nodiscard]] double residual_norm(const ProblemOracles& problem, const Vector& stacked);

[[nodiscard]] SubproblemSolution solve_stabilized(const StabilizedSubproblem& sub, const NewtonOptions& opts = {});

/// Enumerates every active set of a box-like K (dim Y <= 12), solves the
/// equality-constrained KKT system of each, and returns the feasible
/// stationary point with the lowest objective.
[[nodiscard]] SubproblemSolution brute_force_oracle(const StabilizedSubproblem& sub);

/// Ordinary SQP subproblem (no stabilization) at v. Returns kInfeasible if
/// Newton fails and the linearized constraint set is at distance greater than
/// opts.infeasibility_tol from K.
[[nodiscard]] SubproblemSolution solve_ordinary(const ProblemOracles& problem, const PrimalDual& v, double epsilon,
                                                const NewtonOptions& opts = {});

/// min_d dist_Y(G(x) + G'(x)d, K), by regularized semismooth Newton.
[[nodiscard]] double linearized_feasibility_gap(const ProblemOracles& problem, const Vector& x);

}  // namespace stabsqp
