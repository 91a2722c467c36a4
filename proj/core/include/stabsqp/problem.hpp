// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Set-constrained programs  min f(x)  s.t.  G(x) in K  given through oracles.
// Derivatives are Riesz representatives in the respective inner products:
// grad_f(x) is the vector g with (g, d)_X = f'(x)d, and the adjoint satisfies
// (lambda, G'(x)d)_Y = (G'(x)^* lambda, d)_X.

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "stabsqp/convex_set.hpp"
#include "stabsqp/hilbert.hpp"

namespace stabsqp {

/// v = (x, lambda) in V = X x Y.
struct PrimalDual {
  Vector x;
  Vector lambda;
};

struct ProblemOracles {
  ProblemOracles(std::string name, InnerProductSpace x_space, InnerProductSpace y_space, ConvexSet K);

  std::string name;
  InnerProductSpace x_space;
  InnerProductSpace y_space;
  ConvexSet K;

  std::function<double(const Vector& x)> f;
  std::function<Vector(const Vector& x)> grad_f;
  std::function<Vector(const Vector& x)> G;
  std::function<Vector(const Vector& x, const Vector& d)> jac_apply;
  std::function<Vector(const Vector& x, const Vector& lambda)> jac_adjoint_apply;
  /// L_xx(v)d. Optional; central differences of lagrangian_grad are used if empty.
  std::function<Vector(const PrimalDual& v, const Vector& d)> hess_lagrangian_apply;

  /// Known KKT point, used only for certification.
  std::optional<PrimalDual> reference_kkt;

  /// Throws if a required oracle is missing or K does not live in Y.
  void validate() const;
  /// Throws DimensionMismatch / NonFinite for a malformed point.
  void check_point(const PrimalDual& v) const;
};

/// ||x||_X + ||lambda||_Y
[[nodiscard]] double norm(const ProblemOracles& problem, const PrimalDual& v);
[[nodiscard]] double distance(const ProblemOracles& problem, const PrimalDual& a, const PrimalDual& b);

/// L(v) = f(x) + (lambda, G(x))_Y
[[nodiscard]] double lagrangian(const ProblemOracles& problem, const PrimalDual& v);

/// L_x(v) = grad f(x) + G'(x)^* lambda
[[nodiscard]] Vector lagrangian_grad(const ProblemOracles& problem, const PrimalDual& v);

[[nodiscard]] Vector hessian_apply(const ProblemOracles& problem, const PrimalDual& v, const Vector& d);

/// sigma(v) = ||L_x(v)||_X + ||G(x) - P_K(G(x) + lambda)||_Y. Vanishes exactly
/// at KKT points and doubles as the stabilization weight of the subproblem.
[[nodiscard]] double sigma(const ProblemOracles& problem, const PrimalDual& v);

struct KktCheck {
  bool is_kkt;
  double stationarity;
  double complementarity;
};

/// Both residuals <= tol * (1 + ||v||).
[[nodiscard]] KktCheck kkt_check(const ProblemOracles& problem, const PrimalDual& v, double tol);

/// Dense coordinate matrices of the linearization, assembled column by column
/// from the oracles.
[[nodiscard]] Matrix hessian_matrix(const ProblemOracles& problem, const PrimalDual& v);
[[nodiscard]] Matrix jacobian_matrix(const ProblemOracles& problem, const Vector& x);
[[nodiscard]] Matrix jacobian_adjoint_matrix(const ProblemOracles& problem, const Vector& x);

// Oracle consistency diagnostics. Each returns a relative error.

/// |(lambda, G'(x)d)_Y - (G'(x)^* lambda, d)_X| / (1 + |both|)
[[nodiscard]] double adjoint_error(const ProblemOracles& problem, const Vector& x, const Vector& d,
                                   const Vector& lambda);
/// |(L_xx d, e)_X - (L_xx e, d)_X| / (1 + |both|)
[[nodiscard]] double hessian_symmetry_error(const ProblemOracles& problem, const PrimalDual& v, const Vector& d,
                                            const Vector& e);
/// Central difference of f along dir with h = 1e-6 (1 + ||x||), compared to
/// (grad f(x), dir)_X.
[[nodiscard]] double gradient_fd_error(const ProblemOracles& problem, const Vector& x, const Vector& dir);

/// Strict complementarity margins at v for a box-like K: the smallest
/// |lambda_i| over coordinates where G(x) sits on a bound, and the smallest
/// distance to the nearest bound over the remaining coordinates. Fixed
/// (lower == upper) coordinates are skipped.
struct ComplementarityMargins {
  double active_multiplier;
  double inactive_slack;
  Index active_count;
  Index inactive_count;
};
[[nodiscard]] ComplementarityMargins complementarity_margins(const ProblemOracles& problem, const PrimalDual& v,
                                                             double bound_tol = 1e-9);

/// Smallest generalized eigenvalue of L_xx(v) restricted to the null space of
/// the rows of G'(x) that are fixed or strongly active (|lambda_i| > active_tol).
/// This subspace contains the critical cone, so a positive value is a
/// (finite-dimensional, approximate) sufficient-curvature diagnostic.
[[nodiscard]] double reduced_hessian_min_eigenvalue(const ProblemOracles& problem, const PrimalDual& v,
                                                    double active_tol = 1e-8);

}  // namespace stabsqp
