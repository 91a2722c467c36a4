// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test problems with reference KKT points. References always come from the
// box-QP active-set solver (or closed forms), never from the SQP code.
//
// Discretizations use N interior nodes of (0, 1), h = 1/(N+1), the Dirichlet
// finite-difference Laplacian A = tridiag(-1, 2, -1)/h^2 and the lumped mass
// Gram h*I on every discretized space.

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabsqp/problem.hpp"

namespace stabsqp {

enum class InstanceFamily { kScalarToy, kQuadraticBox, kRedundantEquality, kObstacle1D, kControlLQ };

[[nodiscard]] std::string_view to_string(InstanceFamily family);
[[nodiscard]] InstanceFamily family_from_string(std::string_view name);

/// Serializable scalar profile t -> value on [0, 1].
struct Profile {
  enum class Kind { kConstant, kParabola, kSine, kInfinite };
  Kind kind = Kind::kConstant;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  /// constant: a; parabola: a + b (t - c)^2; sine: a sin(b pi t) + c; infinite: +inf
  [[nodiscard]] double operator()(double t) const;

  static Profile constant(double value) { return {Kind::kConstant, value, 0.0, 0.0}; }
  static Profile parabola(double base, double curvature, double center) {
    return {Kind::kParabola, base, curvature, center};
  }
  static Profile sine(double amplitude, double frequency, double offset) {
    return {Kind::kSine, amplitude, frequency, offset};
  }
  static Profile infinite() { return {Kind::kInfinite, 0.0, 0.0, 0.0}; }
};

[[nodiscard]] nlohmann::json profile_to_json(const Profile& p);
[[nodiscard]] Profile profile_from_json(const nlohmann::json& j);

/// f(x) = x^2/2, G(x) = x, K = [1, inf). Reference (1, -1).
[[nodiscard]] ProblemOracles make_scalar_toy();

/// Membrane below an obstacle: f(u) = (Au, u)/2 - (b, u) in the mass inner
/// product, G(u) = u, K = {u <= psi}. Reference cached for N <= 64.
[[nodiscard]] ProblemOracles make_obstacle_1d(int N, const std::function<double(double)>& obstacle,
                                              const std::function<double(double)>& load);

/// Control-constrained tracking: x = (y, u),
/// f = ||y - y_d||^2/2 + alpha ||u||^2/2, G(y, u) = (Ay - u, u),
/// K = {0}^N x [lower, upper]^N. Reference cached for N <= 64.
[[nodiscard]] ProblemOracles make_control_lq(int N, double alpha, double lower, double upper,
                                             const std::function<double(double)>& target);

/// f(x) = ||x||^2/2 - x_1 with the constraint c(x) = x_1 - 1 = 0 imposed twice,
/// as c and c + c^2. Both rows have gradient e_1 at the solution e_1, so the
/// multipliers form the line lambda_1 + lambda_2 = 0, while away from it the
/// linearized pair is inconsistent.
[[nodiscard]] ProblemOracles make_redundant_equality(int n);

struct QuadraticBoxParams {
  int n = 6;
  /// 0: G(x) = x with a random box in R^n (reference computed).
  /// > 0: G(x) = Bx + c with random B in R^{m x n}; no reference.
  int m = 0;
  unsigned seed = 1;
};

/// Random strongly convex f(x) = x^T Q x/2 + q^T x with random box bounds.
[[nodiscard]] ProblemOracles make_quadratic_box(const QuadraticBoxParams& params);

struct InstanceSpec {
  std::string name;
  InstanceFamily family = InstanceFamily::kScalarToy;
  /// Family-specific parameters; absent keys take defaults.
  nlohmann::json parameters = nlohmann::json::object();
};

struct Instance {
  InstanceSpec spec;
  ProblemOracles problem;
  PrimalDual default_start;
  std::string provenance;
};

/// Builds the instance; spec.parameters are merged over the family defaults
/// and the merged record is stored back into the returned spec.
[[nodiscard]] Instance make_instance(const InstanceSpec& spec);

/// Spec with default parameters for one of: scalar-toy, quadratic-box,
/// redundant-equality, obstacle-1d, control-lq.
[[nodiscard]] InstanceSpec default_spec(std::string_view name);

/// Every named instance with its default parameters.
[[nodiscard]] std::vector<InstanceSpec> catalog();

[[nodiscard]] nlohmann::json spec_to_json(const InstanceSpec& spec);
/// Accepts {"name": ..., "params"|"parameters": {...}}; family is inferred
/// from the name when absent.
[[nodiscard]] InstanceSpec spec_from_json(const nlohmann::json& j);

}  // namespace stabsqp
