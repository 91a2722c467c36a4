// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed convex sets K with exact metric projections. Box-like sets (zero,
// orthant, box and products of these) project coordinatewise and therefore
// require a separable (identity or diagonal) Gram. Balls project radially in
// whatever norm the space carries.

#pragma once

#include <limits>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stabsqp/hilbert.hpp"

namespace stabsqp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SetKind { kZero, kOrthant, kBox, kBall, kProduct };

class ConvexSet {
 public:
  struct ZeroData {
    Index dim;
  };
  struct OrthantData {
    Index dim;
  };
  struct BoxData {
    Vector lower;
    Vector upper;
  };
  struct BallData {
    Vector center;
    double radius;
  };
  struct ProductData {
    std::vector<ConvexSet> blocks;
  };

  /// {0} in R^dim.
  static ConvexSet zero(Index dim);
  /// Nonnegative orthant of R^dim.
  static ConvexSet orthant(Index dim);
  /// lower <= y <= upper with +-kInf allowed; lower == upper encodes equalities.
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet box(Index dim, double lower, double upper);
  static ConvexSet ball(Vector center, double radius);
  /// Concatenation of blocks over consecutive coordinate ranges.
  static ConvexSet product(std::vector<ConvexSet> blocks);

  [[nodiscard]] Index dim() const noexcept { return dim_; }
  [[nodiscard]] SetKind kind() const noexcept;

  /// True for zero/orthant/box and products made only of those.
  [[nodiscard]] bool is_box_like() const;

  [[nodiscard]] Vector project(const InnerProductSpace& space, const Vector& y) const;
  [[nodiscard]] double dist(const InnerProductSpace& space, const Vector& y) const;

  /// dist(y) <= tol; a negative tol selects the default 1e-12 * (1 + ||y||).
  [[nodiscard]] bool contains(const InnerProductSpace& space, const Vector& y, double tol = -1.0) const;

  /// Coordinate bounds of a box-like set (throws UnsupportedSet otherwise).
  [[nodiscard]] Vector lower_bounds() const;
  [[nodiscard]] Vector upper_bounds() const;

  /// Diagonal of an element of the generalized derivative of the projection
  /// at y: 1 where the coordinate passes through, 0 where it is clamped.
  /// Points exactly on a bound take the pass-through branch; coordinates
  /// with lower == upper always take 0.
  [[nodiscard]] Vector projection_mask(const Vector& y) const;

  [[nodiscard]] const std::variant<ZeroData, OrthantData, BoxData, BallData, ProductData>& data() const noexcept {
    return data_;
  }

 private:
  using Data = std::variant<ZeroData, OrthantData, BoxData, BallData, ProductData>;

  ConvexSet(Index dim, Data data) : dim_(dim), data_(std::move(data)) {}

  void project_into(const Vector& weights, const Vector& y, Index offset, Vector& out) const;
  void check_space(const InnerProductSpace& space, const Vector& y) const;

  Index dim_;
  Data data_;
};

/// ||y - P_K(y + lambda)||: zero iff y in K and lambda in N_K(y).
[[nodiscard]] double normal_cone_residual(const ConvexSet& set, const InnerProductSpace& space,
                                          const Vector& y, const Vector& lambda);

[[nodiscard]] nlohmann::json convex_set_to_json(const ConvexSet& set);
[[nodiscard]] ConvexSet convex_set_from_json(const nlohmann::json& j);

/// Real vector <-> JSON array with "inf"/"-inf" strings for infinities.
[[nodiscard]] nlohmann::json vector_to_json(const Vector& v);
[[nodiscard]] Vector vector_from_json(const nlohmann::json& j);

}  // namespace stabsqp
