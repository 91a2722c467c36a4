// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Finite-dimensional inner-product spaces R^n with (u, v) = u^T M v for a
// symmetric positive-definite Gram matrix M. Discretized L^2 spaces use a
// diagonal (lumped mass) Gram; the Euclidean case is M = I.

#pragma once

#include <memory>

#include <Eigen/Core>

namespace stabsqp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class GramKind { kIdentity, kDiagonal, kDense };

class InnerProductSpace {
 public:
  /// Euclidean R^dim.
  explicit InnerProductSpace(Index dim);

  /// Diagonal Gram; every weight must be finite and > 0.
  static InnerProductSpace diagonal(Vector weights);

  /// Dense symmetric positive-definite Gram, checked by eigen-decomposition.
  static InnerProductSpace dense(Matrix gram);

  [[nodiscard]] Index dim() const noexcept { return dim_; }
  [[nodiscard]] GramKind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_separable() const noexcept { return kind_ != GramKind::kDense; }

  [[nodiscard]] double inner(const Vector& u, const Vector& v) const;
  [[nodiscard]] double norm(const Vector& u) const;

  /// Mu
  [[nodiscard]] Vector apply_gram(const Vector& u) const;
  /// M^{-1}u, i.e. the Riesz representative of the functional u^T(.)
  [[nodiscard]] Vector riesz(const Vector& u) const;

  /// Per-coordinate weights (all ones for the identity Gram). Only
  /// meaningful for separable spaces.
  [[nodiscard]] Vector weights() const;

  /// Restriction of a separable space to coordinates [offset, offset+size).
  [[nodiscard]] InnerProductSpace block(Index offset, Index size) const;

  [[nodiscard]] Matrix gram_matrix() const;

  /// Throws DimensionMismatch unless u.size() == dim().
  void check(const Vector& u, const char* what) const;

 private:
  struct DenseData;

  InnerProductSpace(Index dim, GramKind kind) : dim_(dim), kind_(kind) {}

  Index dim_;
  GramKind kind_;
  std::shared_ptr<const Vector> diag_;
  std::shared_ptr<const DenseData> dense_;
};

/// Throws NonFinite if any coefficient is NaN or infinite.
void require_finite(const Vector& u, const char* what);

}  // namespace stabsqp
