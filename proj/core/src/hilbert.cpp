// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/hilbert.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "stabsqp/error.hpp"

namespace stabsqp {

struct InnerProductSpace::DenseData {
  Matrix gram;
  Eigen::LLT<Matrix> llt;
};

InnerProductSpace::InnerProductSpace(Index dim) : dim_(dim), kind_(GramKind::kIdentity) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "space dimension must be positive");
}

InnerProductSpace InnerProductSpace::diagonal(Vector weights) {
  if (weights.size() <= 0) throw Error(ErrorCode::kInvalidArgument, "space dimension must be positive");
  for (Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] <= 0.0) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "diagonal Gram weight " + std::to_string(i) + " is not positive");
    }
  }
  InnerProductSpace s(weights.size(), GramKind::kDiagonal);
  s.diag_ = std::make_shared<const Vector>(std::move(weights));
  return s;
}

InnerProductSpace InnerProductSpace::dense(Matrix gram) {
  if (gram.rows() <= 0 || gram.rows() != gram.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "dense Gram must be square and nonempty");
  }
  if (!gram.allFinite()) throw Error(ErrorCode::kNonFinite, "dense Gram has non-finite entries");
  const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + gram.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kNotPositiveDefinite, "dense Gram is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNotPositiveDefinite, "dense Gram has a nonpositive eigenvalue");
  }
  InnerProductSpace s(gram.rows(), GramKind::kDense);
  auto data = std::make_shared<DenseData>();
  data->gram = std::move(gram);
  data->llt.compute(data->gram);
  s.dense_ = std::move(data);
  return s;
}

void InnerProductSpace::check(const Vector& u, const char* what) const {
  if (u.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": expected dimension " +
                                                   std::to_string(dim_) + ", got " +
                                                   std::to_string(u.size()));
  }
}

double InnerProductSpace::inner(const Vector& u, const Vector& v) const {
  check(u, "inner");
  check(v, "inner");
  switch (kind_) {
    case GramKind::kIdentity: return u.dot(v);
    case GramKind::kDiagonal: return u.dot(diag_->cwiseProduct(v));
    case GramKind::kDense: return u.dot(dense_->gram * v);
  }
  return 0.0;
}

double InnerProductSpace::norm(const Vector& u) const {
  if (kind_ == GramKind::kIdentity) {
    check(u, "norm");
    return u.norm();
  }
  return std::sqrt(std::max(0.0, inner(u, u)));
}

Vector InnerProductSpace::apply_gram(const Vector& u) const {
  check(u, "apply_gram");
  switch (kind_) {
    case GramKind::kIdentity: return u;
    case GramKind::kDiagonal: return diag_->cwiseProduct(u);
    case GramKind::kDense: return dense_->gram * u;
  }
  return u;
}

Vector InnerProductSpace::riesz(const Vector& u) const {
  check(u, "riesz");
  switch (kind_) {
    case GramKind::kIdentity: return u;
    case GramKind::kDiagonal: return u.cwiseQuotient(*diag_);
    case GramKind::kDense: return dense_->llt.solve(u);
  }
  return u;
}

Vector InnerProductSpace::weights() const {
  switch (kind_) {
    case GramKind::kIdentity: return Vector::Ones(dim_);
    case GramKind::kDiagonal: return *diag_;
    case GramKind::kDense: return dense_->gram.diagonal();
  }
  return Vector::Ones(dim_);
}

InnerProductSpace InnerProductSpace::block(Index offset, Index size) const {
  if (offset < 0 || size <= 0 || offset + size > dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "block out of range");
  }
  switch (kind_) {
    case GramKind::kIdentity: return InnerProductSpace(size);
    case GramKind::kDiagonal: return diagonal(diag_->segment(offset, size));
    case GramKind::kDense: break;
  }
  throw Error(ErrorCode::kUnsupportedGram, "cannot restrict a dense Gram to a coordinate block");
}

Matrix InnerProductSpace::gram_matrix() const {
  switch (kind_) {
    case GramKind::kIdentity: return Matrix::Identity(dim_, dim_);
    case GramKind::kDiagonal: return diag_->asDiagonal();
    case GramKind::kDense: return dense_->gram;
  }
  return Matrix::Identity(dim_, dim_);
}

void require_finite(const Vector& u, const char* what) {
  if (!u.allFinite()) throw Error(ErrorCode::kNonFinite, std::string(what) + " has non-finite entries");
}

}  // namespace stabsqp
