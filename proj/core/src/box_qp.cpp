// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/box_qp.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

#include "stabsqp/convex_set.hpp"
#include "stabsqp/error.hpp"

namespace stabsqp {
namespace {

enum class Bound { kFree, kLower, kUpper };

}  // namespace

BoxQpResult solve_box_qp(const Matrix& Q, const Vector& q, const Vector& lower, const Vector& upper,
                         int max_iterations) {
  const Index n = Q.rows();
  if (Q.cols() != n || q.size() != n || lower.size() != n || upper.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "box QP data sizes disagree");
  }
  if (max_iterations < 0) max_iterations = static_cast<int>(10 * n + 100);

  // Start from the projection of the origin; variables sitting on a bound
  // begin in the working set.
  BoxQpResult res;
  res.x = Vector::Zero(n).cwiseMax(lower).cwiseMin(upper);
  std::vector<Bound> state(static_cast<std::size_t>(n), Bound::kFree);
  for (Index i = 0; i < n; ++i) {
    if (res.x[i] == lower[i]) state[i] = Bound::kLower;
    else if (res.x[i] == upper[i]) state[i] = Bound::kUpper;
  }

  for (int it = 0; it < max_iterations; ++it) {
    res.iterations = it + 1;
    const Vector grad = Q * res.x + q;

    std::vector<Index> free;
    for (Index i = 0; i < n; ++i) {
      if (state[i] == Bound::kFree) free.push_back(i);
    }
    const Index nf = static_cast<Index>(free.size());
    Vector p = Vector::Zero(n);
    if (nf > 0) {
      Matrix Qff(nf, nf);
      Vector gf(nf);
      for (Index a = 0; a < nf; ++a) {
        gf[a] = grad[free[a]];
        for (Index b = 0; b < nf; ++b) Qff(a, b) = Q(free[a], free[b]);
      }
      Eigen::LLT<Matrix> llt(Qff);
      if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNotPositiveDefinite, "box QP Hessian block");
      const Vector pf = llt.solve(-gf);
      for (Index a = 0; a < nf; ++a) p[free[a]] = pf[a];
    }

    const double step_tol = 1e-14 * (1.0 + res.x.lpNorm<Eigen::Infinity>());
    if (p.lpNorm<Eigen::Infinity>() <= step_tol) {
      // Multiplier test: at a lower bound the gradient must be >= 0, at an
      // upper bound <= 0. Release the worst violator.
      Index worst = -1;
      double worst_val = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (lower[i] == upper[i]) continue;
        double viol = 0.0;
        if (state[i] == Bound::kLower) viol = -grad[i];
        else if (state[i] == Bound::kUpper) viol = grad[i];
        if (viol > worst_val) {
          worst_val = viol;
          worst = i;
        }
      }
      if (worst < 0 || worst_val <= 1e-13 * (1.0 + grad.lpNorm<Eigen::Infinity>())) {
        res.converged = true;
        res.eta = -grad;
        for (Index i = 0; i < n; ++i) {
          if (state[i] == Bound::kFree) res.eta[i] = 0.0;
        }
        return res;
      }
      state[worst] = Bound::kFree;
      continue;
    }

    double alpha = 1.0;
    Index blocking = -1;
    Bound blocking_side = Bound::kFree;
    for (Index i = 0; i < n; ++i) {
      if (state[i] != Bound::kFree) continue;
      if (p[i] < 0.0 && std::isfinite(lower[i])) {
        const double a = (lower[i] - res.x[i]) / p[i];
        if (a < alpha) {
          alpha = a;
          blocking = i;
          blocking_side = Bound::kLower;
        }
      } else if (p[i] > 0.0 && std::isfinite(upper[i])) {
        const double a = (upper[i] - res.x[i]) / p[i];
        if (a < alpha) {
          alpha = a;
          blocking = i;
          blocking_side = Bound::kUpper;
        }
      }
    }
    res.x += std::max(alpha, 0.0) * p;
    res.x = res.x.cwiseMax(lower).cwiseMin(upper);
    if (blocking >= 0) {
      state[blocking] = blocking_side;
      res.x[blocking] = blocking_side == Bound::kLower ? lower[blocking] : upper[blocking];
    }
  }
  res.eta = -(Q * res.x + q);
  return res;
}

}  // namespace stabsqp
