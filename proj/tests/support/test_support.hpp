// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Random generators shared by the unit and acceptance tests.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "stabsqp/convex_set.hpp"
#include "stabsqp/error.hpp"
#include "stabsqp/hilbert.hpp"
#include "stabsqp/problem.hpp"

namespace stabsqp::testing {

using Rng = std::mt19937_64;

inline Vector random_vector(Rng& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline InnerProductSpace random_diagonal_space(Rng& rng, Index n) {
  Vector w(n);
  for (Index i = 0; i < n; ++i) w[i] = uniform(rng, 0.1, 3.0);
  return InnerProductSpace::diagonal(w);
}

inline InnerProductSpace random_dense_space(Rng& rng, Index n) {
  Matrix R(n, n);
  for (Index j = 0; j < n; ++j) R.col(j) = random_vector(rng, n);
  return InnerProductSpace::dense(R.transpose() * R / static_cast<double>(n) + 0.3 * Matrix::Identity(n, n));
}

/// Mix of two-sided, one-sided, free and fixed coordinates.
inline ConvexSet random_box(Rng& rng, Index n) {
  Vector lo(n), hi(n);
  for (Index i = 0; i < n; ++i) {
    const double c = uniform(rng, -1.0, 1.0), a = uniform(rng, 0.05, 1.0), r = uniform(rng, 0.0, 1.0);
    if (r < 0.4) {
      lo[i] = c - a;
      hi[i] = c + a;
    } else if (r < 0.6) {
      lo[i] = c;
      hi[i] = kInf;
    } else if (r < 0.8) {
      lo[i] = -kInf;
      hi[i] = c;
    } else if (r < 0.9) {
      lo[i] = -kInf;
      hi[i] = kInf;
    } else {
      lo[i] = hi[i] = c;
    }
  }
  return ConvexSet::box(lo, hi);
}

inline ConvexSet random_ball(Rng& rng, Index n) { return ConvexSet::ball(random_vector(rng, n), uniform(rng, 0.1, 2.0)); }

inline ConvexSet random_product(Rng& rng, Index n) {
  std::vector<ConvexSet> blocks;
  Index used = 0;
  while (used < n) {
    const Index size = std::min<Index>(n - used, uniform_int(rng, 1, 3));
    switch (uniform_int(rng, 0, 2)) {
      case 0: blocks.push_back(ConvexSet::zero(size)); break;
      case 1: blocks.push_back(ConvexSet::orthant(size)); break;
      default: blocks.push_back(random_box(rng, size)); break;
    }
    used += size;
  }
  return ConvexSet::product(std::move(blocks));
}

/// A point of K: the projection of a random point.
inline Vector random_member(Rng& rng, const ConvexSet& K, const InnerProductSpace& space) {
  return K.project(space, random_vector(rng, K.dim(), 2.0));
}

inline PrimalDual random_point(Rng& rng, const ProblemOracles& p, double scale = 1.0) {
  return {random_vector(rng, p.x_space.dim(), scale), random_vector(rng, p.y_space.dim(), scale)};
}

/// ref + delta with ||delta||_V == radius exactly.
inline PrimalDual perturb(Rng& rng, const ProblemOracles& p, const PrimalDual& ref, double radius) {
  PrimalDual delta = random_point(rng, p);
  const double scale = radius / norm(p, delta);
  return {ref.x + scale * delta.x, ref.lambda + scale * delta.lambda};
}

/// True iff f throws stabsqp::Error with the given code.
template <typename F>
bool throws_code(F&& f, ErrorCode code) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace stabsqp::testing
