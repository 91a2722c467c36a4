// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "stabsqp/convex_set.hpp"
#include "stabsqp/hilbert.hpp"
#include "test_support.hpp"

using namespace stabsqp;
using namespace stabsqp::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

struct SetCase {
  const char* name;
  ConvexSet (*make)(Rng&, Index);
  bool dense_ok;
};

ConvexSet make_zero(Rng&, Index n) { return ConvexSet::zero(n); }
ConvexSet make_orthant(Rng&, Index n) { return ConvexSet::orthant(n); }

const SetCase kCases[] = {
    {"zero", make_zero, true},       {"orthant", make_orthant, false}, {"box", random_box, false},
    {"ball", random_ball, true},     {"product", random_product, false},
};

InnerProductSpace space_for(Rng& rng, Index n, bool dense_ok, int variant) {
  if (variant == 0) return InnerProductSpace(n);
  if (variant == 2 && dense_ok) return random_dense_space(rng, n);
  return random_diagonal_space(rng, n);
}

}  // namespace

TEST_CASE("inner product space basics") {
  const InnerProductSpace e(3);
  CHECK(e.kind() == GramKind::kIdentity);
  CHECK(e.norm(vec({3, 4, 0})) == doctest::Approx(5.0));

  const auto w = InnerProductSpace::diagonal(vec({2, 1, 0.5}));
  CHECK(w.inner(vec({1, 1, 1}), vec({1, 2, 4})) == doctest::Approx(2 + 2 + 2));
  CHECK(w.riesz(w.apply_gram(vec({1, -2, 3}))).isApprox(vec({1, -2, 3})));
  CHECK(w.norm(Vector::Zero(3)) == 0.0);
  CHECK(w.block(1, 2).weights().isApprox(vec({1, 0.5})));

  Matrix M(2, 2);
  M << 2, 1, 1, 2;
  const auto d = InnerProductSpace::dense(M);
  CHECK_FALSE(d.is_separable());
  CHECK(d.inner(vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0));
  CHECK(d.riesz(M * vec({0.3, -0.7})).isApprox(vec({0.3, -0.7})));
}

TEST_CASE("inner product space rejects bad Grams") {
  CHECK(throws_code([] { (void)InnerProductSpace::diagonal(vec({1, 0})); }, ErrorCode::kNotPositiveDefinite));
  CHECK(throws_code([] { (void)InnerProductSpace::diagonal(vec({1, -1})); }, ErrorCode::kNotPositiveDefinite));
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK(throws_code([&] { (void)InnerProductSpace::dense(asym); }, ErrorCode::kNotPositiveDefinite));
  Matrix indef(2, 2);
  indef << 1, 2, 2, 1;
  CHECK(throws_code([&] { (void)InnerProductSpace::dense(indef); }, ErrorCode::kNotPositiveDefinite));
  CHECK(throws_code([] { InnerProductSpace(2).check(Vector::Zero(3), "u"); }, ErrorCode::kDimensionMismatch));
  CHECK(throws_code([] { require_finite(vec({1, std::nan("")}), "u"); }, ErrorCode::kNonFinite));
}

TEST_CASE("projection examples") {
  const InnerProductSpace r1(1), r2(2);
  const auto half_line = ConvexSet::box(vec({1}), vec({kInf}));
  CHECK(half_line.project(r1, vec({0}))[0] == 1.0);
  CHECK(ConvexSet::zero(2).project(r2, vec({3, -2})) == Vector::Zero(2));
  const auto unit = ConvexSet::ball(Vector::Zero(2), 1.0);
  CHECK(unit.project(r2, vec({3, 4})).isApprox(vec({0.6, 0.8})));

  CHECK(half_line.dist(r1, vec({0})) == doctest::Approx(1.0));
  CHECK(unit.dist(r2, vec({3, 4})) == doctest::Approx(4.0));
  CHECK(unit.dist(r2, vec({0.1, 0.2})) == 0.0);
  CHECK(ConvexSet::orthant(2).dist(r2, vec({1, 2})) == 0.0);
}

TEST_CASE("normal cone residual examples") {
  const InnerProductSpace r1(1);
  const auto half_line = ConvexSet::box(vec({1}), vec({kInf}));
  CHECK(normal_cone_residual(half_line, r1, vec({1}), vec({-1})) == 0.0);
  CHECK(normal_cone_residual(half_line, r1, vec({2}), vec({-1})) == doctest::Approx(1.0));
  CHECK(normal_cone_residual(half_line, r1, vec({3}), vec({0})) == 0.0);
  const auto unit = ConvexSet::ball(Vector::Zero(2), 1.0);
  CHECK(normal_cone_residual(unit, InnerProductSpace(2), vec({0.2, 0.1}), Vector::Zero(2)) == 0.0);
  CHECK(normal_cone_residual(unit, InnerProductSpace(2), vec({0.6, 0.8}), vec({1.2, 1.6})) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("degenerate boxes encode equalities and free coordinates") {
  const InnerProductSpace r3(3);
  const auto box = ConvexSet::box(vec({2, -kInf, 0}), vec({2, kInf, 1}));
  CHECK(box.project(r3, vec({5, -7, 0.5})).isApprox(vec({2, -7, 0.5})));
  CHECK(box.projection_mask(vec({5, -7, 1})) == vec({0, 1, 1}));
  CHECK(box.is_box_like());
}

TEST_CASE("convex set construction errors") {
  CHECK(throws_code([] { (void)ConvexSet::box(vec({1}), vec({0})); }, ErrorCode::kInvalidArgument));
  CHECK(throws_code([] { (void)ConvexSet::box(vec({1, 2}), vec({3})); }, ErrorCode::kDimensionMismatch));
  CHECK(throws_code([] { (void)ConvexSet::ball(Vector::Zero(2), -1.0); }, ErrorCode::kInvalidArgument));
  CHECK(throws_code([] { (void)ConvexSet::product({}); }, ErrorCode::kInvalidArgument));
  Matrix M(2, 2);
  M << 2, 1, 1, 2;
  const auto dense = InnerProductSpace::dense(M);
  CHECK(throws_code([&] { (void)ConvexSet::orthant(2).project(dense, vec({1, -1})); }, ErrorCode::kUnsupportedGram));
  CHECK(throws_code([] { (void)ConvexSet::orthant(2).project(InnerProductSpace(3), Vector::Zero(3)); },
                    ErrorCode::kDimensionMismatch));
  CHECK(throws_code([] { (void)ConvexSet::ball(Vector::Zero(2), 1).lower_bounds(); }, ErrorCode::kUnsupportedSet));
}

TEST_CASE("ball projection in a dense Gram is radial in that norm") {
  Rng rng(5);
  const auto space = random_dense_space(rng, 3);
  const auto ball = ConvexSet::ball(random_vector(rng, 3), 0.5);
  for (int t = 0; t < 50; ++t) {
    const Vector y = random_vector(rng, 3, 3.0);
    const Vector p = ball.project(space, y);
    const auto& b = std::get<ConvexSet::BallData>(ball.data());
    CHECK(space.norm(p - b.center) <= 0.5 * (1 + 1e-14));
  }
}

TEST_CASE("projection properties over random cases") {
  Rng rng(20260101);
  for (const SetCase& c : kCases) {
    CAPTURE(c.name);
    for (int t = 0; t < 1000; ++t) {
      const Index n = uniform_int(rng, 1, 6);
      const ConvexSet K = c.make(rng, n);
      const InnerProductSpace space = space_for(rng, n, c.dense_ok, t % 3);
      const Vector y = random_vector(rng, n, 2.0), z = random_vector(rng, n, 2.0);
      const Vector py = K.project(space, y), pz = K.project(space, z);

      // nonexpansive
      CHECK(space.norm(py - pz) <= space.norm(y - z) + 1e-10);
      // idempotent, bit for bit
      CHECK(K.project(space, py) == py);
      // variational inequality against members of K
      for (int s = 0; s < 3; ++s) {
        const Vector member = random_member(rng, K, space);
        CHECK(space.inner(y - py, member - py) <= 1e-10);
      }
      // dist is 1-Lipschitz and vanishes on K
      CHECK(std::abs(K.dist(space, y) - K.dist(space, z)) <= space.norm(y - z) + 1e-10);
      CHECK(K.contains(space, py));
      CHECK(K.dist(space, py) <= 1e-12 * (1 + space.norm(py)));
    }
  }
}

TEST_CASE("normal cone characterization round-trip") {
  // For any y and lambda = y_in - P(y_in) with y = P(y_in): lambda in N_K(y).
  Rng rng(77);
  for (const SetCase& c : kCases) {
    CAPTURE(c.name);
    for (int t = 0; t < 200; ++t) {
      const Index n = uniform_int(rng, 1, 6);
      const ConvexSet K = c.make(rng, n);
      const InnerProductSpace space = space_for(rng, n, c.dense_ok, t % 3);
      const Vector w = random_vector(rng, n, 2.0);
      const Vector y = K.project(space, w);
      const Vector lambda = w - y;
      CHECK(normal_cone_residual(K, space, y, lambda) <= 1e-12 * (1 + space.norm(w)));
      // a point outside K never has a zero residual
      if (K.dist(space, w) > 1e-6) CHECK(normal_cone_residual(K, space, w, Vector::Zero(n)) > 0.0);
    }
  }
}

TEST_CASE("convex set JSON round-trip") {
  Rng rng(3);
  for (const SetCase& c : kCases) {
    for (int t = 0; t < 20; ++t) {
      const ConvexSet K = c.make(rng, uniform_int(rng, 1, 5));
      const ConvexSet back = convex_set_from_json(nlohmann::json::parse(convex_set_to_json(K).dump()));
      const InnerProductSpace space(K.dim());
      for (int s = 0; s < 5; ++s) {
        const Vector y = random_vector(rng, K.dim(), 2.0);
        CHECK(back.project(space, y) == K.project(space, y));
      }
    }
  }
  CHECK(vector_to_json(vec({1, kInf, -kInf})).dump() == R"([1.0,"inf","-inf"])");
  CHECK(throws_code([] { (void)convex_set_from_json(nlohmann::json{{"type", "cone"}}); }, ErrorCode::kParse));
}
