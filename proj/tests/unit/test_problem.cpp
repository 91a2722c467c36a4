// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "stabsqp/instances.hpp"
#include "stabsqp/problem.hpp"
#include "test_support.hpp"

using namespace stabsqp;
using namespace stabsqp::testing;

namespace {

PrimalDual pd(double x, double lambda) { return {Vector::Constant(1, x), Vector::Constant(1, lambda)}; }

}  // namespace

TEST_CASE("scalar toy: Lagrangian, gradient and sigma by hand") {
  const ProblemOracles p = make_scalar_toy();
  CHECK(lagrangian(p, pd(2, -1)) == doctest::Approx(0.0));
  CHECK(lagrangian(p, pd(3, 0)) == doctest::Approx(p.f(Vector::Constant(1, 3.0))));
  CHECK(lagrangian_grad(p, pd(2, -1))[0] == doctest::Approx(1.0));
  CHECK(lagrangian_grad(p, pd(2, 0))[0] == doctest::Approx(2.0));

  CHECK(sigma(p, pd(1, -1)) == 0.0);
  CHECK(std::abs(sigma(p, pd(2, -1)) - 2.0) <= 1e-12);
  CHECK(std::abs(sigma(p, pd(2, 0)) - 2.0) <= 1e-12);
}

TEST_CASE("kkt_check") {
  const ProblemOracles p = make_scalar_toy();
  CHECK(kkt_check(p, pd(1, -1), 1e-12).is_kkt);
  const KktCheck c = kkt_check(p, pd(2, -1), 1e-8);
  CHECK_FALSE(c.is_kkt);
  CHECK(c.stationarity == doctest::Approx(1.0));
  CHECK(c.complementarity == doctest::Approx(1.0));
  CHECK(kkt_check(p, pd(7, 3), std::numeric_limits<double>::infinity()).is_kkt);
  CHECK(throws_code([&] { (void)kkt_check(p, pd(1, -1), 0.0); }, ErrorCode::kInvalidArgument));
}

TEST_CASE("reference points of every catalog instance are KKT points") {
  for (const InstanceSpec& spec : catalog()) {
    CAPTURE(spec.name);
    const Instance inst = make_instance(spec);
    REQUIRE(inst.problem.reference_kkt);
    const PrimalDual& ref = *inst.problem.reference_kkt;
    CHECK(sigma(inst.problem, ref) <= 1e-10 * (1 + norm(inst.problem, ref)));
    CHECK(kkt_check(inst.problem, ref, 1e-10).is_kkt);
    CHECK(inst.problem.x_space.norm(lagrangian_grad(inst.problem, ref)) <= 1e-10 * (1 + norm(inst.problem, ref)));
  }
}

TEST_CASE("oracle consistency for every catalog instance") {
  Rng rng(11);
  for (const InstanceSpec& spec : catalog()) {
    CAPTURE(spec.name);
    const Instance inst = make_instance(spec);
    const ProblemOracles& p = inst.problem;
    for (int t = 0; t < 10; ++t) {
      const PrimalDual v = random_point(rng, p, 0.5);
      const Vector d = random_vector(rng, p.x_space.dim());
      const Vector e = random_vector(rng, p.x_space.dim());
      CHECK(adjoint_error(p, v.x, d, v.lambda) <= 1e-12);
      CHECK(hessian_symmetry_error(p, v, d, e) <= 1e-10);
      CHECK(gradient_fd_error(p, v.x, d) <= 1e-6);
    }
  }
}

TEST_CASE("finite-difference Hessian fallback matches the exact product") {
  const Instance inst = make_instance(default_spec("redundant-equality"));
  ProblemOracles fd = inst.problem;
  fd.hess_lagrangian_apply = nullptr;
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const PrimalDual v = random_point(rng, fd);
    const Vector d = random_vector(rng, fd.x_space.dim());
    const Vector exact = hessian_apply(inst.problem, v, d);
    CHECK((hessian_apply(fd, v, d) - exact).norm() <= 1e-6 * (1 + exact.norm()));
  }
}

TEST_CASE("sigma is Lipschitz near the reference") {
  Rng rng(4);
  for (const char* name : {"scalar-toy", "quadratic-box", "obstacle-1d", "control-lq"}) {
    CAPTURE(name);
    const Instance inst = make_instance(default_spec(name));
    const ProblemOracles& p = inst.problem;
    const PrimalDual& ref = *p.reference_kkt;
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      auto near = [&] {
        PrimalDual v = ref;
        v.x += random_vector(rng, p.x_space.dim(), 1e-4);
        v.lambda += random_vector(rng, p.y_space.dim(), 1e-4);
        return v;
      };
      const PrimalDual a = near(), b = near();
      worst = std::max(worst, std::abs(sigma(p, a) - sigma(p, b)) / distance(p, a, b));
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 1e6);
  }
}

TEST_CASE("problem validation") {
  ProblemOracles p = make_scalar_toy();
  CHECK(throws_code([&] { p.check_point({Vector::Zero(2), Vector::Zero(1)}); }, ErrorCode::kDimensionMismatch));
  CHECK(throws_code([&] { p.check_point(pd(std::nan(""), 0)); }, ErrorCode::kNonFinite));
  p.G = nullptr;
  CHECK(throws_code([&] { p.validate(); }, ErrorCode::kInvalidArgument));
  CHECK(throws_code([] { ProblemOracles("bad", InnerProductSpace(1), InnerProductSpace(2), ConvexSet::zero(3)); },
                    ErrorCode::kDimensionMismatch));
}

TEST_CASE("dense coordinate matrices agree with the oracles") {
  const Instance inst = make_instance(default_spec("control-lq"));
  const ProblemOracles& p = inst.problem;
  Rng rng(9);
  const PrimalDual v = random_point(rng, p);
  const Vector d = random_vector(rng, p.x_space.dim());
  const Vector l = random_vector(rng, p.y_space.dim());
  CHECK((jacobian_matrix(p, v.x) * d - p.jac_apply(v.x, d)).norm() <= 1e-9 * (1 + d.norm()));
  CHECK((jacobian_adjoint_matrix(p, v.x) * l - p.jac_adjoint_apply(v.x, l)).norm() <= 1e-9 * (1 + l.norm()));
  CHECK((hessian_matrix(p, v) * d - hessian_apply(p, v, d)).norm() <= 1e-9 * (1 + d.norm()));
}
