// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "stabsqp/instances.hpp"
#include "stabsqp/subproblem.hpp"
#include "test_support.hpp"

using namespace stabsqp;
using namespace stabsqp::testing;

namespace {

PrimalDual pd(double x, double lambda) { return {Vector::Constant(1, x), Vector::Constant(1, lambda)}; }

double dist_v(const ProblemOracles& p, const Vector& d1, const Vector& m1, const Vector& d2, const Vector& m2) {
  return p.x_space.norm(d1 - d2) + p.y_space.norm(m1 - m2);
}

}  // namespace

TEST_CASE("feasible_init on the scalar toy") {
  const ProblemOracles p = make_scalar_toy();
  const StabilizedSubproblem sub(p, pd(2, -1), 1e-12);
  CHECK(sub.sigma() == doctest::Approx(2.0));
  const SubproblemPoint init = feasible_init(sub);
  CHECK(init.d[0] == 0.0);
  CHECK(init.mu[0] == doctest::Approx(-0.5));
  CHECK(sub.constraint_value(init.d, init.mu)[0] == doctest::Approx(1.0));
}

TEST_CASE("feasible_init lands in K") {
  Rng rng(8);
  for (const InstanceSpec& spec : catalog()) {
    CAPTURE(spec.name);
    const Instance inst = make_instance(spec);
    const ProblemOracles& p = inst.problem;
    for (int t = 0; t < 5; ++t) {
      const PrimalDual v = random_point(rng, p, 0.3);
      const StabilizedSubproblem sub(p, v, 1e-10);
      const SubproblemPoint init = feasible_init(sub);
      CHECK(init.d.isZero());
      const Vector w = sub.constraint_value(init.d, init.mu);
      CHECK(p.K.dist(p.y_space, w) <= 1e-10 * (1 + p.y_space.norm(w)));
    }
  }
  // zero set: mu = G/sigma + lambda and the constraint value vanishes
  const Instance red = make_instance(default_spec("redundant-equality"));
  const StabilizedSubproblem sub(red.problem, red.default_start, 1e-10);
  const SubproblemPoint init = feasible_init(sub);
  const Vector G = red.problem.G(red.default_start.x);
  CHECK((init.mu - (G / sub.sigma() + red.default_start.lambda)).norm() <= 1e-14);
  CHECK(sub.constraint_value(init.d, init.mu).norm() <= 1e-14);
}

TEST_CASE("residual map vanishes at the hand-solved point") {
  const ProblemOracles p = make_scalar_toy();
  const StabilizedSubproblem sub(p, pd(2, -1), 1e-12);
  const Vector r = kkt_residual_map(sub, Vector::Constant(1, -1.0), Vector::Constant(1, -1.0));
  CHECK(r.norm() == 0.0);
  CHECK(residual_norm(p, r) == 0.0);
}

TEST_CASE("residual map vanishes at (0, lambda) when v is KKT for the linearization") {
  // At the reference, L_x = 0 and G = P_K(G + lambda): the weight is supplied
  // because sigma itself vanishes there.
  for (const char* name : {"scalar-toy", "quadratic-box", "obstacle-1d", "control-lq"}) {
    CAPTURE(name);
    const Instance inst = make_instance(default_spec(name));
    const PrimalDual& ref = *inst.problem.reference_kkt;
    const auto sub = StabilizedSubproblem::with_weight(inst.problem, ref, 0.1, 1e-12);
    const Vector r = kkt_residual_map(sub, Vector::Zero(ref.x.size()), ref.lambda);
    CHECK(residual_norm(inst.problem, r) <= 1e-9 * (1 + norm(inst.problem, ref)));
  }
}

TEST_CASE("solve_stabilized on the scalar toy gives the exact KKT step") {
  const ProblemOracles p = make_scalar_toy();
  const StabilizedSubproblem sub(p, pd(2, -1), 1e-12);
  const SubproblemSolution sol = solve_stabilized(sub);
  REQUIRE(sol.status == SubproblemStatus::kConverged);
  CHECK(sol.d[0] == doctest::Approx(-1.0));
  CHECK(sol.mu[0] == doctest::Approx(-1.0));
  CHECK(sol.rho == sol.mu);
  CHECK(sol.residual <= sol.tolerance);

  const SubproblemSolution oracle = brute_force_oracle(sub);
  REQUIRE(oracle.status == SubproblemStatus::kConverged);
  CHECK(oracle.d[0] == doctest::Approx(-1.0));
  CHECK(oracle.mu[0] == doctest::Approx(-1.0));
}

TEST_CASE("Newton matches the enumeration oracle on random box-QP subproblems") {
  Rng rng(1234);
  int compared = 0;
  for (int t = 0; t < 200; ++t) {
    QuadraticBoxParams params;
    params.n = uniform_int(rng, 1, 6);
    params.m = uniform_int(rng, 0, 6);
    params.seed = static_cast<unsigned>(rng());
    const ProblemOracles p = make_quadratic_box(params);
    const PrimalDual v = random_point(rng, p);
    const StabilizedSubproblem sub(p, v, 1e-12);
    const SubproblemSolution newton = solve_stabilized(sub);
    const SubproblemSolution oracle = brute_force_oracle(sub);
    REQUIRE(oracle.status == SubproblemStatus::kConverged);
    REQUIRE(newton.status == SubproblemStatus::kConverged);
    ++compared;
    const double gap = dist_v(p, newton.d, newton.mu, oracle.d, oracle.mu);
    const bool same_point = gap <= 1e-7;
    const bool same_value = std::abs(newton.objective - oracle.objective) <= 1e-9 * (1 + std::abs(oracle.objective));
    CHECK((same_point || same_value));

    // stabilized constraint feasible, rho = mu, merit nonincreasing
    const Vector w = sub.constraint_value(newton.d, newton.mu);
    CHECK(p.K.dist(p.y_space, w) <= 10 * std::max(newton.tolerance, 1e-12) * (1 + p.y_space.norm(w)));
    CHECK(newton.rho == newton.mu);
    for (std::size_t i = 1; i < newton.merit_history.size(); ++i) {
      CHECK(newton.merit_history[i] <= newton.merit_history[i - 1]);
    }
  }
  CHECK(compared == 200);
}

TEST_CASE("ball safeguard only flags") {
  const ProblemOracles p = make_scalar_toy();
  const StabilizedSubproblem sub(p, pd(2, -1), 1e-12, 0.5);
  const SubproblemSolution sol = solve_stabilized(sub);
  CHECK(sol.status == SubproblemStatus::kConverged);
  CHECK(sol.hit_ball);
  CHECK(std::abs(sol.d[0]) >= 0.999 * 0.5);
  const StabilizedSubproblem roomy(p, pd(2, -1), 1e-12, 10.0);
  CHECK_FALSE(solve_stabilized(roomy).hit_ball);
}

TEST_CASE("subproblem construction errors") {
  const ProblemOracles p = make_scalar_toy();
  CHECK(throws_code([&] { (void)StabilizedSubproblem(p, pd(1, -1), 1e-12); }, ErrorCode::kKktPoint));
  CHECK(throws_code([&] { (void)StabilizedSubproblem(p, pd(2, -1), -1.0); }, ErrorCode::kInvalidArgument));
  CHECK(throws_code([&] { (void)StabilizedSubproblem(p, pd(2, -1), 1e-12, 0.0); }, ErrorCode::kInvalidArgument));
  CHECK(throws_code([&] { (void)solve_stabilized(StabilizedSubproblem(p, pd(2, -1), 0.0)); },
                    ErrorCode::kInvalidArgument));

  ProblemOracles ball("ball", InnerProductSpace(1), InnerProductSpace(1), ConvexSet::ball(Vector::Zero(1), 1.0));
  ball.f = p.f;
  ball.grad_f = p.grad_f;
  ball.G = p.G;
  ball.jac_apply = p.jac_apply;
  ball.jac_adjoint_apply = p.jac_adjoint_apply;
  CHECK(throws_code([&] { (void)solve_stabilized(StabilizedSubproblem(ball, pd(2, 0), 1e-12)); },
                    ErrorCode::kUnsupportedSet));

  const ProblemOracles big = make_quadratic_box({3, 13, 1});
  Rng rng(1);
  CHECK(throws_code([&] { (void)brute_force_oracle(StabilizedSubproblem(big, random_point(rng, big), 1e-12)); },
                    ErrorCode::kTooLarge));
}

TEST_CASE("ordinary subproblem") {
  const ProblemOracles p = make_scalar_toy();
  SubproblemSolution sol = solve_ordinary(p, pd(2, -1), 1e-12);
  REQUIRE(sol.status == SubproblemStatus::kConverged);
  CHECK(sol.d[0] == doctest::Approx(-1.0));
  CHECK(sol.mu[0] <= 0.0);

  sol = solve_ordinary(p, pd(3, 0), 1e-12);
  CHECK(sol.status == SubproblemStatus::kConverged);

  // at a KKT point d = 0 solves the linearization
  const Instance box = make_instance(default_spec("quadratic-box"));
  sol = solve_ordinary(box.problem, *box.problem.reference_kkt, 1e-12);
  REQUIRE(sol.status == SubproblemStatus::kConverged);
  CHECK(box.problem.x_space.norm(sol.d) <= 1e-10);

  // inconsistent linearization of the doubled constraint
  const Instance red = make_instance(default_spec("redundant-equality"));
  CHECK(linearized_feasibility_gap(red.problem, red.default_start.x) > 1e-6);
  CHECK(solve_ordinary(red.problem, red.default_start, 1e-12).status == SubproblemStatus::kInfeasible);
  CHECK(linearized_feasibility_gap(p, Vector::Constant(1, 0.0)) <= 1e-12);
}
