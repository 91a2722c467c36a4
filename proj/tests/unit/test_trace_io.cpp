// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stabsqp/driver.hpp"
#include "stabsqp/instances.hpp"
#include "stabsqp/trace_io.hpp"
#include "test_support.hpp"

using namespace stabsqp;
using namespace stabsqp::testing;

namespace {

SolveResult solve_obstacle(bool timing) {
  const Instance inst = make_instance(InstanceSpec{"obstacle-1d", InstanceFamily::kObstacle1D, {{"N", 32}}});
  SolverOptions o;
  o.record_timing = timing;
  return run_stabilized_sqp(inst.problem, inst.default_start, o);
}

}  // namespace

TEST_CASE("CSV layout") {
  const Instance inst = make_instance(default_spec("scalar-toy"));
  SolverOptions o;
  o.record_timing = false;
  const SolveResult res = run_stabilized_sqp(inst.problem, inst.default_start, o);
  std::ostringstream os;
  write_trace_csv(res.trace, os, {{"run", "7"}});
  CHECK(os.str() ==
        "k,sigma,step_norm,d_norm,mu_step_norm,sub_residual,sub_iters,sub_status,err_to_ref,wall_ms,run\n"
        "0,2,1,1,0,0,1,Converged,1,0,7\n"
        "1,0,,,,,,,0,0,7\n");
}

TEST_CASE("traces are bit-exact across reruns without timing") {
  std::ostringstream a, b;
  write_trace_csv(solve_obstacle(false).trace, a);
  write_trace_csv(solve_obstacle(false).trace, b);
  CHECK(a.str() == b.str());
  CHECK(trace_to_json(solve_obstacle(false).trace).dump() == trace_to_json(solve_obstacle(false).trace).dump());
}

TEST_CASE("JSON mirrors the CSV fields") {
  const SolveResult res = solve_obstacle(true);
  const nlohmann::json j = trace_to_json(res.trace, {{"tag", "x"}});
  CHECK(j.at("status") == "KktReached");
  CHECK(j.at("tag") == "x");
  CHECK(j.at("iterations").size() == res.trace.iterations.size());
  const auto& first = j.at("iterations").front();
  for (const char* key : {"k", "sigma", "step_norm", "d_norm", "mu_step_norm", "sub_residual", "sub_iters",
                          "sub_status", "err_to_ref", "wall_ms"}) {
    CHECK(first.contains(key));
  }
  CHECK(first.at("sigma").get<double>() == res.trace.iterations.front().sigma);
  CHECK(j.at("iterations").back().at("step_norm").is_null());
}

TEST_CASE("real formatting round-trips") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const double x = random_vector(rng, 1, 1e3)[0] * std::pow(10.0, uniform_int(rng, -300, 300) / 10);
    CHECK(std::stod(format_real(x)) == x);
  }
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(0.1) == "0.1");
}

TEST_CASE("options and points round-trip through JSON") {
  SolverOptions o;
  o.tol_kkt = 3e-11;
  o.max_outer = 9;
  o.ball_nu = 0.25;
  o.baseline = true;
  o.newton.max_iterations = 40;
  const SolverOptions back = options_from_json(nlohmann::json::parse(options_to_json(o).dump()));
  CHECK(back.tol_kkt == o.tol_kkt);
  CHECK(back.max_outer == 9);
  CHECK(back.ball_nu == 0.25);
  CHECK(back.baseline);
  CHECK(back.newton.max_iterations == 40);
  CHECK(options_to_json(back) == options_to_json(o));

  CHECK(throws_code([] { (void)options_from_json({{"tol", 1.0}}); }, ErrorCode::kParse));
  CHECK(throws_code([] { (void)options_from_json({{"max_outer", -1}}); }, ErrorCode::kParse));
  CHECK(throws_code([] { (void)options_from_json({{"tol_kkt", "small"}}); }, ErrorCode::kParse));

  Rng rng(3);
  const PrimalDual v{random_vector(rng, 4), random_vector(rng, 3)};
  const PrimalDual w = point_from_json(nlohmann::json::parse(point_to_json(v).dump()));
  CHECK(w.x == v.x);
  CHECK(w.lambda == v.lambda);
}
