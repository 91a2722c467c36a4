// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "stabsqp/instances.hpp"
#include "stabsqp_bench/config.hpp"
#include "stabsqp_bench/experiments.hpp"
#include "test_support.hpp"

using namespace stabsqp;
using namespace stabsqp::bench;

namespace {

bool config_error(const std::string& text, std::string_view kind, const std::string& fragment) {
  try {
    (void)parse_config(text, kind);
  } catch (const ConfigError& e) {
    return std::string(e.what()).find(fragment) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("config parsing fills defaults") {
  const ExperimentConfig c = parse_config(R"({"instance": {"name": "obstacle-1d", "params": {"N": 16}}})", "rate-study");
  CHECK(c.instance.parameters.at("N") == 16);
  CHECK(c.instance.parameters.contains("load"));
  REQUIRE(std::holds_alternative<RateStudy>(c.experiment));
  CHECK(std::get<RateStudy>(c.experiment).samples == 20);
  CHECK(experiment_name(c.experiment) == "rate-study");
  CHECK(c.output.format == Format::kBoth);
  CHECK_FALSE(c.output.timing);
  CHECK_FALSE(c.solver.record_timing);
  CHECK(c.seed == 1);

  const ExperimentConfig t = parse_config(
      R"({"instance": {"name": "scalar-toy"}, "output": {"timing": true, "format": "csv"}, "seed": 9})", "solve");
  CHECK(t.solver.record_timing);
  CHECK(t.output.format == Format::kCsv);
  CHECK(t.seed == 9);
}

TEST_CASE("config validation errors") {
  CHECK(config_error("{\"instance\": {\"name\": \"scalar-toy\"},\n \"seed\": }", "solve", "line 2"));
  CHECK(config_error(R"({})", "solve", "missing \"instance\""));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "extra": 1})", "solve", "unknown field"));
  CHECK(config_error(R"({"instance": {"name": "obstacle-1d", "params": {"M": 3}}})", "solve", "unknown parameter"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "experiment": {"radius": 0}})", "solve", "radius"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "experiment": {"radius": -1e-3}})", "contrast",
                     "radius"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "experiment": {"radii": [1e-3, 1e-2]}})", "rate-study",
                     "strictly decreasing"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "experiment": {"samples": 5}})", "error-bound",
                     "at least 10"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "experiment": {"type": "contrast"}})", "solve",
                     "does not match"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "output": {"format": "xml"}})", "solve", "xml"));
  CHECK(config_error(R"({"instance": {"name": "scalar-toy"}, "solver": {"tol_kkt": -1}})", "solve", ""));
  CHECK(config_error(
      R"({"instance": {"name": "scalar-toy"}, "experiment": {"radius": 1e-3, "start": {"x": [2], "lambda": [0]}}})",
      "solve", "either start or radius"));
}

TEST_CASE("config hash ignores output settings only") {
  const std::string base = R"({"instance": {"name": "obstacle-1d", "params": {"N": 16}})";
  const ExperimentConfig a = parse_config(base + "}", "rate-study");
  const ExperimentConfig b =
      parse_config(base + R"(, "output": {"dir": "elsewhere", "timing": true, "format": "json"}})", "rate-study");
  const ExperimentConfig c = parse_config(base + R"(, "seed": 2})", "rate-study");
  const ExperimentConfig d = parse_config(R"({"instance": {"name": "obstacle-1d", "params": {"N": 16, "load": {"type": "constant", "value": 8}}}})",
                                          "rate-study");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
  // spelling out a default leaves the canonical form unchanged
  CHECK(config_hash(a) == config_hash(d));
  CHECK(config_to_json(a).at("instance") == config_to_json(d).at("instance"));
  const ExperimentConfig back = config_from_json(config_to_json(a), "rate-study");
  CHECK(config_hash(back) == config_hash(a));
}

TEST_CASE("perturbations have the exact radius and are reproducible") {
  const Instance inst = make_instance(default_spec("control-lq"));
  const ProblemOracles& p = inst.problem;
  const PrimalDual& ref = *p.reference_kkt;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const double radius = std::pow(10.0, -1.0 - static_cast<double>(s % 5));
    const PrimalDual v = perturb(p, ref, radius, s);
    CHECK(distance(p, v, ref) == doctest::Approx(radius).epsilon(1e-12));
    const PrimalDual w = perturb(p, ref, radius, s);
    CHECK(w.x == v.x);
    CHECK(w.lambda == v.lambda);
  }
  CHECK(run_seed(1, 0, 0) != run_seed(1, 0, 1));
  CHECK(run_seed(1, 0, 1) != run_seed(1, 1, 0));
  CHECK(run_seed(3, 2, 1) == run_seed(3, 2, 1));
}

TEST_CASE("parallel_map keeps index order and is job-count independent") {
  const std::function<double(std::size_t)> fn = [](std::size_t i) {
    const Instance inst = make_instance(default_spec("quadratic-box"));
    SolverOptions o;
    o.record_timing = false;
    const PrimalDual start = perturb(inst.problem, *inst.problem.reference_kkt, 1e-2, run_seed(5, 0, i));
    return run_stabilized_sqp(inst.problem, start, o).trace.iterations.back().sigma + static_cast<double>(i);
  };
  const auto serial = parallel_map<double>(12, 1, fn);
  const auto threaded = parallel_map<double>(12, 3, fn);
  CHECK(serial == threaded);
  const auto idx = parallel_map<std::size_t>(100, 4, [](std::size_t i) { return i; });
  for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx[i] == i);

  const std::function<int(std::size_t)> bad = [](std::size_t i) -> int {
    if (i == 3 || i == 7) throw std::runtime_error("run " + std::to_string(i));
    return 0;
  };
  try {
    (void)parallel_map<int>(10, 4, bad);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "run 3");
  }
}

TEST_CASE("analyze_run on a synthetic quadratic trace") {
  const ProblemOracles p = make_scalar_toy();
  const PrimalDual ref{Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  SolveTrace trace;
  trace.status = SolveStatus::kKktReached;
  double e = 1e-1;
  for (int k = 0; k < 4; ++k, e = e * e) {
    IterationRecord r;
    r.k = k;
    r.point = {Vector::Constant(1, 1.0 + e), Vector::Constant(1, -1.0)};
    r.sigma = sigma(p, r.point);
    trace.iterations.push_back(r);
  }
  const RunRate rr = analyze_run(p, trace, ref);
  REQUIRE(rr.order.has_value());
  CHECK(*rr.order == doctest::Approx(2.0).epsilon(0.025));
  CHECK_FALSE(rr.sigma_proxy);
  CHECK(rr.outer_iterations == 3);
  CHECK(exit_code_for(rr.status) == exit_code::kOk);

  const RunRate proxy = analyze_run(p, trace, std::nullopt);
  CHECK(proxy.sigma_proxy);

  trace.iterations.resize(2);
  CHECK_FALSE(analyze_run(p, trace, ref).order.has_value());
}

TEST_CASE("summarize_rates") {
  std::vector<RunRate> runs(4);
  runs[0].status = SolveStatus::kKktReached;
  runs[0].order = 2.0;
  runs[0].max_contraction = 3.0;
  runs[1].status = SolveStatus::kKktReached;
  runs[1].order = 3.0;
  runs[1].max_contraction = std::nan("");
  runs[2].status = SolveStatus::kKktReached;
  runs[2].order = 1.5;
  runs[2].max_contraction = 1.0;
  runs[3].status = SolveStatus::kMaxOuter;
  const RateGroup g = summarize_rates(1e-2, runs);
  CHECK(g.runs == 4);
  CHECK(g.kkt_reached == 3);
  CHECK(g.estimable == 3);
  CHECK(g.median_order == 2.0);
  CHECK(g.min_order == 1.5);
  CHECK(g.max_contraction == 3.0);
  CHECK(std::isnan(summarize_rates(1e-3, {}).median_order));

  CHECK(exit_code_for(SolveStatus::kMaxOuter) == exit_code::kMaxOuter);
  CHECK(exit_code_for(SolveStatus::kSubproblemFailure) == exit_code::kSubproblemFailure);
}
