// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp_bench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "stabsqp/error.hpp"
#include "stabsqp/instances.hpp"
#include "stabsqp/subproblem.hpp"
#include "stabsqp/trace_io.hpp"
#include "stabsqp/version.hpp"

namespace stabsqp::bench {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string real(double v) { return format_real(v); }
std::string real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

// Console tables only; report files keep full precision.
std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

json real_json(double v) { return std::isfinite(v) ? json(v) : json(format_real(v)); }
json real_json(const std::optional<double>& v) { return v ? real_json(*v) : json(nullptr); }

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_row(os, columns_);
    for (const auto& r : rows_) write_row(os, r);
    spdlog::info("wrote {}", path.string());
  }

 private:
  static void write_row(std::ostream& os, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Report {
  const ExperimentConfig& config;
  std::string hash;
  std::string version;

  explicit Report(const ExperimentConfig& c) : config(c), hash(config_hash(c)), version(version_string()) {
    std::filesystem::create_directories(c.output.dir);
  }

  [[nodiscard]] bool csv() const { return config.output.format != Format::kJson; }
  [[nodiscard]] bool json_out() const { return config.output.format != Format::kCsv; }

  [[nodiscard]] std::filesystem::path path(const std::string& name) const { return config.output.dir / name; }

  [[nodiscard]] TraceTags tags() const { return {{"config_hash", hash}, {"version", version}}; }

  [[nodiscard]] json envelope() const {
    return json{{"config", config_to_json(config)}, {"config_hash", hash}, {"version", version}};
  }

  void stamp(json& row) const {
    row["config_hash"] = hash;
    row["version"] = version;
  }

  void write_json(const std::string& name, const json& doc) const {
    std::ofstream os(path(name), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path(name).string());
    os << doc.dump(2) << '\n';
    spdlog::info("wrote {}", path(name).string());
  }
};

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Instance build(const ExperimentConfig& config) {
  spdlog::debug("building instance {}", config.instance.name);
  return make_instance(config.instance);
}

const PrimalDual& require_reference(const Instance& inst) {
  if (!inst.problem.reference_kkt) {
    throw Error(ErrorCode::kMissingReference, "instance \"" + inst.spec.name + "\" has no reference KKT point");
  }
  return *inst.problem.reference_kkt;
}

PrimalDual choose_start(const Instance& inst, const std::optional<PrimalDual>& start,
                        const std::optional<double>& radius, std::uint64_t seed) {
  if (start) return *start;
  if (radius) return perturb(inst.problem, require_reference(inst), *radius, run_seed(seed, 0, 0));
  return inst.default_start;
}

double step_norm(const ProblemOracles& p, const SubproblemPoint& step, const Vector& lambda) {
  return p.x_space.norm(step.d) + p.y_space.norm(step.mu - lambda);
}

}  // namespace

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::kKktReached: return exit_code::kOk;
    case SolveStatus::kMaxOuter: return exit_code::kMaxOuter;
    case SolveStatus::kSubproblemFailure: return exit_code::kSubproblemFailure;
  }
  return exit_code::kSubproblemFailure;
}

std::string version_string() { return std::string(kVersionString); }

std::uint64_t run_seed(std::uint64_t base, std::uint64_t group, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(group), static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

PrimalDual perturb(const ProblemOracles& problem, const PrimalDual& center, double radius, std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "perturbation radius must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PrimalDual delta{Vector(center.x.size()), Vector(center.lambda.size())};
  for (Index i = 0; i < delta.x.size(); ++i) delta.x[i] = gauss(rng);
  for (Index i = 0; i < delta.lambda.size(); ++i) delta.lambda[i] = gauss(rng);
  const double scale = radius / norm(problem, delta);
  return {center.x + scale * delta.x, center.lambda + scale * delta.lambda};
}

RunRate analyze_run(const ProblemOracles& problem, const SolveTrace& trace,
                    const std::optional<PrimalDual>& reference) {
  RunRate r;
  r.status = trace.status;
  r.outer_iterations = static_cast<int>(trace.iterations.size()) - 1;
  r.final_sigma = trace.iterations.empty() ? kNaN : trace.iterations.back().sigma;
  r.max_contraction = max_sigma_contraction(trace);
  r.sigma_proxy = !reference.has_value();
  try {
    r.order = estimate_rate(problem, trace, reference).order;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
  }
  return r;
}

RateGroup summarize_rates(double radius, const std::vector<RunRate>& runs) {
  RateGroup g;
  g.radius = radius;
  g.runs = static_cast<int>(runs.size());
  std::vector<double> orders;
  double cmax = kNaN;
  for (const auto& r : runs) {
    if (r.status == SolveStatus::kKktReached) ++g.kkt_reached;
    if (r.order) orders.push_back(*r.order);
    if (!std::isnan(r.max_contraction)) cmax = std::isnan(cmax) ? r.max_contraction : std::max(cmax, r.max_contraction);
  }
  g.estimable = static_cast<int>(orders.size());
  g.median_order = median(orders);
  g.min_order = orders.empty() ? kNaN : *std::min_element(orders.begin(), orders.end());
  g.max_contraction = cmax;
  return g;
}

int cmd_solve(const ExperimentConfig& config, const RunOptions&, std::ostream& out) {
  const auto& exp = std::get<SingleSolve>(config.experiment);
  const Instance inst = build(config);
  const PrimalDual v0 = choose_start(inst, exp.start, exp.radius, config.seed);
  const SolveResult res = run_sqp(inst.problem, v0, config.solver);
  const Report report(config);

  if (report.csv()) {
    std::ofstream os(report.path("trace.csv"), std::ios::binary);
    write_trace_csv(res.trace, os, report.tags());
    spdlog::info("wrote {}", report.path("trace.csv").string());
  }
  if (report.json_out()) {
    json doc = report.envelope();
    doc["trace"] = trace_to_json(res.trace, report.tags());
    doc["final"] = point_to_json(res.v);
    report.write_json("trace.json", doc);
  }

  const auto& last = res.trace.iterations.back();
  out << "instance " << inst.spec.name << "  driver " << (config.solver.baseline ? "ordinary" : "stabilized")
      << "\nstatus " << to_string(res.trace.status) << "  outer " << last.k << "  sigma " << real(last.sigma);
  if (last.err_to_ref) out << "  err_to_ref " << real(*last.err_to_ref);
  out << '\n';
  return exit_code_for(res.trace.status);
}

int cmd_rate_study(const ExperimentConfig& config, const RunOptions& run, std::ostream& out) {
  const auto& exp = std::get<RateStudy>(config.experiment);
  const Instance inst = build(config);
  const std::optional<PrimalDual>& ref = inst.problem.reference_kkt;
  const PrimalDual& center = ref ? *ref : inst.default_start;
  const std::size_t per = static_cast<std::size_t>(exp.samples);
  const std::size_t total = exp.radii.size() * per;

  const auto runs = parallel_map<RunRate>(total, run.jobs, [&](std::size_t i) {
    const std::size_t g = i / per, s = i % per;
    const PrimalDual v0 = perturb(inst.problem, center, exp.radii[g], run_seed(config.seed, g, s));
    const SolveResult res = run_sqp(inst.problem, v0, config.solver);
    spdlog::debug("rate-study radius {} run {}: {}", exp.radii[g], s, to_string(res.trace.status));
    return analyze_run(inst.problem, res.trace, ref);
  });

  const Report report(config);
  const std::string error_kind = ref ? "reference" : "sigma-proxy";
  Table run_table({"config_hash", "version", "radius", "run", "status", "outer_iterations", "final_sigma", "order",
                   "max_contraction", "error_kind"});
  Table group_table({"config_hash", "version", "radius", "runs", "kkt_reached", "estimable", "median_order",
                     "min_order", "max_contraction", "error_kind"});
  json doc = report.envelope();
  doc["runs"] = json::array();
  doc["summary"] = json::array();

  out << "instance " << inst.spec.name << "  errors " << error_kind << '\n';
  out << std::left << std::setw(12) << "radius" << std::setw(8) << "runs" << std::setw(8) << "kkt" << std::setw(12)
      << "estimable" << std::setw(16) << "median_order" << "max_contraction\n";

  bool all_kkt = true, any_failure = false;
  for (std::size_t g = 0; g < exp.radii.size(); ++g) {
    const std::vector<RunRate> slice(runs.begin() + static_cast<std::ptrdiff_t>(g * per),
                                     runs.begin() + static_cast<std::ptrdiff_t>((g + 1) * per));
    for (std::size_t s = 0; s < per; ++s) {
      const RunRate& r = slice[s];
      all_kkt = all_kkt && r.status == SolveStatus::kKktReached;
      any_failure = any_failure || r.status == SolveStatus::kSubproblemFailure;
      run_table.add({report.hash, report.version, real(exp.radii[g]), std::to_string(s),
                     std::string(to_string(r.status)), std::to_string(r.outer_iterations), real(r.final_sigma),
                     real(r.order), real(r.max_contraction), error_kind});
      json row{{"radius", exp.radii[g]},
               {"run", s},
               {"status", to_string(r.status)},
               {"outer_iterations", r.outer_iterations},
               {"final_sigma", real_json(r.final_sigma)},
               {"order", real_json(r.order)},
               {"max_contraction", real_json(r.max_contraction)},
               {"error_kind", error_kind}};
      report.stamp(row);
      doc["runs"].push_back(std::move(row));
    }
    const RateGroup sum = summarize_rates(exp.radii[g], slice);
    group_table.add({report.hash, report.version, real(sum.radius), std::to_string(sum.runs),
                     std::to_string(sum.kkt_reached), std::to_string(sum.estimable), real(sum.median_order),
                     real(sum.min_order), real(sum.max_contraction), error_kind});
    json row{{"radius", sum.radius},
             {"runs", sum.runs},
             {"kkt_reached", sum.kkt_reached},
             {"estimable", sum.estimable},
             {"median_order", real_json(sum.median_order)},
             {"min_order", real_json(sum.min_order)},
             {"max_contraction", real_json(sum.max_contraction)},
             {"error_kind", error_kind}};
    report.stamp(row);
    doc["summary"].push_back(std::move(row));
    out << std::setw(12) << brief(sum.radius) << std::setw(8) << sum.runs << std::setw(8) << sum.kkt_reached
        << std::setw(12) << sum.estimable << std::setw(16) << brief(sum.median_order) << brief(sum.max_contraction)
        << '\n';
  }
  if (report.csv()) {
    run_table.write_csv(report.path("rate_runs.csv"));
    group_table.write_csv(report.path("rate_summary.csv"));
  }
  if (report.json_out()) report.write_json("rate_study.json", doc);

  if (all_kkt) return exit_code::kOk;
  out << "not every run reached a KKT point\n";
  return any_failure ? exit_code::kSubproblemFailure : exit_code::kMaxOuter;
}

int cmd_error_bound_study(const ExperimentConfig& config, const RunOptions& run, std::ostream& out) {
  const auto& exp = std::get<ErrorBoundStudy>(config.experiment);
  const Instance inst = build(config);
  const ProblemOracles& p = inst.problem;
  const PrimalDual& ref = require_reference(inst);

  struct Sample {
    double sigma = 0.0, dist = 0.0, ratio = 0.0;
    std::optional<double> step, step_ratio;
    std::optional<SubproblemStatus> sub_status;
  };
  const auto samples = parallel_map<Sample>(static_cast<std::size_t>(exp.samples), run.jobs, [&](std::size_t i) {
    Sample s;
    const PrimalDual v = perturb(p, ref, exp.radius, run_seed(config.seed, 0, i));
    s.sigma = sigma(p, v);
    s.dist = distance(p, v, ref);
    s.ratio = s.sigma / s.dist;
    if (s.sigma > 0.0) {
      const StabilizedSubproblem sub(p, v, config.solver.subproblem_tolerance(s.sigma), config.solver.ball_nu);
      const SubproblemSolution sol = solve_stabilized(sub, config.solver.newton);
      s.sub_status = sol.status;
      s.step = step_norm(p, {sol.d, sol.mu}, v.lambda);
      s.step_ratio = *s.step / s.sigma;
    }
    return s;
  });

  const Report report(config);
  Table sample_table({"config_hash", "version", "sample", "sigma", "distance", "ratio", "step_norm", "step_ratio",
                      "sub_status"});
  json doc = report.envelope();
  doc["samples"] = json::array();
  std::vector<double> ratios, step_ratios;
  bool degenerate = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    ratios.push_back(s.ratio);
    if (s.step_ratio) step_ratios.push_back(*s.step_ratio);
    degenerate = degenerate || !(s.ratio > 0.0) || !std::isfinite(s.ratio);
    const std::string status = s.sub_status ? std::string(to_string(*s.sub_status)) : std::string();
    sample_table.add({report.hash, report.version, std::to_string(i), real(s.sigma), real(s.dist), real(s.ratio),
                      real(s.step), real(s.step_ratio), status});
    json row{{"sample", i},
             {"sigma", real_json(s.sigma)},
             {"distance", real_json(s.dist)},
             {"ratio", real_json(s.ratio)},
             {"step_norm", real_json(s.step)},
             {"step_ratio", real_json(s.step_ratio)},
             {"sub_status", s.sub_status ? json(status) : json(nullptr)}};
    report.stamp(row);
    doc["samples"].push_back(std::move(row));
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  const double spread = hi / lo;
  const double step_max = step_ratios.empty() ? kNaN : *std::max_element(step_ratios.begin(), step_ratios.end());
  const bool pass = !degenerate && spread <= exp.spread_bound;

  Table summary({"config_hash", "version", "radius", "samples", "ratio_min", "ratio_median", "ratio_max", "spread",
                 "spread_bound", "step_ratio_max", "pass"});
  summary.add({report.hash, report.version, real(exp.radius), std::to_string(exp.samples), real(lo),
               real(median(ratios)), real(hi), real(spread), real(exp.spread_bound), real(step_max),
               pass ? "true" : "false"});
  json srow{{"radius", exp.radius},          {"samples", exp.samples},         {"ratio_min", real_json(lo)},
            {"ratio_median", real_json(median(ratios))}, {"ratio_max", real_json(hi)}, {"spread", real_json(spread)},
            {"spread_bound", exp.spread_bound}, {"step_ratio_max", real_json(step_max)}, {"pass", pass}};
  report.stamp(srow);
  doc["summary"] = srow;
  if (report.csv()) {
    sample_table.write_csv(report.path("error_bound_samples.csv"));
    summary.write_csv(report.path("error_bound_summary.csv"));
  }
  if (report.json_out()) report.write_json("error_bound.json", doc);

  out << "instance " << inst.spec.name << "  radius " << real(exp.radius) << "  samples " << exp.samples << '\n'
      << "sigma/dist  min " << brief(lo) << "  median " << brief(median(ratios)) << "  max " << brief(hi)
      << "  spread " << brief(spread) << " (bound " << brief(exp.spread_bound) << ")\n"
      << "step/sigma  max " << brief(step_max) << '\n'
      << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? exit_code::kOk : exit_code::kCheckFailed;
}

int cmd_contrast(const ExperimentConfig& config, const RunOptions& run, std::ostream& out) {
  const auto& exp = std::get<ContrastStudy>(config.experiment);
  const Instance inst = build(config);
  const ProblemOracles& p = inst.problem;
  const PrimalDual v0 = choose_start(inst, exp.start, exp.radius, config.seed);

  const auto results = parallel_map<SolveResult>(2, run.jobs, [&](std::size_t i) {
    return i == 0 ? run_stabilized_sqp(p, v0, config.solver) : run_ordinary_sqp(p, v0, config.solver);
  });
  const double gap = p.x_space.norm(results[0].v.x - results[1].v.x);
  const bool both = results[0].trace.status == SolveStatus::kKktReached &&
                    results[1].trace.status == SolveStatus::kKktReached;

  const Report report(config);
  Table table({"config_hash", "version", "driver", "status", "outer_iterations", "final_sigma",
               "max_multiplier_norm", "last_sub_status", "flag", "primal_gap"});
  json doc = report.envelope();
  doc["drivers"] = json::array();
  out << "instance " << inst.spec.name << '\n'
      << std::left << std::setw(12) << "driver" << std::setw(20) << "status" << std::setw(8) << "outer"
      << std::setw(16) << "final_sigma" << std::setw(16) << "max_multiplier" << "flag\n";
  for (std::size_t i = 0; i < 2; ++i) {
    const SolveTrace& t = results[i].trace;
    const std::string driver = i == 0 ? "stabilized" : "ordinary";
    std::optional<SubproblemStatus> last_sub;
    for (const auto& rec : t.iterations) {
      if (rec.sub_status) last_sub = rec.sub_status;
    }
    const double mult = max_multiplier_norm(p, t);
    std::string flag = "converged";
    if (mult > exp.blowup_threshold) flag = "multiplier-blowup";
    else if (last_sub == SubproblemStatus::kInfeasible) flag = "infeasible";
    else if (t.status != SolveStatus::kKktReached) flag = "failed";
    const std::string sub = last_sub ? std::string(to_string(*last_sub)) : std::string();
    const auto& last = t.iterations.back();
    table.add({report.hash, report.version, driver, std::string(to_string(t.status)), std::to_string(last.k),
               real(last.sigma), real(mult), sub, flag, real(gap)});
    json row{{"driver", driver},
             {"status", to_string(t.status)},
             {"outer_iterations", last.k},
             {"final_sigma", real_json(last.sigma)},
             {"max_multiplier_norm", real_json(mult)},
             {"last_sub_status", last_sub ? json(sub) : json(nullptr)},
             {"flag", flag},
             {"primal_gap", real_json(gap)}};
    report.stamp(row);
    doc["drivers"].push_back(std::move(row));
    out << std::setw(12) << driver << std::setw(20) << to_string(t.status) << std::setw(8) << last.k << std::setw(16)
        << brief(last.sigma) << std::setw(16) << brief(mult) << flag << '\n';
  }
  if (both) {
    out << "primal gap " << brief(gap) << (gap <= exp.agreement_tol ? "  (agree)" : "  (DISAGREE)") << '\n';
  }
  doc["primal_gap"] = real_json(gap);
  doc["agree"] = both && gap <= exp.agreement_tol;
  if (report.csv()) table.write_csv(report.path("contrast.csv"));
  if (report.json_out()) report.write_json("contrast.json", doc);
  return exit_code_for(results[0].trace.status);
}

int run_experiment(const ExperimentConfig& config, const RunOptions& run, std::ostream& out) {
  switch (config.experiment.index()) {
    case 0: return cmd_solve(config, run, out);
    case 1: return cmd_rate_study(config, run, out);
    case 2: return cmd_error_bound_study(config, run, out);
    default: return cmd_contrast(config, run, out);
  }
}

void list_instances(std::ostream& out) {
  for (const InstanceSpec& spec : catalog()) {
    out << std::left << std::setw(22) << spec.name << spec.parameters.dump() << '\n';
  }
}

}  // namespace stabsqp::bench
