// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "stabsqp/error.hpp"

namespace stabsqp {
namespace {

constexpr const char* kColumns[] = {"k",          "sigma",     "step_norm", "d_norm",     "mu_step_norm",
                                    "sub_residual", "sub_iters", "sub_status", "err_to_ref", "wall_ms"};

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const SolveTrace& trace, std::ostream& os, const TraceTags& tags) {
  bool first = true;
  for (const char* c : kColumns) {
    os << (first ? "" : ",") << c;
    first = false;
  }
  for (const auto& [key, value] : tags) os << ',' << key;
  os << '\n';
  for (const auto& rec : trace.iterations) {
    os << rec.k << ',' << format_real(rec.sigma) << ',' << opt_real(rec.step_norm) << ',' << opt_real(rec.d_norm)
       << ',' << opt_real(rec.mu_step_norm) << ',' << opt_real(rec.sub_residual) << ','
       << (rec.sub_iters ? std::to_string(*rec.sub_iters) : std::string()) << ','
       << (rec.sub_status ? std::string(to_string(*rec.sub_status)) : std::string()) << ','
       << opt_real(rec.err_to_ref) << ',' << format_real(rec.wall_ms);
    for (const auto& [key, value] : tags) os << ',' << value;
    os << '\n';
  }
}

nlohmann::json trace_to_json(const SolveTrace& trace, const TraceTags& tags) {
  auto iters = nlohmann::json::array();
  for (const auto& rec : trace.iterations) {
    nlohmann::json row;
    row["k"] = rec.k;
    row["sigma"] = rec.sigma;
    row["step_norm"] = opt_json(rec.step_norm);
    row["d_norm"] = opt_json(rec.d_norm);
    row["mu_step_norm"] = opt_json(rec.mu_step_norm);
    row["sub_residual"] = opt_json(rec.sub_residual);
    row["sub_iters"] = rec.sub_iters ? nlohmann::json(*rec.sub_iters) : nlohmann::json(nullptr);
    row["sub_status"] = rec.sub_status ? nlohmann::json(std::string(to_string(*rec.sub_status))) : nlohmann::json(nullptr);
    row["err_to_ref"] = opt_json(rec.err_to_ref);
    row["wall_ms"] = rec.wall_ms;
    for (const auto& [key, value] : tags) row[key] = value;
    iters.push_back(std::move(row));
  }
  nlohmann::json out;
  out["status"] = std::string(to_string(trace.status));
  out["baseline"] = trace.baseline;
  out["options"] = options_to_json(trace.options);
  out["iterations"] = std::move(iters);
  for (const auto& [key, value] : tags) out[key] = value;
  return out;
}

nlohmann::json options_to_json(const SolverOptions& opts) {
  nlohmann::json j;
  j["tol_kkt"] = opts.tol_kkt;
  j["max_outer"] = opts.max_outer;
  j["subproblem_power"] = opts.subproblem_power;
  j["epsilon_cap"] = opts.epsilon_cap;
  j["epsilon_floor"] = opts.epsilon_floor;
  j["ball_nu"] = opts.ball_nu ? nlohmann::json(*opts.ball_nu) : nlohmann::json(nullptr);
  j["baseline"] = opts.baseline;
  j["record_timing"] = opts.record_timing;
  j["newton_max_iterations"] = opts.newton.max_iterations;
  j["infeasibility_tol"] = opts.newton.infeasibility_tol;
  return j;
}

SolverOptions options_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "solver options must be an object");
  static const std::set<std::string> known{"tol_kkt",  "max_outer", "subproblem_power", "epsilon_cap",
                                           "epsilon_floor", "ball_nu", "baseline", "newton_max_iterations",
                                           "infeasibility_tol", "record_timing"};
  SolverOptions o;
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::kParse, "solver: unknown field \"" + key + "\"");
    try {
      if (key == "tol_kkt") o.tol_kkt = value.get<double>();
      else if (key == "max_outer") o.max_outer = value.get<int>();
      else if (key == "subproblem_power") o.subproblem_power = value.get<double>();
      else if (key == "epsilon_cap") o.epsilon_cap = value.get<double>();
      else if (key == "epsilon_floor") o.epsilon_floor = value.get<double>();
      else if (key == "ball_nu") o.ball_nu = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      else if (key == "baseline") o.baseline = value.get<bool>();
      else if (key == "newton_max_iterations") o.newton.max_iterations = value.get<int>();
      else if (key == "infeasibility_tol") o.newton.infeasibility_tol = value.get<double>();
      else if (key == "record_timing") o.record_timing = value.get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "solver." + key + ": " + e.what());
    }
  }
  try {
    o.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("solver: ") + e.what());
  }
  return o;
}

nlohmann::json point_to_json(const PrimalDual& v) {
  return nlohmann::json{{"x", vector_to_json(v.x)}, {"lambda", vector_to_json(v.lambda)}};
}

PrimalDual point_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("x") || !j.contains("lambda")) {
    throw Error(ErrorCode::kParse, "point must be an object with \"x\" and \"lambda\"");
  }
  return {vector_from_json(j.at("x")), vector_from_json(j.at("lambda"))};
}

}  // namespace stabsqp
