// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp_bench/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stabsqp/error.hpp"
#include "stabsqp/trace_io.hpp"

namespace stabsqp::bench {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown field \"" + key + "\"");
  }
}

template <typename T>
T field(const json& j, const std::string& where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": expected " + (std::is_same_v<T, bool> ? "a boolean" : "a number") +
                      ", got " + j.at(key).dump());
  }
}

std::optional<PrimalDual> optional_point(const json& j, const std::string& where) {
  if (!j.contains("start") || j.at("start").is_null()) return std::nullopt;
  try {
    return point_from_json(j.at("start"));
  } catch (const Error& e) {
    throw ConfigError(where + ".start: " + e.what());
  }
}

std::optional<double> optional_real(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return field<double>(j, where, key, 0.0);
}

Experiment experiment_from_json(const json& j, std::string_view kind) {
  const std::string where = "experiment";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::string type(kind);
  if (j.contains("type")) {
    if (!j.at("type").is_string()) throw ConfigError(where + ".type: expected a string");
    type = j.at("type").get<std::string>();
    if (!kind.empty() && type != kind) {
      throw ConfigError(where + ".type: \"" + type + "\" does not match command \"" + std::string(kind) + "\"");
    }
  }
  if (type == "solve") {
    reject_unknown(j, where, {"type", "start", "radius"});
    return SingleSolve{optional_point(j, where), optional_real(j, where, "radius")};
  }
  if (type == "rate-study") {
    reject_unknown(j, where, {"type", "radii", "samples"});
    RateStudy r;
    if (j.contains("radii")) {
      const json& radii = j.at("radii");
      if (!radii.is_array()) throw ConfigError(where + ".radii: expected an array");
      r.radii.clear();
      for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!radii[i].is_number()) {
          throw ConfigError(where + ".radii[" + std::to_string(i) + "]: expected a number");
        }
        r.radii.push_back(radii[i].get<double>());
      }
    }
    r.samples = field<int>(j, where, "samples", r.samples);
    return r;
  }
  if (type == "error-bound") {
    reject_unknown(j, where, {"type", "samples", "radius", "spread_bound"});
    ErrorBoundStudy e;
    e.samples = field<int>(j, where, "samples", e.samples);
    e.radius = field<double>(j, where, "radius", e.radius);
    e.spread_bound = field<double>(j, where, "spread_bound", e.spread_bound);
    return e;
  }
  if (type == "contrast") {
    reject_unknown(j, where, {"type", "start", "radius", "agreement_tol", "blowup_threshold"});
    ContrastStudy c;
    c.start = optional_point(j, where);
    c.radius = optional_real(j, where, "radius");
    c.agreement_tol = field<double>(j, where, "agreement_tol", c.agreement_tol);
    c.blowup_threshold = field<double>(j, where, "blowup_threshold", c.blowup_threshold);
    return c;
  }
  throw ConfigError(where + ".type: unknown experiment \"" + type +
                    "\" (expected solve, rate-study, error-bound or contrast)");
}

json experiment_to_json(const Experiment& e) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        json j;
        if constexpr (std::is_same_v<T, SingleSolve>) {
          j["type"] = "solve";
          j["start"] = x.start ? point_to_json(*x.start) : json(nullptr);
          j["radius"] = x.radius ? json(*x.radius) : json(nullptr);
        } else if constexpr (std::is_same_v<T, RateStudy>) {
          j["type"] = "rate-study";
          j["radii"] = x.radii;
          j["samples"] = x.samples;
        } else if constexpr (std::is_same_v<T, ErrorBoundStudy>) {
          j["type"] = "error-bound";
          j["samples"] = x.samples;
          j["radius"] = x.radius;
          j["spread_bound"] = x.spread_bound;
        } else {
          j["type"] = "contrast";
          j["start"] = x.start ? point_to_json(*x.start) : json(nullptr);
          j["radius"] = x.radius ? json(*x.radius) : json(nullptr);
          j["agreement_tol"] = x.agreement_tol;
          j["blowup_threshold"] = x.blowup_threshold;
        }
        return j;
      },
      e);
}

void check_radius(double r, const std::string& where) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw ConfigError(where + ": radius must be positive and finite, got " + format_real(r));
  }
}

}  // namespace

std::string_view experiment_name(const Experiment& e) {
  static constexpr std::string_view names[] = {"solve", "rate-study", "error-bound", "contrast"};
  return names[e.index()];
}

Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  if (s == "both") return Format::kBoth;
  throw ConfigError("unknown output format \"" + std::string(s) + "\" (expected csv, json or both)");
}

std::string_view to_string(Format f) {
  switch (f) {
    case Format::kCsv: return "csv";
    case Format::kJson: return "json";
    case Format::kBoth: return "both";
  }
  return "both";
}

void ExperimentConfig::validate() const {
  std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SingleSolve> || std::is_same_v<T, ContrastStudy>) {
          if (x.radius) check_radius(*x.radius, "experiment.radius");
          if (x.start && x.radius) throw ConfigError("experiment: give either start or radius, not both");
        } else if constexpr (std::is_same_v<T, RateStudy>) {
          if (x.radii.empty()) throw ConfigError("experiment.radii: at least one radius is required");
          for (std::size_t i = 0; i < x.radii.size(); ++i) {
            check_radius(x.radii[i], "experiment.radii[" + std::to_string(i) + "]");
            if (i > 0 && !(x.radii[i] < x.radii[i - 1])) {
              throw ConfigError("experiment.radii: radii must be strictly decreasing");
            }
          }
          if (x.samples < 1) throw ConfigError("experiment.samples: must be at least 1");
        } else {
          check_radius(x.radius, "experiment.radius");
          if (x.samples < 10) throw ConfigError("experiment.samples: error-bound studies need at least 10 samples");
          if (!(x.spread_bound >= 1.0)) throw ConfigError("experiment.spread_bound: must be at least 1");
        }
      },
      experiment);
}

ExperimentConfig config_from_json(const json& j, std::string_view kind) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object at top level");
  reject_unknown(j, "config", {"instance", "solver", "experiment", "output", "seed"});
  ExperimentConfig c;
  if (!j.contains("instance")) throw ConfigError("config: missing \"instance\"");
  try {
    c.instance = spec_from_json(j.at("instance"));
    if (!c.instance.parameters.is_object()) throw ConfigError("instance.params: expected an object");
    json merged = default_spec(c.instance.name).parameters;
    for (const auto& [key, value] : c.instance.parameters.items()) {
      if (!merged.contains(key)) throw ConfigError("instance.params: unknown parameter \"" + key + "\"");
      merged[key] = value;
    }
    c.instance.parameters = std::move(merged);
    c.instance = make_instance(c.instance).spec;
  } catch (const Error& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
  if (j.contains("solver")) {
    try {
      c.solver = options_from_json(j.at("solver"));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  c.experiment = experiment_from_json(j.value("experiment", json::object()), kind);
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (!o.is_object()) throw ConfigError("output: expected an object");
    reject_unknown(o, "output", {"dir", "format", "timing"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("output.dir: expected a string");
      c.output.dir = o.at("dir").get<std::string>();
    }
    if (o.contains("format")) {
      if (!o.at("format").is_string()) throw ConfigError("output.format: expected a string");
      c.output.format = format_from_string(o.at("format").get<std::string>());
    }
    c.output.timing = field<bool>(o, "output", "timing", c.output.timing);
  }
  c.solver.record_timing = c.output.timing;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.validate();
  return c;
}

ExperimentConfig parse_config(std::string_view text, std::string_view kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config: syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  return config_from_json(j, kind);
}

ExperimentConfig load_config(const std::filesystem::path& path, std::string_view kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), kind);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["instance"] = spec_to_json(config.instance);
  j["solver"] = options_to_json(config.solver);
  j["experiment"] = experiment_to_json(config.experiment);
  j["output"] = {{"dir", config.output.dir.string()},
                 {"format", std::string(to_string(config.output.format))},
                 {"timing", config.output.timing}};
  j["seed"] = config.seed;
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  json j = config_to_json(config);
  j.erase("output");
  j["solver"].erase("record_timing");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace stabsqp::bench
