// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stabsqp/driver.hpp"

namespace stabsqp {

/// Extra constant columns appended to every CSV row / JSON record.
using TraceTags = std::vector<std::pair<std::string, std::string>>;

/// Column order: k, sigma, step_norm, d_norm, mu_step_norm, sub_residual,
/// sub_iters, sub_status, err_to_ref, wall_ms, then the tags. Missing values
/// are empty fields; reals use the shortest round-trip representation.
void write_trace_csv(const SolveTrace& trace, std::ostream& os, const TraceTags& tags = {});

[[nodiscard]] nlohmann::json trace_to_json(const SolveTrace& trace, const TraceTags& tags = {});

[[nodiscard]] nlohmann::json options_to_json(const SolverOptions& opts);
/// Fields absent from j keep their defaults; unknown fields are rejected.
[[nodiscard]] SolverOptions options_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json point_to_json(const PrimalDual& v);
[[nodiscard]] PrimalDual point_from_json(const nlohmann::json& j);

/// Shortest decimal string that parses back to the same double.
[[nodiscard]] std::string format_real(double value);

}  // namespace stabsqp
