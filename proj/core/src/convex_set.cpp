// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "stabsqp/error.hpp"

namespace stabsqp {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double weighted_dist_sq(const Vector& weights, Index offset, const Vector& a, Index a_off, const Vector& b) {
  double s = 0.0;
  for (Index i = 0; i < b.size(); ++i) {
    const double diff = a[a_off + i] - b[i];
    s += weights[offset + i] * diff * diff;
  }
  return s;
}

// Radial projection onto {z : ||z - c|| <= r}. The radius is nudged down by
// ulps until the recomputed norm of the result is within r, so projecting the
// output again returns it unchanged.
template <class NormFn>
Vector project_ball(const Vector& y, const Vector& c, double r, NormFn&& norm_of_offset) {
  const Vector diff = y - c;
  const double s = norm_of_offset(diff);
  if (s <= r) return y;
  double reff = r;
  Vector p(y.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (Index i = 0; i < y.size(); ++i) p[i] = c[i] + diff[i] * reff / s;
    if (norm_of_offset(p - c) <= r) return p;
    reff = std::nextafter(reff, 0.0);
  }
  return c;
}

}  // namespace

ConvexSet ConvexSet::zero(Index dim) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "zero set dimension must be positive");
  return ConvexSet(dim, ZeroData{dim});
}

ConvexSet ConvexSet::orthant(Index dim) {
  if (dim <= 0) throw Error(ErrorCode::kInvalidArgument, "orthant dimension must be positive");
  return ConvexSet(dim, OrthantData{dim});
}

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::kDimensionMismatch, "box bounds differ in length");
  if (lower.size() <= 0) throw Error(ErrorCode::kInvalidArgument, "box dimension must be positive");
  for (Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i])) {
      throw Error(ErrorCode::kNonFinite, "box bound is NaN");
    }
    if (lower[i] > upper[i] || lower[i] == kInf || upper[i] == -kInf) {
      throw Error(ErrorCode::kInvalidArgument, "box bounds empty at coordinate " + std::to_string(i));
    }
  }
  const Index dim = lower.size();
  return ConvexSet(dim, BoxData{std::move(lower), std::move(upper)});
}

ConvexSet ConvexSet::box(Index dim, double lower, double upper) {
  return box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() <= 0) throw Error(ErrorCode::kInvalidArgument, "ball dimension must be positive");
  require_finite(center, "ball center");
  if (!std::isfinite(radius) || radius < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "ball radius must be finite and nonnegative");
  }
  const Index dim = center.size();
  return ConvexSet(dim, BallData{std::move(center), radius});
}

ConvexSet ConvexSet::product(std::vector<ConvexSet> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::kInvalidArgument, "product needs at least one block");
  Index dim = 0;
  for (const auto& b : blocks) dim += b.dim();
  return ConvexSet(dim, ProductData{std::move(blocks)});
}

SetKind ConvexSet::kind() const noexcept {
  return std::visit(Overloaded{
                        [](const ZeroData&) { return SetKind::kZero; },
                        [](const OrthantData&) { return SetKind::kOrthant; },
                        [](const BoxData&) { return SetKind::kBox; },
                        [](const BallData&) { return SetKind::kBall; },
                        [](const ProductData&) { return SetKind::kProduct; },
                    },
                    data_);
}

bool ConvexSet::is_box_like() const {
  return std::visit(Overloaded{
                        [](const BallData&) { return false; },
                        [](const ProductData& p) {
                          return std::all_of(p.blocks.begin(), p.blocks.end(),
                                             [](const ConvexSet& b) { return b.is_box_like(); });
                        },
                        [](const auto&) { return true; },
                    },
                    data_);
}

void ConvexSet::check_space(const InnerProductSpace& space, const Vector& y) const {
  if (space.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "space dimension " + std::to_string(space.dim()) +
                                                   " does not match set dimension " + std::to_string(dim_));
  }
  space.check(y, "projection argument");
}

void ConvexSet::project_into(const Vector& weights, const Vector& y, Index offset, Vector& out) const {
  std::visit(Overloaded{
                 [&](const ZeroData& z) { out.segment(offset, z.dim).setZero(); },
                 [&](const OrthantData& o) { out.segment(offset, o.dim) = y.segment(offset, o.dim).cwiseMax(0.0); },
                 [&](const BoxData& b) {
                   const Index n = b.lower.size();
                   out.segment(offset, n) = y.segment(offset, n).cwiseMax(b.lower).cwiseMin(b.upper);
                 },
                 [&](const BallData& b) {
                   const Index n = b.center.size();
                   const Vector yb = y.segment(offset, n);
                   out.segment(offset, n) = project_ball(yb, b.center, b.radius, [&](const Vector& diff) {
                     return std::sqrt(weighted_dist_sq(weights, offset, diff, 0, Vector::Zero(n)));
                   });
                 },
                 [&](const ProductData& p) {
                   Index off = offset;
                   for (const auto& block : p.blocks) {
                     block.project_into(weights, y, off, out);
                     off += block.dim();
                   }
                 },
             },
             data_);
}

Vector ConvexSet::project(const InnerProductSpace& space, const Vector& y) const {
  check_space(space, y);
  if (!space.is_separable()) {
    if (const auto* z = std::get_if<ZeroData>(&data_)) return Vector::Zero(z->dim);
    if (const auto* b = std::get_if<BallData>(&data_)) {
      return project_ball(y, b->center, b->radius, [&](const Vector& diff) { return space.norm(diff); });
    }
    throw Error(ErrorCode::kUnsupportedGram,
                "coordinatewise projection requires an identity or diagonal Gram");
  }
  Vector out(dim_);
  project_into(space.weights(), y, 0, out);
  return out;
}

double ConvexSet::dist(const InnerProductSpace& space, const Vector& y) const {
  const Vector p = project(space, y);
  return space.norm(y - p);
}

bool ConvexSet::contains(const InnerProductSpace& space, const Vector& y, double tol) const {
  if (tol < 0.0) tol = 1e-12 * (1.0 + space.norm(y));
  return dist(space, y) <= tol;
}

Vector ConvexSet::lower_bounds() const {
  return std::visit(Overloaded{
                        [](const ZeroData& z) -> Vector { return Vector::Zero(z.dim); },
                        [](const OrthantData& o) -> Vector { return Vector::Zero(o.dim); },
                        [](const BoxData& b) -> Vector { return b.lower; },
                        [](const BallData&) -> Vector {
                          throw Error(ErrorCode::kUnsupportedSet, "ball has no coordinate bounds");
                        },
                        [this](const ProductData& p) -> Vector {
                          Vector out(dim_);
                          Index off = 0;
                          for (const auto& b : p.blocks) {
                            out.segment(off, b.dim()) = b.lower_bounds();
                            off += b.dim();
                          }
                          return out;
                        },
                    },
                    data_);
}

Vector ConvexSet::upper_bounds() const {
  return std::visit(Overloaded{
                        [](const ZeroData& z) -> Vector { return Vector::Zero(z.dim); },
                        [](const OrthantData& o) -> Vector { return Vector::Constant(o.dim, kInf); },
                        [](const BoxData& b) -> Vector { return b.upper; },
                        [](const BallData&) -> Vector {
                          throw Error(ErrorCode::kUnsupportedSet, "ball has no coordinate bounds");
                        },
                        [this](const ProductData& p) -> Vector {
                          Vector out(dim_);
                          Index off = 0;
                          for (const auto& b : p.blocks) {
                            out.segment(off, b.dim()) = b.upper_bounds();
                            off += b.dim();
                          }
                          return out;
                        },
                    },
                    data_);
}

Vector ConvexSet::projection_mask(const Vector& y) const {
  if (y.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "projection_mask argument");
  const Vector lo = lower_bounds();
  const Vector hi = upper_bounds();
  Vector mask(dim_);
  for (Index i = 0; i < dim_; ++i) {
    if (lo[i] == hi[i]) {
      mask[i] = 0.0;
    } else {
      mask[i] = (y[i] >= lo[i] && y[i] <= hi[i]) ? 1.0 : 0.0;
    }
  }
  return mask;
}

double normal_cone_residual(const ConvexSet& set, const InnerProductSpace& space, const Vector& y,
                            const Vector& lambda) {
  space.check(lambda, "normal_cone_residual multiplier");
  return space.norm(y - set.project(space, y + lambda));
}

nlohmann::json vector_to_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) throw Error(ErrorCode::kNonFinite, "cannot serialize NaN");
    if (v[i] == kInf) {
      arr.push_back("inf");
    } else if (v[i] == -kInf) {
      arr.push_back("-inf");
    } else {
      arr.push_back(v[i]);
    }
  }
  return arr;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (e.is_number()) {
      v[static_cast<Index>(i)] = e.get<double>();
    } else if (e.is_string() && e.get<std::string>() == "inf") {
      v[static_cast<Index>(i)] = kInf;
    } else if (e.is_string() && e.get<std::string>() == "-inf") {
      v[static_cast<Index>(i)] = -kInf;
    } else {
      throw Error(ErrorCode::kParse, "array element " + std::to_string(i) + " is not a number or \"inf\"/\"-inf\"");
    }
  }
  return v;
}

nlohmann::json convex_set_to_json(const ConvexSet& set) {
  return std::visit(Overloaded{
                        [](const ConvexSet::ZeroData& z) { return nlohmann::json{{"type", "zero"}, {"dim", z.dim}}; },
                        [](const ConvexSet::OrthantData& o) {
                          return nlohmann::json{{"type", "orthant"}, {"dim", o.dim}};
                        },
                        [](const ConvexSet::BoxData& b) {
                          return nlohmann::json{
                              {"type", "box"}, {"lower", vector_to_json(b.lower)}, {"upper", vector_to_json(b.upper)}};
                        },
                        [](const ConvexSet::BallData& b) {
                          return nlohmann::json{
                              {"type", "ball"}, {"center", vector_to_json(b.center)}, {"radius", b.radius}};
                        },
                        [](const ConvexSet::ProductData& p) {
                          auto blocks = nlohmann::json::array();
                          for (const auto& b : p.blocks) blocks.push_back(convex_set_to_json(b));
                          return nlohmann::json{{"type", "product"}, {"blocks", blocks}};
                        },
                    },
                    set.data());
}

ConvexSet convex_set_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw Error(ErrorCode::kParse, "convex set must be an object with a string \"type\"");
  }
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "zero") return ConvexSet::zero(j.at("dim").get<Index>());
    if (type == "orthant") return ConvexSet::orthant(j.at("dim").get<Index>());
    if (type == "box") return ConvexSet::box(vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
    if (type == "ball") return ConvexSet::ball(vector_from_json(j.at("center")), j.at("radius").get<double>());
    if (type == "product") {
      std::vector<ConvexSet> blocks;
      for (const auto& b : j.at("blocks")) blocks.push_back(convex_set_from_json(b));
      return ConvexSet::product(std::move(blocks));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "convex set of type \"" + type + "\": " + e.what());
  }
  throw Error(ErrorCode::kParse, "unknown convex set type \"" + type + "\"");
}

}  // namespace stabsqp
