// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/instances.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "stabsqp/box_qp.hpp"
#include "stabsqp/error.hpp"

namespace stabsqp {
namespace {

constexpr int kReferenceMaxGrid = 64;

double grid_step(int N) { return 1.0 / static_cast<double>(N + 1); }

Vector sample(int N, const std::function<double(double)>& fn) {
  const double h = grid_step(N);
  Vector v(N);
  for (int i = 0; i < N; ++i) v[i] = fn(h * (i + 1));
  return v;
}

// tridiag(-1, 2, -1) / h^2 with homogeneous Dirichlet ends.
Vector laplacian_apply(const Vector& u, double inv_h2) {
  const Index n = u.size();
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    double s = 2.0 * u[i];
    if (i > 0) s -= u[i - 1];
    if (i + 1 < n) s -= u[i + 1];
    out[i] = s * inv_h2;
  }
  return out;
}

Matrix laplacian_matrix(int N) {
  const double h = grid_step(N);
  Matrix A = Matrix::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    A(i, i) = 2.0;
    if (i > 0) A(i, i - 1) = -1.0;
    if (i + 1 < N) A(i, i + 1) = -1.0;
  }
  return A / (h * h);
}

void require_grid(int N) {
  if (N < 4) throw Error(ErrorCode::kBadGrid, "grid size N must be at least 4, got " + std::to_string(N));
}

nlohmann::json real_to_json(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

double param_double(const nlohmann::json& p, const char* key) {
  const auto& v = p.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  return v.get<double>();
}

nlohmann::json defaults_for(InstanceFamily family) {
  switch (family) {
    case InstanceFamily::kScalarToy: return nlohmann::json::object();
    case InstanceFamily::kQuadraticBox: return {{"n", 6}, {"m", 0}, {"seed", 1}};
    case InstanceFamily::kRedundantEquality: return {{"n", 3}};
    case InstanceFamily::kObstacle1D:
      return {{"N", 64},
              {"obstacle", profile_to_json(Profile::parabola(0.5, 0.5, 0.5))},
              {"load", profile_to_json(Profile::constant(8.0))}};
    case InstanceFamily::kControlLQ:
      return {{"N", 32},
              {"alpha", 1e-2},
              {"lower", -1.0},
              {"upper", 4.0},
              {"target", profile_to_json(Profile::sine(1.0, 1.0, 0.0))}};
  }
  return nlohmann::json::object();
}

std::string canonical_name(InstanceFamily family) {
  switch (family) {
    case InstanceFamily::kScalarToy: return "scalar-toy";
    case InstanceFamily::kQuadraticBox: return "quadratic-box";
    case InstanceFamily::kRedundantEquality: return "redundant-equality";
    case InstanceFamily::kObstacle1D: return "obstacle-1d";
    case InstanceFamily::kControlLQ: return "control-lq";
  }
  return "unknown";
}

InstanceFamily family_for_name(std::string_view name) {
  for (auto f : {InstanceFamily::kScalarToy, InstanceFamily::kQuadraticBox, InstanceFamily::kRedundantEquality,
                 InstanceFamily::kObstacle1D, InstanceFamily::kControlLQ}) {
    if (canonical_name(f) == name) return f;
  }
  throw Error(ErrorCode::kParse, "unknown instance name \"" + std::string(name) + "\"");
}

}  // namespace

std::string_view to_string(InstanceFamily family) {
  switch (family) {
    case InstanceFamily::kScalarToy: return "ScalarToy";
    case InstanceFamily::kQuadraticBox: return "QuadraticBox";
    case InstanceFamily::kRedundantEquality: return "RedundantEquality";
    case InstanceFamily::kObstacle1D: return "Obstacle1D";
    case InstanceFamily::kControlLQ: return "ControlLQ";
  }
  return "Unknown";
}

InstanceFamily family_from_string(std::string_view name) {
  for (auto f : {InstanceFamily::kScalarToy, InstanceFamily::kQuadraticBox, InstanceFamily::kRedundantEquality,
                 InstanceFamily::kObstacle1D, InstanceFamily::kControlLQ}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::kParse, "unknown instance family \"" + std::string(name) + "\"");
}

double Profile::operator()(double t) const {
  switch (kind) {
    case Kind::kConstant: return a;
    case Kind::kParabola: return a + b * (t - c) * (t - c);
    case Kind::kSine: return a * std::sin(b * std::numbers::pi * t) + c;
    case Kind::kInfinite: return kInf;
  }
  return a;
}

nlohmann::json profile_to_json(const Profile& p) {
  switch (p.kind) {
    case Profile::Kind::kConstant: return {{"type", "constant"}, {"value", p.a}};
    case Profile::Kind::kParabola: return {{"type", "parabola"}, {"base", p.a}, {"curvature", p.b}, {"center", p.c}};
    case Profile::Kind::kSine: return {{"type", "sine"}, {"amplitude", p.a}, {"frequency", p.b}, {"offset", p.c}};
    case Profile::Kind::kInfinite: return {{"type", "inf"}};
  }
  return nullptr;
}

Profile profile_from_json(const nlohmann::json& j) {
  try {
    if (j.is_number()) return Profile::constant(j.get<double>());
    if (j.is_string() && j.get<std::string>() == "inf") return Profile::infinite();
    const auto type = j.at("type").get<std::string>();
    if (type == "constant") return Profile::constant(j.at("value").get<double>());
    if (type == "parabola") {
      return Profile::parabola(j.at("base").get<double>(), j.at("curvature").get<double>(),
                               j.value("center", 0.5));
    }
    if (type == "sine") {
      return Profile::sine(j.at("amplitude").get<double>(), j.value("frequency", 1.0), j.value("offset", 0.0));
    }
    if (type == "inf") return Profile::infinite();
    throw Error(ErrorCode::kParse, "unknown profile type \"" + type + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("profile: ") + e.what());
  }
}

ProblemOracles make_scalar_toy() {
  ProblemOracles p("scalar-toy", InnerProductSpace(1), InnerProductSpace(1), ConvexSet::box(1, 1.0, kInf));
  p.f = [](const Vector& x) { return 0.5 * x[0] * x[0]; };
  p.grad_f = [](const Vector& x) { return x; };
  p.G = [](const Vector& x) { return x; };
  p.jac_apply = [](const Vector&, const Vector& d) { return d; };
  p.jac_adjoint_apply = [](const Vector&, const Vector& lambda) { return lambda; };
  p.hess_lagrangian_apply = [](const PrimalDual&, const Vector& d) { return d; };
  p.reference_kkt = PrimalDual{Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  return p;
}

ProblemOracles make_obstacle_1d(int N, const std::function<double(double)>& obstacle,
                                const std::function<double(double)>& load) {
  require_grid(N);
  const double h = grid_step(N);
  const double inv_h2 = 1.0 / (h * h);
  const Vector psi = sample(N, obstacle);
  auto b = std::make_shared<const Vector>(sample(N, load));
  require_finite(*b, "load");

  const auto space = InnerProductSpace::diagonal(Vector::Constant(N, h));
  ProblemOracles p("obstacle-1d", space, space, ConvexSet::box(Vector::Constant(N, -kInf), psi));
  p.f = [b, h, inv_h2](const Vector& u) { return h * (0.5 * u.dot(laplacian_apply(u, inv_h2)) - b->dot(u)); };
  p.grad_f = [b, inv_h2](const Vector& u) { return Vector(laplacian_apply(u, inv_h2) - *b); };
  p.G = [](const Vector& u) { return u; };
  p.jac_apply = [](const Vector&, const Vector& d) { return d; };
  p.jac_adjoint_apply = [](const Vector&, const Vector& lambda) { return lambda; };
  p.hess_lagrangian_apply = [inv_h2](const PrimalDual&, const Vector& d) { return laplacian_apply(d, inv_h2); };

  if (N <= kReferenceMaxGrid) {
    // Euclidean form: min h (u^T A u / 2 - b^T u) s.t. u <= psi; lambda = eta / h.
    const Matrix Q = h * laplacian_matrix(N);
    const BoxQpResult qp = solve_box_qp(Q, -h * *b, Vector::Constant(N, -kInf), psi);
    if (qp.converged) p.reference_kkt = PrimalDual{qp.x, qp.eta / h};
  }
  return p;
}

ProblemOracles make_control_lq(int N, double alpha, double lower, double upper,
                               const std::function<double(double)>& target) {
  require_grid(N);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kBadAlpha, "alpha must be positive");
  const double h = grid_step(N);
  const double inv_h2 = 1.0 / (h * h);
  auto yd = std::make_shared<const Vector>(sample(N, target));
  require_finite(*yd, "target");

  const auto space = InnerProductSpace::diagonal(Vector::Constant(2 * N, h));
  ProblemOracles p("control-lq", space, space,
                   ConvexSet::product({ConvexSet::zero(N), ConvexSet::box(N, lower, upper)}));
  p.f = [yd, h, alpha, N](const Vector& x) {
    const Vector e = x.head(N) - *yd;
    return 0.5 * h * e.squaredNorm() + 0.5 * alpha * h * x.tail(N).squaredNorm();
  };
  p.grad_f = [yd, alpha, N](const Vector& x) {
    Vector g(2 * N);
    g.head(N) = x.head(N) - *yd;
    g.tail(N) = alpha * x.tail(N);
    return g;
  };
  p.G = [inv_h2, N](const Vector& x) {
    Vector g(2 * N);
    g.head(N) = laplacian_apply(x.head(N), inv_h2) - x.tail(N);
    g.tail(N) = x.tail(N);
    return g;
  };
  p.jac_apply = [inv_h2, N](const Vector&, const Vector& d) {
    Vector g(2 * N);
    g.head(N) = laplacian_apply(d.head(N), inv_h2) - d.tail(N);
    g.tail(N) = d.tail(N);
    return g;
  };
  // Both spaces carry the same weight h, so the adjoint is the transpose.
  p.jac_adjoint_apply = [inv_h2, N](const Vector&, const Vector& lambda) {
    Vector g(2 * N);
    g.head(N) = laplacian_apply(lambda.head(N), inv_h2);
    g.tail(N) = lambda.tail(N) - lambda.head(N);
    return g;
  };
  p.hess_lagrangian_apply = [alpha, N](const PrimalDual&, const Vector& d) {
    Vector g(2 * N);
    g.head(N) = d.head(N);
    g.tail(N) = alpha * d.tail(N);
    return g;
  };

  if (N <= kReferenceMaxGrid) {
    // Eliminate y = A^{-1} u and solve the reduced box QP in u.
    const Matrix A = laplacian_matrix(N);
    const Eigen::PartialPivLU<Matrix> lu(A);
    const Matrix Ainv = lu.inverse();
    Matrix Q = h * (Ainv.transpose() * Ainv);
    Q.diagonal().array() += h * alpha;
    const Vector q = -h * (Ainv.transpose() * *yd);
    const BoxQpResult qp = solve_box_qp(Q, q, Vector::Constant(N, lower), Vector::Constant(N, upper));
    if (qp.converged) {
      const Vector u = qp.x;
      const Vector y = Ainv * u;
      const Vector l1 = -(Ainv.transpose() * (y - *yd));
      const Vector l2 = l1 - alpha * u;
      PrimalDual ref{Vector(2 * N), Vector(2 * N)};
      ref.x << y, u;
      ref.lambda << l1, l2;
      p.reference_kkt = std::move(ref);
    }
  }
  return p;
}

ProblemOracles make_redundant_equality(int n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "redundant-equality needs n >= 2");
  ProblemOracles p("redundant-equality", InnerProductSpace(n), InnerProductSpace(2), ConvexSet::zero(2));
  p.f = [](const Vector& x) { return 0.5 * x.squaredNorm() - x[0]; };
  p.grad_f = [](const Vector& x) {
    Vector g = x;
    g[0] -= 1.0;
    return g;
  };
  p.G = [](const Vector& x) {
    const double c = x[0] - 1.0;
    return Vector{{c, c + c * c}};
  };
  p.jac_apply = [](const Vector& x, const Vector& d) {
    const double c = x[0] - 1.0;
    return Vector{{d[0], (1.0 + 2.0 * c) * d[0]}};
  };
  p.jac_adjoint_apply = [n](const Vector& x, const Vector& lambda) {
    const double c = x[0] - 1.0;
    Vector g = Vector::Zero(n);
    g[0] = lambda[0] + (1.0 + 2.0 * c) * lambda[1];
    return g;
  };
  p.hess_lagrangian_apply = [](const PrimalDual& v, const Vector& d) {
    Vector out = d;
    out[0] += 2.0 * v.lambda[1] * d[0];
    return out;
  };
  Vector xbar = Vector::Zero(n);
  xbar[0] = 1.0;
  p.reference_kkt = PrimalDual{xbar, Vector::Zero(2)};
  return p;
}

ProblemOracles make_quadratic_box(const QuadraticBoxParams& params) {
  const int n = params.n;
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "quadratic-box needs n >= 1");
  if (params.m < 0) throw Error(ErrorCode::kInvalidArgument, "quadratic-box needs m >= 0");
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto gauss = [&](Index rows, Index cols) {
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
    return M;
  };

  const Matrix R = gauss(n, n);
  auto Q = std::make_shared<const Matrix>(R.transpose() * R / n + 0.5 * Matrix::Identity(n, n));
  auto q = std::make_shared<const Vector>(gauss(n, 1).col(0));

  const bool coupled = params.m > 0;
  const int m = coupled ? params.m : n;
  auto B = std::make_shared<const Matrix>(coupled ? gauss(m, n) : Matrix::Identity(m, n));
  auto c0 = std::make_shared<const Vector>(coupled ? Vector(gauss(m, 1).col(0)) : Vector::Zero(m));

  Vector lo(m), hi(m);
  for (int i = 0; i < m; ++i) {
    const double r = unif(rng);
    const double a = 0.1 + unif(rng);
    const double center = 0.5 * normal(rng);
    if (r < 0.4) {
      lo[i] = center - a;
      hi[i] = center + a;
    } else if (r < 0.6) {
      lo[i] = center;
      hi[i] = kInf;
    } else if (r < 0.8) {
      lo[i] = -kInf;
      hi[i] = center;
    } else if (r < 0.9) {
      lo[i] = -kInf;
      hi[i] = kInf;
    } else {
      lo[i] = hi[i] = center;
    }
  }

  ProblemOracles p("quadratic-box", InnerProductSpace(n), InnerProductSpace(m), ConvexSet::box(lo, hi));
  p.f = [Q, q](const Vector& x) { return 0.5 * x.dot(*Q * x) + q->dot(x); };
  p.grad_f = [Q, q](const Vector& x) { return Vector(*Q * x + *q); };
  p.G = [B, c0](const Vector& x) { return Vector(*B * x + *c0); };
  p.jac_apply = [B](const Vector&, const Vector& d) { return Vector(*B * d); };
  p.jac_adjoint_apply = [B](const Vector&, const Vector& lambda) { return Vector(B->transpose() * lambda); };
  p.hess_lagrangian_apply = [Q](const PrimalDual&, const Vector& d) { return Vector(*Q * d); };

  if (!coupled) {
    const BoxQpResult qp = solve_box_qp(*Q, *q, lo, hi);
    if (qp.converged) p.reference_kkt = PrimalDual{qp.x, qp.eta};
  }
  return p;
}

Instance make_instance(const InstanceSpec& spec) {
  nlohmann::json params = defaults_for(spec.family);
  if (!spec.parameters.is_null()) {
    if (!spec.parameters.is_object()) throw Error(ErrorCode::kParse, "instance parameters must be an object");
    for (const auto& [key, value] : spec.parameters.items()) {
      if (!params.contains(key)) {
        throw Error(ErrorCode::kParse,
                    "instance \"" + spec.name + "\": unknown parameter \"" + key + "\"");
      }
      params[key] = value;
    }
  }

  try {
    switch (spec.family) {
      case InstanceFamily::kScalarToy: {
        Instance inst{spec, make_scalar_toy(), {Vector::Constant(1, 2.0), Vector::Constant(1, -1.0)},
                      "closed form: 1 + lambda = 0 with lambda <= 0 active at x = 1"};
        inst.spec.parameters = params;
        return inst;
      }
      case InstanceFamily::kQuadraticBox: {
        const QuadraticBoxParams qp{params.at("n").get<int>(), params.at("m").get<int>(),
                                    params.at("seed").get<unsigned>()};
        ProblemOracles prob = make_quadratic_box(qp);
        PrimalDual start{Vector::Zero(prob.x_space.dim()), Vector::Zero(prob.y_space.dim())};
        Instance inst{spec, std::move(prob), std::move(start), "primal active-set box QP solver"};
        inst.spec.parameters = params;
        return inst;
      }
      case InstanceFamily::kRedundantEquality: {
        const int n = params.at("n").get<int>();
        ProblemOracles prob = make_redundant_equality(n);
        PrimalDual start{Vector::Zero(n), Vector{{0.5, -0.3}}};
        start.x[0] = 1.1;
        start.x[1] = 0.05;
        Instance inst{spec, std::move(prob), std::move(start),
                      "closed form: x = e_1, one element lambda = 0 of the multiplier line"};
        inst.spec.parameters = params;
        return inst;
      }
      case InstanceFamily::kObstacle1D: {
        const int N = params.at("N").get<int>();
        const Profile obstacle = profile_from_json(params.at("obstacle"));
        const Profile load = profile_from_json(params.at("load"));
        params["obstacle"] = profile_to_json(obstacle);
        params["load"] = profile_to_json(load);
        ProblemOracles prob = make_obstacle_1d(N, obstacle, load);
        PrimalDual start{Vector::Zero(N), Vector::Zero(N)};
        Instance inst{spec, std::move(prob), std::move(start), "primal active-set box QP solver on the nodal QP"};
        inst.spec.parameters = params;
        return inst;
      }
      case InstanceFamily::kControlLQ: {
        const int N = params.at("N").get<int>();
        const Profile target = profile_from_json(params.at("target"));
        for (const char* key : {"alpha", "lower", "upper"}) params[key] = real_to_json(param_double(params, key));
        params["target"] = profile_to_json(target);
        ProblemOracles prob = make_control_lq(N, param_double(params, "alpha"), param_double(params, "lower"),
                                              param_double(params, "upper"), target);
        PrimalDual start{Vector::Zero(2 * N), Vector::Zero(2 * N)};
        Instance inst{spec, std::move(prob), std::move(start),
                      "primal active-set box QP solver on the reduced (state-eliminated) QP"};
        inst.spec.parameters = params;
        return inst;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "instance \"" + spec.name + "\": " + e.what());
  }
  throw Error(ErrorCode::kParse, "unhandled instance family");
}

InstanceSpec default_spec(std::string_view name) {
  const InstanceFamily family = family_for_name(name);
  return InstanceSpec{std::string(name), family, defaults_for(family)};
}

std::vector<InstanceSpec> catalog() {
  std::vector<InstanceSpec> out;
  for (const char* name : {"scalar-toy", "quadratic-box", "redundant-equality", "obstacle-1d", "control-lq"}) {
    out.push_back(default_spec(name));
  }
  return out;
}

nlohmann::json spec_to_json(const InstanceSpec& spec) {
  return {{"name", spec.name}, {"family", std::string(to_string(spec.family))}, {"params", spec.parameters}};
}

InstanceSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string()) {
    throw Error(ErrorCode::kParse, "instance must be an object with a string \"name\"");
  }
  InstanceSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.family = j.contains("family") ? family_from_string(j.at("family").get<std::string>())
                                     : family_for_name(spec.name);
  if (j.contains("params")) spec.parameters = j.at("params");
  else if (j.contains("parameters")) spec.parameters = j.at("parameters");
  return spec;
}

}  // namespace stabsqp
