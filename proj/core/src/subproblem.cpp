// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/subproblem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "stabsqp/error.hpp"

namespace stabsqp {
namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon();

// F(d, mu) for weight s >= 0. With s = 0 the constraint value no longer
// depends on lambda and F is the KKT map of the ordinary subproblem.
class ProjectedKkt {
 public:
  ProjectedKkt(const ProblemOracles& problem, const Linearization& lin, const Vector& lambda, double s)
      : p_(problem), lin_(lin), lambda_(lambda), s_(s), n_(lin.H.rows()), m_(lin.J.rows()) {}

  [[nodiscard]] Index n() const { return n_; }
  [[nodiscard]] Index m() const { return m_; }

  [[nodiscard]] Vector constraint_value(const Vector& d, const Vector& mu) const {
    Vector w = lin_.G + lin_.J * d;
    if (s_ != 0.0) w -= s_ * (mu - lambda_);
    return w;
  }

  [[nodiscard]] Vector residual(const Vector& d, const Vector& mu) const {
    Vector F(n_ + m_);
    F.head(n_) = lin_.grad_f + lin_.H * d + lin_.J_adj * mu;
    const Vector w = constraint_value(d, mu);
    F.tail(m_) = w - p_.K.project(p_.y_space, w + mu);
    return F;
  }

  [[nodiscard]] double merit(const Vector& F) const {
    const Vector f1 = F.head(n_);
    const Vector f2 = F.tail(m_);
    return 0.5 * (p_.x_space.inner(f1, f1) + p_.y_space.inner(f2, f2));
  }

  [[nodiscard]] double norm(const Vector& F) const {
    return p_.x_space.norm(F.head(n_)) + p_.y_space.norm(F.tail(m_));
  }

  // Level below which ||F|| cannot be resolved in double precision.
  [[nodiscard]] double attainable_floor(const Vector& d, const Vector& mu) const {
    const Vector a = lin_.grad_f.cwiseAbs() + lin_.H.cwiseAbs() * d.cwiseAbs() + lin_.J_adj.cwiseAbs() * mu.cwiseAbs();
    Vector b = lin_.G.cwiseAbs() + lin_.J.cwiseAbs() * d.cwiseAbs() + mu.cwiseAbs();
    if (s_ != 0.0) b += s_ * (mu.cwiseAbs() + lambda_.cwiseAbs());
    return 10.0 * static_cast<double>(n_ + m_) * kUnitRoundoff * (p_.x_space.norm(a) + p_.y_space.norm(b));
  }

  [[nodiscard]] Matrix jacobian(const Vector& d, const Vector& mu, double tau) const {
    const Vector w = constraint_value(d, mu);
    const Vector mask = p_.K.projection_mask(w + mu);
    Matrix Jac = Matrix::Zero(n_ + m_, n_ + m_);
    Jac.topLeftCorner(n_, n_) = lin_.H;
    if (tau > 0.0) Jac.topLeftCorner(n_, n_).diagonal().array() += tau;
    Jac.topRightCorner(n_, m_) = lin_.J_adj;
    for (Index i = 0; i < m_; ++i) {
      const double keep = 1.0 - mask[i];
      Jac.block(n_ + i, 0, 1, n_) = keep * lin_.J.row(i);
      Jac(n_ + i, n_ + i) = -s_ * keep - mask[i];
    }
    return Jac;
  }

 private:
  const ProblemOracles& p_;
  const Linearization& lin_;
  const Vector& lambda_;
  double s_;
  Index n_;
  Index m_;
};

struct NewtonOutcome {
  Vector d;
  Vector mu;
  double residual;
  double tolerance;
  int iterations;
  SubproblemStatus status;
  std::vector<double> merit_history;
  double regularization;
};

NewtonOutcome newton_attempt(const ProjectedKkt& sys, Vector d, Vector mu, double epsilon, double tau,
                             const NewtonOptions& opts) {
  NewtonOutcome out{std::move(d), std::move(mu), kInf, epsilon, 0, SubproblemStatus::kMaxIter, {}, tau};
  const Index n = sys.n();
  Vector F = sys.residual(out.d, out.mu);
  double phi = sys.merit(F);
  for (int it = 0;; ++it) {
    out.residual = sys.norm(F);
    out.tolerance = std::max(epsilon, sys.attainable_floor(out.d, out.mu));
    if (!std::isfinite(out.residual)) {
      out.status = SubproblemStatus::kSingular;
      return out;
    }
    if (out.residual <= out.tolerance) {
      out.status = SubproblemStatus::kConverged;
      return out;
    }
    if (it >= opts.max_iterations) {
      out.status = SubproblemStatus::kMaxIter;
      return out;
    }
    Eigen::FullPivLU<Matrix> lu(sys.jacobian(out.d, out.mu, tau));
    if (!lu.isInvertible()) {
      out.status = SubproblemStatus::kSingular;
      return out;
    }
    const Vector step = lu.solve(-F);
    if (!step.allFinite()) {
      out.status = SubproblemStatus::kSingular;
      return out;
    }

    // Armijo backtracking on 1/2 ||F||^2; the Newton direction has slope -2 phi.
    double t = 1.0;
    bool accepted = false;
    Vector d_trial, mu_trial, F_trial;
    double phi_trial = phi;
    while (t >= opts.min_step) {
      d_trial = out.d + t * step.head(n);
      mu_trial = out.mu + t * step.tail(sys.m());
      F_trial = sys.residual(d_trial, mu_trial);
      phi_trial = sys.merit(F_trial);
      if (phi_trial <= (1.0 - 2.0 * opts.armijo * t) * phi) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.status = SubproblemStatus::kMaxIter;
      out.iterations = it + 1;
      return out;
    }
    out.d = std::move(d_trial);
    out.mu = std::move(mu_trial);
    F = std::move(F_trial);
    phi = phi_trial;
    out.merit_history.push_back(phi);
    out.iterations = it + 1;
  }
}

// Tries the plain Newton iteration from (d0, mu0), then restarts from the
// same point with each shift of the regularization ladder.
NewtonOutcome newton_with_ladder(const ProjectedKkt& sys, const Vector& d0, const Vector& mu0, double epsilon,
                                 const NewtonOptions& opts) {
  NewtonOutcome best = newton_attempt(sys, d0, mu0, epsilon, 0.0, opts);
  int total = best.iterations;
  if (best.status == SubproblemStatus::kConverged) return best;
  bool all_singular = best.status == SubproblemStatus::kSingular;
  for (double tau : opts.regularization_ladder) {
    NewtonOutcome attempt = newton_attempt(sys, d0, mu0, epsilon, tau, opts);
    total += attempt.iterations;
    all_singular = all_singular && attempt.status == SubproblemStatus::kSingular;
    if (attempt.status == SubproblemStatus::kConverged || attempt.residual < best.residual ||
        !std::isfinite(best.residual)) {
      best = std::move(attempt);
    }
    if (best.status == SubproblemStatus::kConverged) break;
  }
  best.iterations = total;
  if (best.status != SubproblemStatus::kConverged) {
    best.status = all_singular ? SubproblemStatus::kSingular : SubproblemStatus::kMaxIter;
  }
  return best;
}

void require_box_like(const ConvexSet& K, const char* who) {
  if (!K.is_box_like()) {
    throw Error(ErrorCode::kUnsupportedSet, std::string(who) + " supports only zero/orthant/box products");
  }
}

SubproblemSolution to_solution(NewtonOutcome&& o) {
  SubproblemSolution s;
  s.d = std::move(o.d);
  s.mu = std::move(o.mu);
  s.rho = s.mu;
  s.residual = o.residual;
  s.tolerance = o.tolerance;
  s.iterations = o.iterations;
  s.status = o.status;
  s.merit_history = std::move(o.merit_history);
  s.regularization = o.regularization;
  return s;
}

}  // namespace

std::string_view to_string(SubproblemStatus status) {
  switch (status) {
    case SubproblemStatus::kConverged: return "Converged";
    case SubproblemStatus::kMaxIter: return "MaxIter";
    case SubproblemStatus::kSingular: return "Singular";
    case SubproblemStatus::kInfeasible: return "Infeasible";
  }
  return "Unknown";
}

Linearization linearize(const ProblemOracles& problem, const PrimalDual& v) {
  problem.check_point(v);
  Linearization lin;
  lin.grad_f = problem.grad_f(v.x);
  problem.x_space.check(lin.grad_f, "grad_f");
  lin.G = problem.G(v.x);
  problem.y_space.check(lin.G, "G");
  lin.H = hessian_matrix(problem, v);
  lin.J = jacobian_matrix(problem, v.x);
  lin.J_adj = jacobian_adjoint_matrix(problem, v.x);
  return lin;
}

StabilizedSubproblem::StabilizedSubproblem(const ProblemOracles& base, PrimalDual v, double epsilon,
                                           std::optional<double> nu)
    : StabilizedSubproblem(base, v, stabsqp::sigma(base, v), epsilon, nu, true) {}

StabilizedSubproblem StabilizedSubproblem::with_weight(const ProblemOracles& base, PrimalDual v, double weight,
                                                       double epsilon, std::optional<double> nu) {
  return StabilizedSubproblem(base, std::move(v), weight, epsilon, nu, true);
}

StabilizedSubproblem::StabilizedSubproblem(const ProblemOracles& base, PrimalDual v, double weight, double epsilon,
                                           std::optional<double> nu, bool)
    : base_(&base), v_(std::move(v)), sigma_(weight), epsilon_(epsilon), nu_(nu) {
  if (!(sigma_ > 0.0)) {
    throw Error(ErrorCode::kKktPoint, "stabilization weight must be positive (sigma(v) = 0 at KKT points)");
  }
  if (!(epsilon_ >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "subproblem tolerance must be nonnegative");
  if (nu_ && !(*nu_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ball radius nu must be positive");
  lin_ = linearize(base, v_);
}

Vector StabilizedSubproblem::constraint_value(const Vector& d, const Vector& mu) const {
  return lin_.G + lin_.J * d - sigma_ * (mu - v_.lambda);
}

double StabilizedSubproblem::objective(const Vector& d, const Vector& mu) const {
  const auto& X = base_->x_space;
  return X.inner(lin_.grad_f, d) + 0.5 * X.inner(lin_.H * d, d) + 0.5 * sigma_ * base_->y_space.inner(mu, mu);
}

SubproblemPoint feasible_init(const StabilizedSubproblem& sub) {
  const auto& base = sub.base();
  const double s = sub.sigma();
  const Vector& G = sub.linearization().G;
  const Vector& lambda = sub.point().lambda;
  const Vector proj = base.K.project(base.y_space, G + s * lambda);
  return {Vector::Zero(base.x_space.dim()), G / s + lambda - proj / s};
}

Vector kkt_residual_map(const StabilizedSubproblem& sub, const Vector& d, const Vector& mu) {
  sub.base().x_space.check(d, "subproblem step d");
  sub.base().y_space.check(mu, "subproblem multiplier mu");
  const ProjectedKkt sys(sub.base(), sub.linearization(), sub.point().lambda, sub.sigma());
  return sys.residual(d, mu);
}

double residual_norm(const ProblemOracles& problem, const Vector& stacked) {
  const Index n = problem.x_space.dim();
  const Index m = problem.y_space.dim();
  if (stacked.size() != n + m) throw Error(ErrorCode::kDimensionMismatch, "stacked residual");
  return problem.x_space.norm(stacked.head(n)) + problem.y_space.norm(stacked.tail(m));
}

SubproblemSolution solve_stabilized(const StabilizedSubproblem& sub, const NewtonOptions& opts) {
  require_box_like(sub.base().K, "semismooth Newton");
  if (!(sub.epsilon() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "solve_stabilized needs epsilon > 0");
  const ProjectedKkt sys(sub.base(), sub.linearization(), sub.point().lambda, sub.sigma());
  const SubproblemPoint start = feasible_init(sub);
  SubproblemSolution sol = to_solution(newton_with_ladder(sys, start.d, start.mu, sub.epsilon(), opts));
  sol.objective = sub.objective(sol.d, sol.mu);
  if (sub.nu()) sol.hit_ball = sub.base().x_space.norm(sol.d) >= *sub.nu();
  return sol;
}

SubproblemSolution brute_force_oracle(const StabilizedSubproblem& sub) {
  const auto& base = sub.base();
  require_box_like(base.K, "brute_force_oracle");
  const Index n = base.x_space.dim();
  const Index m = base.y_space.dim();
  if (m > 12) throw Error(ErrorCode::kTooLarge, "active-set enumeration limited to dim Y <= 12");

  const auto& lin = sub.linearization();
  const Vector& lambda = sub.point().lambda;
  const double s = sub.sigma();
  const Vector lo = base.K.lower_bounds();
  const Vector hi = base.K.upper_bounds();

  // 0: inactive (mu_i = 0), 1: at lower, 2: at upper, 3: fixed (lo == hi).
  std::vector<std::vector<int>> choices(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    auto& c = choices[static_cast<std::size_t>(i)];
    if (lo[i] == hi[i]) {
      c = {3};
      continue;
    }
    c.push_back(0);
    if (std::isfinite(lo[i])) c.push_back(1);
    if (std::isfinite(hi[i])) c.push_back(2);
  }

  SubproblemSolution best;
  best.status = SubproblemStatus::kSingular;
  best.objective = kInf;
  bool any_nonsingular = false;
  int candidates = 0;

  std::vector<std::size_t> counter(static_cast<std::size_t>(m), 0);
  Matrix A(n + m, n + m);
  Vector rhs(n + m);
  while (true) {
    ++candidates;
    A.setZero();
    A.topLeftCorner(n, n) = lin.H;
    A.topRightCorner(n, m) = lin.J_adj;
    rhs.head(n) = -lin.grad_f;
    for (Index i = 0; i < m; ++i) {
      const int st = choices[static_cast<std::size_t>(i)][counter[static_cast<std::size_t>(i)]];
      if (st == 0) {
        A(n + i, n + i) = 1.0;
        rhs[n + i] = 0.0;
      } else {
        const double bound = (st == 2) ? hi[i] : lo[i];
        A.block(n + i, 0, 1, n) = lin.J.row(i);
        A(n + i, n + i) = -s;
        rhs[n + i] = bound - lin.G[i] - s * lambda[i];
      }
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.isInvertible()) {
      any_nonsingular = true;
      const Vector z = lu.solve(rhs);
      const Vector d = z.head(n);
      const Vector mu = z.tail(m);
      const Vector w = sub.constraint_value(d, mu);
      const double tol = 1e-9 * (1.0 + w.lpNorm<Eigen::Infinity>() + mu.lpNorm<Eigen::Infinity>());
      bool ok = true;
      for (Index i = 0; i < m && ok; ++i) {
        const int st = choices[static_cast<std::size_t>(i)][counter[static_cast<std::size_t>(i)]];
        if (st == 0) ok = w[i] >= lo[i] - tol && w[i] <= hi[i] + tol;
        else if (st == 1) ok = mu[i] <= tol;
        else if (st == 2) ok = mu[i] >= -tol;
      }
      if (ok) {
        const double obj = sub.objective(d, mu);
        if (obj < best.objective) {
          best.d = d;
          best.mu = mu;
          best.objective = obj;
          best.status = SubproblemStatus::kConverged;
        }
      }
    }

    Index pos = 0;
    while (pos < m) {
      auto& cnt = counter[static_cast<std::size_t>(pos)];
      if (++cnt < choices[static_cast<std::size_t>(pos)].size()) break;
      cnt = 0;
      ++pos;
    }
    if (pos == m) break;
  }

  best.iterations = candidates;
  if (best.status != SubproblemStatus::kConverged) {
    best.status = any_nonsingular ? SubproblemStatus::kInfeasible : SubproblemStatus::kSingular;
    best.d = Vector::Zero(n);
    best.mu = Vector::Zero(m);
  }
  best.rho = best.mu;
  best.residual = residual_norm(base, kkt_residual_map(sub, best.d, best.mu));
  best.tolerance = sub.epsilon();
  if (sub.nu()) best.hit_ball = base.x_space.norm(best.d) >= *sub.nu();
  return best;
}

double linearized_feasibility_gap(const ProblemOracles& problem, const Vector& x) {
  require_box_like(problem.K, "linearized_feasibility_gap");
  const auto& X = problem.x_space;
  const auto& Y = problem.y_space;
  const Vector G = problem.G(x);
  const Matrix J = jacobian_matrix(problem, x);
  const Matrix J_adj = jacobian_adjoint_matrix(problem, x);
  const Index n = X.dim();

  auto residual = [&](const Vector& d) {
    const Vector y = G + J * d;
    return Vector(y - problem.K.project(Y, y));
  };

  // phi(d) = 1/2 dist(G + J d, K)^2 is convex and C^1 with gradient J^* r.
  Vector d = Vector::Zero(n);
  Vector r = residual(d);
  double phi = 0.5 * Y.inner(r, r);
  const double scale = 1.0 + Y.norm(G);
  for (int it = 0; it < 200 && phi > 0.0; ++it) {
    const Vector grad = J_adj * r;
    const double gnorm = X.norm(grad);
    if (gnorm <= 1e-15 * scale * (1.0 + J.norm())) break;
    const Vector y = G + J * d;
    const Vector mask = problem.K.projection_mask(y);
    Matrix Hphi = J_adj * (Vector::Ones(mask.size()) - mask).asDiagonal() * J;
    const double tau = 1e-12 * (1.0 + Hphi.norm()) + std::min(1.0, gnorm);
    Hphi.diagonal().array() += tau;
    const Vector step = Eigen::FullPivLU<Matrix>(Hphi).solve(-grad);
    const double slope = X.inner(grad, step);
    if (!(slope < 0.0)) break;
    double t = 1.0;
    bool accepted = false;
    while (t >= 1e-12) {
      const Vector rt = residual(d + t * step);
      const double phit = 0.5 * Y.inner(rt, rt);
      if (phit <= phi + 1e-4 * t * slope) {
        d += t * step;
        r = rt;
        accepted = phit < phi;
        phi = phit;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return std::sqrt(2.0 * phi);
}

SubproblemSolution solve_ordinary(const ProblemOracles& problem, const PrimalDual& v, double epsilon,
                                  const NewtonOptions& opts) {
  require_box_like(problem.K, "solve_ordinary");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "solve_ordinary needs epsilon > 0");
  const Linearization lin = linearize(problem, v);
  const ProjectedKkt sys(problem, lin, v.lambda, 0.0);
  SubproblemSolution sol =
      to_solution(newton_with_ladder(sys, Vector::Zero(problem.x_space.dim()), v.lambda, epsilon, opts));
  const auto& X = problem.x_space;
  sol.objective = X.inner(lin.grad_f, sol.d) + 0.5 * X.inner(lin.H * sol.d, sol.d);
  if (sol.status != SubproblemStatus::kConverged &&
      linearized_feasibility_gap(problem, v.x) > opts.infeasibility_tol) {
    sol.status = SubproblemStatus::kInfeasible;
  }
  return sol;
}

}  // namespace stabsqp
