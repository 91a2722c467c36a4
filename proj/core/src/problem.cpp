// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0

#include "stabsqp/problem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "stabsqp/error.hpp"

namespace stabsqp {

ProblemOracles::ProblemOracles(std::string name_, InnerProductSpace x_space_, InnerProductSpace y_space_,
                               ConvexSet K_)
    : name(std::move(name_)), x_space(std::move(x_space_)), y_space(std::move(y_space_)), K(std::move(K_)) {
  if (K.dim() != y_space.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "constraint set dimension does not match Y");
  }
}

void ProblemOracles::validate() const {
  if (!f || !grad_f || !G || !jac_apply || !jac_adjoint_apply) {
    throw Error(ErrorCode::kInvalidArgument, "problem '" + name + "' is missing a required oracle");
  }
  if (K.dim() != y_space.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "constraint set dimension does not match Y");
  }
  if (reference_kkt) check_point(*reference_kkt);
}

void ProblemOracles::check_point(const PrimalDual& v) const {
  x_space.check(v.x, "primal point");
  y_space.check(v.lambda, "multiplier");
  require_finite(v.x, "primal point");
  require_finite(v.lambda, "multiplier");
}

double norm(const ProblemOracles& problem, const PrimalDual& v) {
  return problem.x_space.norm(v.x) + problem.y_space.norm(v.lambda);
}

double distance(const ProblemOracles& problem, const PrimalDual& a, const PrimalDual& b) {
  return problem.x_space.norm(a.x - b.x) + problem.y_space.norm(a.lambda - b.lambda);
}

double lagrangian(const ProblemOracles& problem, const PrimalDual& v) {
  problem.check_point(v);
  return problem.f(v.x) + problem.y_space.inner(v.lambda, problem.G(v.x));
}

Vector lagrangian_grad(const ProblemOracles& problem, const PrimalDual& v) {
  problem.check_point(v);
  Vector g = problem.grad_f(v.x);
  problem.x_space.check(g, "grad_f");
  Vector adj = problem.jac_adjoint_apply(v.x, v.lambda);
  problem.x_space.check(adj, "jac_adjoint_apply");
  return g + adj;
}

Vector hessian_apply(const ProblemOracles& problem, const PrimalDual& v, const Vector& d) {
  problem.x_space.check(d, "hessian direction");
  if (problem.hess_lagrangian_apply) return problem.hess_lagrangian_apply(v, d);
  const double h = 1e-5 * (1.0 + problem.x_space.norm(v.x));
  const PrimalDual plus{v.x + h * d, v.lambda};
  const PrimalDual minus{v.x - h * d, v.lambda};
  return (lagrangian_grad(problem, plus) - lagrangian_grad(problem, minus)) / (2.0 * h);
}

double sigma(const ProblemOracles& problem, const PrimalDual& v) {
  const Vector lx = lagrangian_grad(problem, v);
  const Vector gx = problem.G(v.x);
  problem.y_space.check(gx, "G");
  return problem.x_space.norm(lx) + normal_cone_residual(problem.K, problem.y_space, gx, v.lambda);
}

KktCheck kkt_check(const ProblemOracles& problem, const PrimalDual& v, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kkt_check tolerance must be positive");
  KktCheck out{};
  out.stationarity = problem.x_space.norm(lagrangian_grad(problem, v));
  out.complementarity = normal_cone_residual(problem.K, problem.y_space, problem.G(v.x), v.lambda);
  const double scaled = tol * (1.0 + norm(problem, v));
  out.is_kkt = out.stationarity <= scaled && out.complementarity <= scaled;
  return out;
}

Matrix hessian_matrix(const ProblemOracles& problem, const PrimalDual& v) {
  const Index n = problem.x_space.dim();
  Matrix H(n, n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    H.col(j) = hessian_apply(problem, v, e);
    e[j] = 0.0;
  }
  return H;
}

Matrix jacobian_matrix(const ProblemOracles& problem, const Vector& x) {
  const Index n = problem.x_space.dim();
  const Index m = problem.y_space.dim();
  Matrix J(m, n);
  Vector e = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    Vector col = problem.jac_apply(x, e);
    problem.y_space.check(col, "jac_apply");
    J.col(j) = col;
    e[j] = 0.0;
  }
  return J;
}

Matrix jacobian_adjoint_matrix(const ProblemOracles& problem, const Vector& x) {
  const Index n = problem.x_space.dim();
  const Index m = problem.y_space.dim();
  Matrix Jt(n, m);
  Vector e = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    e[j] = 1.0;
    Vector col = problem.jac_adjoint_apply(x, e);
    problem.x_space.check(col, "jac_adjoint_apply");
    Jt.col(j) = col;
    e[j] = 0.0;
  }
  return Jt;
}

double adjoint_error(const ProblemOracles& problem, const Vector& x, const Vector& d, const Vector& lambda) {
  const double lhs = problem.y_space.inner(lambda, problem.jac_apply(x, d));
  const double rhs = problem.x_space.inner(problem.jac_adjoint_apply(x, lambda), d);
  return std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

double hessian_symmetry_error(const ProblemOracles& problem, const PrimalDual& v, const Vector& d, const Vector& e) {
  const double lhs = problem.x_space.inner(hessian_apply(problem, v, d), e);
  const double rhs = problem.x_space.inner(hessian_apply(problem, v, e), d);
  return std::abs(lhs - rhs) / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

double gradient_fd_error(const ProblemOracles& problem, const Vector& x, const Vector& dir) {
  const double h = 1e-6 * (1.0 + problem.x_space.norm(x));
  const double fd = (problem.f(x + h * dir) - problem.f(x - h * dir)) / (2.0 * h);
  const double an = problem.x_space.inner(problem.grad_f(x), dir);
  return std::abs(fd - an) / std::max(1.0, std::abs(an));
}

ComplementarityMargins complementarity_margins(const ProblemOracles& problem, const PrimalDual& v,
                                               double bound_tol) {
  const Vector gx = problem.G(v.x);
  const Vector lo = problem.K.lower_bounds();
  const Vector hi = problem.K.upper_bounds();
  ComplementarityMargins m{kInf, kInf, 0, 0};
  for (Index i = 0; i < gx.size(); ++i) {
    if (lo[i] == hi[i]) continue;
    const double slack = std::min(gx[i] - lo[i], hi[i] - gx[i]);
    if (slack <= bound_tol) {
      m.active_multiplier = std::min(m.active_multiplier, std::abs(v.lambda[i]));
      ++m.active_count;
    } else {
      m.inactive_slack = std::min(m.inactive_slack, slack);
      ++m.inactive_count;
    }
  }
  return m;
}

double reduced_hessian_min_eigenvalue(const ProblemOracles& problem, const PrimalDual& v, double active_tol) {
  const Matrix H = hessian_matrix(problem, v);
  const Matrix J = jacobian_matrix(problem, v.x);
  const Vector gx = problem.G(v.x);
  const Vector lo = problem.K.lower_bounds();
  const Vector hi = problem.K.upper_bounds();
  std::vector<Index> rows;
  for (Index i = 0; i < gx.size(); ++i) {
    const bool fixed = lo[i] == hi[i];
    const bool on_bound = std::min(std::abs(gx[i] - lo[i]), std::abs(hi[i] - gx[i])) <= 1e-9 * (1.0 + std::abs(gx[i]));
    if (fixed || (on_bound && std::abs(v.lambda[i]) > active_tol)) rows.push_back(i);
  }
  const Matrix M = problem.x_space.gram_matrix();
  Matrix Z;
  if (rows.empty()) {
    Z = Matrix::Identity(H.rows(), H.cols());
  } else {
    Matrix A(static_cast<Index>(rows.size()), J.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) A.row(static_cast<Index>(r)) = J.row(rows[r]);
    Eigen::FullPivLU<Matrix> lu(A);
    Z = lu.kernel();
    if (lu.rank() == A.cols()) return kInf;  // trivial subspace
  }
  const Matrix MH = M * H;
  const Matrix sym = 0.5 * (MH + MH.transpose());
  const Matrix R = Z.transpose() * sym * Z;
  const Matrix B = Z.transpose() * M * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(R, B, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace stabsqp
