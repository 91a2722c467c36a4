// Copyright 2026 The stabsqp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Primal active-set method for  min 1/2 x^T Q x + q^T x  s.t.  l <= x <= u
// with Q symmetric positive definite (Euclidean coordinates). Used to build
// reference KKT points for catalog instances; it shares no code with the
// semismooth Newton subproblem solver.

#pragma once

#include "stabsqp/hilbert.hpp"

namespace stabsqp {

struct BoxQpResult {
  Vector x;
  /// eta = -(Qx + q), an element of the normal cone of the box at x.
  Vector eta;
  int iterations = 0;
  bool converged = false;
};

[[nodiscard]] BoxQpResult solve_box_qp(const Matrix& Q, const Vector& q, const Vector& lower, const Vector& upper,
                                       int max_iterations = -1);

}  // namespace stabsqp
