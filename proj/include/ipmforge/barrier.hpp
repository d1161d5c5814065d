#pragma once

#include "ipmforge/lp_model.hpp"

namespace ipmforge {

// F(x) = sum_i -log(b_i - A_i x) together with its first two derivatives at x.
// grad = sum_i A_i^T / s_i, hess = sum_i A_i^T A_i / s_i^2 with s = b - A x.
struct BarrierEval {
  double value = 0.0;
  Vector grad;
  Matrix hess;
  CholFactor hess_factor;
};

// Raises NotStrictlyInterior when any slack is <= margin, NotPositiveDefinite
// when the Hessian cannot be factored (rank-deficient A).
BarrierEval eval_barrier(const LpInstance& p, const Vector& x,
                         double margin = Tolerances::feas_margin);

// t * c^T x + F(x)
double adjusted_cost(const LpInstance& p, const Vector& x, double t);

// ||y||_x = sqrt(y^T hess^{-1} y) via the cached factorization.
double local_norm(const BarrierEval& be, const Vector& y);

struct AccResult {
  bool holds;
  double lhs;  // ||t c + F'(x)||_x
};

// Approximate centering condition: ||t c + grad||_x <= bound (+ slack).
AccResult acc(const LpInstance& p, const BarrierEval& be, double t, double bound,
              double slack = Tolerances::acc_slack);

}  // namespace ipmforge
