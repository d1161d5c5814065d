#include "ipmforge/barrier.hpp"

#include <cmath>

namespace ipmforge {

// The loops below mirror the generated kernel's statement order exactly
// (slacks, reciprocals, gradient, then Hessian by outer-product accumulation),
// so a specialized kernel and this evaluation round identically.
BarrierEval eval_barrier(const LpInstance& p, const Vector& x, double margin) {
  const int m = p.rows();
  const int n = p.cols();
  FeasibleWitness w = check_strict_feasibility(p, x, margin);
  const Vector& s = w.slacks;

  Vector inv_s(m), inv_s2(m);
  for (int i = 0; i < m; ++i) inv_s[i] = 1.0 / s[i];
  for (int i = 0; i < m; ++i) inv_s2[i] = inv_s[i] / s[i];

  BarrierEval be;
  be.value = 0.0;
  for (int i = 0; i < m; ++i) be.value -= std::log(s[i]);

  be.grad = Vector(n);
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += p.a(i, r) * inv_s[i];
    be.grad[r] = acc;
  }

  be.hess = Matrix(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += (p.a(i, r) * p.a(i, c)) * inv_s2[i];
      be.hess(r, c) = acc;
    }
  }
  require_finite(be.grad, "barrier gradient");
  require_finite(be.hess, "barrier hessian");
  be.hess_factor = chol_factor(be.hess);
  return be;
}

double adjusted_cost(const LpInstance& p, const Vector& x, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("adjusted_cost: t must be >= 0");
  FeasibleWitness w = check_strict_feasibility(p, x);
  double value = 0.0;
  for (int i = 0; i < p.rows(); ++i) value -= std::log(w.slacks[i]);
  return t * dot(p.c, x) + value;
}

double local_norm(const BarrierEval& be, const Vector& y) {
  if (y.size() != be.hess_factor.dim)
    throw ShapeError("local_norm: y has length " + std::to_string(y.size()) + ", expected " +
                     std::to_string(be.hess_factor.dim));
  const Vector z = chol_solve(be.hess_factor, y);
  const double q = kernels::dot_fold(y.data(), z.data(), static_cast<int>(y.size()));
  return std::sqrt(std::max(q, 0.0));
}

AccResult acc(const LpInstance& p, const BarrierEval& be, double t, double bound, double slack) {
  if (!(t >= 0.0)) throw InvalidArgument("acc: t must be >= 0");
  const int n = p.cols();
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = p.c[i] * t + be.grad[i];
  const double lhs = local_norm(be, v);
  return AccResult{lhs <= bound + slack, lhs};
}

}  // namespace ipmforge
