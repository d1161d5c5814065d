#include <cmath>

#include "doctest.h"

#include "ipmforge/barrier.hpp"
#include "support/test_support.hpp"

using namespace ipmforge;
using ipmforge::testing::TestRng;
using ipmforge::testing::unit1;

namespace {

// Central finite differences of the barrier value, step 1e-6 * (1 + ||x||).
Vector fd_gradient(const LpInstance& p, const Vector& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Vector g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (eval_barrier(p, hi).value - eval_barrier(p, lo).value) / (2.0 * h);
  }
  return g;
}

Matrix fd_hessian(const LpInstance& p, const Vector& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Matrix hess(x.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    Vector hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    const Vector dg = (eval_barrier(p, hi).grad - eval_barrier(p, lo).grad) / (2.0 * h);
    for (int i = 0; i < x.size(); ++i) hess(i, j) = dg[i];
  }
  return hess;
}

}  // namespace

TEST_CASE("unit interval barrier at the origin") {
  BarrierEval be = eval_barrier(unit1(), Vector::Zero(1));
  CHECK(be.value == 0.0);
  CHECK(be.grad[0] == 0.0);
  CHECK(be.hess(0, 0) == 2.0);
}

TEST_CASE("unit interval barrier at 0.5") {
  BarrierEval be = eval_barrier(unit1(), Vector::Constant(1, 0.5));
  CHECK(be.value == doctest::Approx(-std::log(0.5) - std::log(1.5)).epsilon(1e-12));
  CHECK(be.value == doctest::Approx(0.287682).epsilon(1e-5));
}

TEST_CASE("barrier requires the strict interior") {
  CHECK_THROWS_AS(eval_barrier(unit1(), Vector::Constant(1, 1.0)), NotStrictlyInterior);
}

TEST_CASE("gradient and Hessian match finite differences") {
  TestRng rng(303);
  for (std::uint64_t seed : {21u, 22u}) {
    RandomInstance inst = random_instance(3, 10, seed);
    for (int rep = 0; rep < 20; ++rep) {
      const Vector x = ipmforge::testing::interior_point(inst.lp, inst.start.x, rng);
      BarrierEval be = eval_barrier(inst.lp, x);
      const Vector g_fd = fd_gradient(inst.lp, x);
      CHECK((g_fd - be.grad).cwiseAbs().maxCoeff() <=
            1e-5 * (1.0 + be.grad.cwiseAbs().maxCoeff()));
      const Matrix h_fd = fd_hessian(inst.lp, x);
      CHECK((h_fd - be.hess).cwiseAbs().maxCoeff() <=
            1e-5 * (1.0 + be.hess.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("hessian factor reconstructs the hessian") {
  TestRng rng(304);
  RandomInstance inst = random_instance(4, 13, 9);
  const Vector x = ipmforge::testing::interior_point(inst.lp, inst.start.x, rng);
  BarrierEval be = eval_barrier(inst.lp, x);
  const Matrix rec = mat_mul(be.hess_factor.lower, transpose(be.hess_factor.lower));
  const double scale = be.hess.cwiseAbs().maxCoeff();
  CHECK((rec - be.hess).cwiseAbs().maxCoeff() <= Tolerances::chol_reconstruct_rel * scale);
}

TEST_CASE("adjusted cost") {
  LpInstance p = unit1();
  const Vector x = Vector::Constant(1, 0.3);
  CHECK(adjusted_cost(p, x, 0.0) == eval_barrier(p, x).value);
  CHECK(adjusted_cost(p, Vector::Zero(1), 3.0) == 0.0);
  // linear, increasing in t when c^T x > 0
  CHECK(adjusted_cost(p, x, 2.0) > adjusted_cost(p, x, 1.0));
}

TEST_CASE("local norm closed forms") {
  BarrierEval be = eval_barrier(unit1(), Vector::Zero(1));
  CHECK(local_norm(be, Vector::Zero(1)) == 0.0);
  CHECK(local_norm(be, Vector::Constant(1, 1.0)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("local norm homogeneity") {
  TestRng rng(305);
  RandomInstance inst = random_instance(3, 9, 31);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector x = ipmforge::testing::interior_point(inst.lp, inst.start.x, rng);
    BarrierEval be = eval_barrier(inst.lp, x);
    const Vector y = rng.vector(3);
    const double alpha = rng.uniform(-2.0, 2.0);
    CHECK(std::fabs(local_norm(be, alpha * y) - std::fabs(alpha) * local_norm(be, y)) <= 1e-9);
  }
}

TEST_CASE("local norm triangle inequality") {
  TestRng rng(306);
  RandomInstance inst = random_instance(3, 12, 32);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector x = ipmforge::testing::interior_point(inst.lp, inst.start.x, rng);
    BarrierEval be = eval_barrier(inst.lp, x);
    const Vector u = rng.vector(3), v = rng.vector(3);
    CHECK(local_norm(be, u + v) <= local_norm(be, u) + local_norm(be, v) + 1e-9);
  }
}

TEST_CASE("dt scaling makes the step norm exactly gamma") {
  TestRng rng(307);
  RandomInstance inst = random_instance(3, 10, 33);
  const double gamma = 1.0 / 12.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Vector x = ipmforge::testing::interior_point(inst.lp, inst.start.x, rng);
    BarrierEval be = eval_barrier(inst.lp, x);
    const double dt = gamma / local_norm(be, inst.lp.c);
    CHECK(std::fabs(local_norm(be, dt * inst.lp.c) - gamma) <= 1e-12);
  }
}

TEST_CASE("acc predicate") {
  LpInstance p = unit1();
  BarrierEval be = eval_barrier(p, Vector::Zero(1));
  // at the exact center with t = 0 the lhs vanishes
  AccResult at0 = acc(p, be, 0.0, 0.25);
  CHECK(at0.holds);
  CHECK(at0.lhs == 0.0);

  AccResult soft = acc(p, be, 0.1, 0.25);
  CHECK(soft.lhs == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(soft.holds);

  // lhs beyond the bound
  AccResult hard = acc(p, be, 10.0, 0.25);
  CHECK_FALSE(hard.holds);
}
