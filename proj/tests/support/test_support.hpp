#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ipmforge/ipm_core.hpp"
#include "ipmforge/lp_model.hpp"

namespace ipmforge::testing {

// The unit interval as an LP: A = [[1], [-1]], b = [1, 1], c = [1].
// Optimum -1 at x = -1; barrier Hessian at the origin is [[2]].
inline LpInstance unit1(double epsilon = 1e-2) {
  LpInstance p;
  p.a = Matrix(2, 1);
  p.a << 1.0, -1.0;
  p.b = Vector(2);
  p.b << 1.0, 1.0;
  p.c = Vector::Constant(1, 1.0);
  p.epsilon = epsilon;
  return p;
}

// Independent triple-loop product, the oracle for mat_mul.
inline Matrix naive_mat_mul(const Matrix& a, const Matrix& b) {
  Matrix r = Matrix::Zero(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int k = 0; k < a.cols(); ++k) r(i, j) += a(i, k) * b(k, j);
  return r;
}

// Deterministic helpers for property tests.
struct TestRng {
  std::mt19937_64 gen;
  explicit TestRng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  }
  Vector vector(int n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Matrix matrix(int r, int c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }
};

// A strictly interior point: the witness shrunk toward a random direction.
// theta < 1 keeps a safety margin from the boundary.
inline Vector interior_point(const LpInstance& p, const Vector& witness, TestRng& rng,
                             double max_theta = 0.8) {
  const Vector dir = rng.vector(p.cols());
  const Vector ad = p.a * dir;
  const Vector slack = p.b - p.a * witness;
  double theta = max_theta;
  for (int i = 0; i < p.rows(); ++i)
    if (ad[i] > 0.0) theta = std::min(theta, max_theta * slack[i] / ad[i]);
  return witness + theta * dir;
}

// The benchmark-protocol shape: (n, m) in {2,3,4} x [3n, 5n).
struct SuitePoint {
  int n, m;
  std::uint64_t seed;
};

inline std::vector<SuitePoint> make_suite(int per_pair) {
  std::vector<SuitePoint> pts;
  for (int n = 2; n <= 4; ++n)
    for (int m = 3 * n; m < 5 * n; ++m)
      for (int i = 0; i < per_pair; ++i)
        pts.push_back({n, m,
                       10000u * static_cast<unsigned>(n) + 100u * static_cast<unsigned>(m) +
                           static_cast<unsigned>(i)});
  return pts;
}

}  // namespace ipmforge::testing
