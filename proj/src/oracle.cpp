#include "ipmforge/oracle.hpp"

#include <array>
#include <cmath>

namespace ipmforge {

namespace {

constexpr int kMaxVertexDim = 8;
constexpr double kMaxSubsets = 1e6;

double binomial(int m, int n) {
  double r = 1.0;
  for (int i = 1; i <= n; ++i) r = r * static_cast<double>(m - n + i) / static_cast<double>(i);
  return r;
}

// Partial-pivot elimination on an n x (n+1) augmented system, n <= 8.
// Returns false when a pivot falls under the relative guard.
bool solve_square(double* aug, int n) {
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(aug[i * (n + 1) + j]));
  if (scale == 0.0) return false;
  const int w = n + 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(aug[r * w + col]) > std::fabs(aug[piv * w + col])) piv = r;
    if (std::fabs(aug[piv * w + col]) <= Tolerances::oracle_det_rel * scale) return false;
    if (piv != col)
      for (int j = col; j < w; ++j) std::swap(aug[piv * w + j], aug[col * w + j]);
    const double inv = 1.0 / aug[col * w + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = aug[r * w + col] * inv;
      if (f == 0.0) continue;
      for (int j = col; j < w; ++j) aug[r * w + j] -= f * aug[col * w + j];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = aug[i * w + n];
    for (int j = i + 1; j < n; ++j) s -= aug[i * w + j] * aug[j * w + n];
    aug[i * w + n] = s / aug[i * w + i];
  }
  return true;
}

}  // namespace

OracleResult solve_by_vertex_enumeration(const LpInstance& p) {
  p.validate();
  const int m = p.rows();
  const int n = p.cols();
  if (n > kMaxVertexDim)
    throw GuardExceeded("oracle: n = " + std::to_string(n) + " exceeds " +
                        std::to_string(kMaxVertexDim));
  if (binomial(m, n) > kMaxSubsets)
    throw GuardExceeded("oracle: C(" + std::to_string(m) + ", " + std::to_string(n) +
                        ") exceeds 1e6 subsets");

  std::vector<int> subset(n);
  for (int i = 0; i < n; ++i) subset[i] = i;

  bool found = false;
  OracleResult best;
  std::vector<double> aug(static_cast<std::size_t>(n) * (n + 1));
  Vector x(n);

  auto visit = [&]() {
    for (int r = 0; r < n; ++r) {
      for (int j = 0; j < n; ++j) aug[r * (n + 1) + j] = p.a(subset[r], j);
      aug[r * (n + 1) + n] = p.b[subset[r]];
    }
    if (!solve_square(aug.data(), n)) return;
    for (int j = 0; j < n; ++j) x[j] = aug[j * (n + 1) + n];
    if (!x.allFinite()) return;
    for (int i = 0; i < m; ++i) {
      const double ax = kernels::dot_fold(p.a.data() + static_cast<std::ptrdiff_t>(i) * n,
                                          x.data(), n);
      if (ax > p.b[i] + Tolerances::oracle_feas) return;
    }
    const double cost = kernels::dot_fold(p.c.data(), x.data(), n);
    // lexicographic enumeration; strict improvement keeps the earliest subset on ties
    if (!found || cost < best.optimum - Tolerances::oracle_tie) {
      found = true;
      best.optimum = cost;
      best.argmin = x;
      best.active_set = subset;
    }
  };

  // lexicographic n-subset enumeration
  for (;;) {
    visit();
    int i = n - 1;
    while (i >= 0 && subset[i] == m - n + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < n; ++j) subset[j] = subset[j - 1] + 1;
  }

  if (!found) throw NoFeasibleVertex("oracle: no feasible basic point");
  return best;
}

}  // namespace ipmforge
