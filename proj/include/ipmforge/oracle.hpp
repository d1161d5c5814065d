#pragma once

#include <vector>

#include "ipmforge/lp_model.hpp"

namespace ipmforge {

struct OracleResult {
  double optimum = 0.0;
  Vector argmin;
  std::vector<int> active_set;  // sorted row indices, size n
};

// Brute-force ground truth: enumerates every n-subset of rows, solves the
// square system by Gaussian elimination (independent of the Cholesky path the
// solver uses), keeps feasible vertices, and returns the cheapest one. Ties
// inside Tolerances::oracle_tie keep the lexicographically smallest subset.
//
// Guard: n <= 8 and C(m, n) <= 1e6, else GuardExceeded.
OracleResult solve_by_vertex_enumeration(const LpInstance& p);

}  // namespace ipmforge
