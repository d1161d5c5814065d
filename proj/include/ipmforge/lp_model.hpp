#pragma once

#include <cstdint>
#include <optional>

#include "json.hpp"

#include "ipmforge/linalg.hpp"

namespace ipmforge {

using Json = nlohmann::ordered_json;

// Canonical problem: minimize c^T x subject to A x <= b, with target gap epsilon.
struct LpInstance {
  Matrix a;  // m x n
  Vector b;  // m
  Vector c;  // n
  double epsilon = 1e-2;

  int rows() const { return static_cast<int>(a.rows()); }
  int cols() const { return static_cast<int>(a.cols()); }

  // A bounded full-dimensional polytope needs m >= n+1 rows; entries must be
  // finite and epsilon positive.
  void validate() const;
};

// A strictly interior point together with its slack vector b - A x.
struct FeasibleWitness {
  Vector x;
  Vector slacks;
};

// Returns the witness, or raises NotStrictlyInterior naming the row whose
// slack is smallest.
FeasibleWitness check_strict_feasibility(const LpInstance& p, const Vector& x,
                                         double margin = Tolerances::feas_margin);

// Appends the 2n rows x_i <= radius, -x_i <= radius (paired per variable).
LpInstance add_hypercube(const LpInstance& p, double radius);

struct RandomInstance {
  LpInstance lp;
  FeasibleWitness start;  // the origin
};

// Deterministic in seed: a radius-1 hypercube plus m-2n unit-normalized
// Gaussian rows with right-hand sides in [0.5, 2.0], keeping the origin
// strictly interior. Requires m >= 3n.
RandomInstance random_instance(int n, int m, std::uint64_t seed);

// LP JSON: {"A": [[...]...], "b": [...], "c": [...], "epsilon": e, "x0": [...] (optional)}
struct LpFile {
  LpInstance lp;
  std::optional<Vector> x0;
};

LpFile lp_from_json(const Json& j);
Json lp_to_json(const LpInstance& p, const std::optional<Vector>& x0 = std::nullopt);

}  // namespace ipmforge
