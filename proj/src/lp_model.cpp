#include "ipmforge/lp_model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace ipmforge {

void LpInstance::validate() const {
  const int m = rows();
  const int n = cols();
  if (n < 1) throw ShapeError("LpInstance: needs at least one variable");
  if (b.size() != m)
    throw ShapeError("LpInstance: b has length " + std::to_string(b.size()) + ", expected " +
                     std::to_string(m));
  if (c.size() != n)
    throw ShapeError("LpInstance: c has length " + std::to_string(c.size()) + ", expected " +
                     std::to_string(n));
  if (m < n + 1)
    throw ShapeError("LpInstance: m = " + std::to_string(m) + " rows cannot bound " +
                     std::to_string(n) + " variables (need m >= n+1)");
  require_finite(a, "LpInstance.A");
  require_finite(b, "LpInstance.b");
  require_finite(c, "LpInstance.c");
  if (!(epsilon > 0.0)) throw SchemaError("LpInstance: epsilon must be > 0");
}

FeasibleWitness check_strict_feasibility(const LpInstance& p, const Vector& x, double margin) {
  if (x.size() != p.cols())
    throw ShapeError("check_strict_feasibility: x has length " + std::to_string(x.size()) +
                     ", expected " + std::to_string(p.cols()));
  require_finite(x, "check_strict_feasibility x");
  const int m = p.rows();
  const int n = p.cols();
  Vector slacks(m);
  for (int i = 0; i < m; ++i) {
    const double ax = kernels::dot_fold(p.a.data() + static_cast<std::ptrdiff_t>(i) * n,
                                        x.data(), n);
    slacks[i] = p.b[i] - ax;
  }
  int worst = 0;
  for (int i = 1; i < m; ++i)
    if (slacks[i] < slacks[worst]) worst = i;
  if (!(slacks[worst] > margin)) throw NotStrictlyInterior(worst, slacks[worst]);
  return FeasibleWitness{x, slacks};
}

LpInstance add_hypercube(const LpInstance& p, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("add_hypercube: radius must be > 0");
  const int m = p.rows();
  const int n = p.cols();
  LpInstance out;
  out.a = Matrix::Zero(m + 2 * n, n);
  out.b = Vector::Zero(m + 2 * n);
  if (m > 0) {
    out.a.topRows(m) = p.a;
    out.b.head(m) = p.b;
  }
  for (int i = 0; i < n; ++i) {
    out.a(m + 2 * i, i) = 1.0;
    out.b[m + 2 * i] = radius;
    out.a(m + 2 * i + 1, i) = -1.0;
    out.b[m + 2 * i + 1] = radius;
  }
  out.c = p.c;
  out.epsilon = p.epsilon;
  return out;
}

namespace {

// Seeded stream with sampling that does not depend on the standard library's
// unspecified distribution algorithms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {  // [0, 1), 53 bits
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {  // Box-Muller
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

Vector unit_gaussian(RandomStream& rng, int n) {
  Vector v(n);
  for (;;) {
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace

RandomInstance random_instance(int n, int m, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random_instance: n must be >= 1");
  if (m < 3 * n)
    throw InvalidArgument("random_instance: m = " + std::to_string(m) + " < 3n = " +
                          std::to_string(3 * n));
  RandomStream rng(seed);
  LpInstance lp;
  lp.a = Matrix::Zero(m, n);
  lp.b = Vector::Zero(m);
  lp.c = unit_gaussian(rng, n);
  lp.epsilon = 1e-2;
  // hypercube first, radius 1
  for (int i = 0; i < n; ++i) {
    lp.a(2 * i, i) = 1.0;
    lp.b[2 * i] = 1.0;
    lp.a(2 * i + 1, i) = -1.0;
    lp.b[2 * i + 1] = 1.0;
  }
  for (int r = 2 * n; r < m; ++r) {
    lp.a.row(r) = unit_gaussian(rng, n).transpose();
    lp.b[r] = rng.uniform(0.5, 2.0);
  }
  lp.validate();
  FeasibleWitness start = check_strict_feasibility(lp, Vector::Zero(n));
  return RandomInstance{std::move(lp), std::move(start)};
}

namespace {

Vector vector_field(const Json& j, const std::string& key, int expected_len) {
  if (!j.contains(key)) throw SchemaError("lp json: missing \"" + key + "\"");
  const Json& arr = j.at(key);
  if (!arr.is_array()) throw SchemaError("lp json: \"" + key + "\" must be an array");
  if (expected_len >= 0 && static_cast<int>(arr.size()) != expected_len)
    throw SchemaError("lp json: \"" + key + "\" has " + std::to_string(arr.size()) +
                      " entries, expected " + std::to_string(expected_len));
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw SchemaError("lp json: \"" + key + "[" + std::to_string(i) + "]\" is not a number");
    v[static_cast<int>(i)] = arr[i].get<double>();
  }
  return v;
}

}  // namespace

LpFile lp_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("lp json: top level must be an object");
  if (!j.contains("A")) throw SchemaError("lp json: missing \"A\"");
  const Json& ja = j.at("A");
  if (!ja.is_array() || ja.empty()) throw SchemaError("lp json: \"A\" must be a non-empty array");
  const int m = static_cast<int>(ja.size());
  if (!ja[0].is_array() || ja[0].empty())
    throw SchemaError("lp json: \"A[0]\" must be a non-empty array");
  const int n = static_cast<int>(ja[0].size());
  LpFile out;
  out.lp.a = Matrix(m, n);
  for (int i = 0; i < m; ++i) {
    if (!ja[i].is_array() || static_cast<int>(ja[i].size()) != n)
      throw SchemaError("lp json: \"A[" + std::to_string(i) + "]\" must have " +
                        std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k) {
      if (!ja[i][k].is_number())
        throw SchemaError("lp json: \"A[" + std::to_string(i) + "][" + std::to_string(k) +
                          "]\" is not a number");
      out.lp.a(i, k) = ja[i][k].get<double>();
    }
  }
  out.lp.b = vector_field(j, "b", m);
  out.lp.c = vector_field(j, "c", n);
  if (!j.contains("epsilon") || !j.at("epsilon").is_number())
    throw SchemaError("lp json: missing or non-numeric \"epsilon\"");
  out.lp.epsilon = j.at("epsilon").get<double>();
  out.lp.validate();
  if (j.contains("x0")) out.x0 = vector_field(j, "x0", n);
  return out;
}

Json lp_to_json(const LpInstance& p, const std::optional<Vector>& x0) {
  Json j;
  Json rows = Json::array();
  for (int i = 0; i < p.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < p.cols(); ++k) row.push_back(p.a(i, k));
    rows.push_back(std::move(row));
  }
  j["A"] = std::move(rows);
  j["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  j["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
  j["epsilon"] = p.epsilon;
  if (x0) j["x0"] = std::vector<double>(x0->data(), x0->data() + x0->size());
  return j;
}

}  // namespace ipmforge
