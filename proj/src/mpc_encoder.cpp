#include "ipmforge/mpc_encoder.hpp"

#include <cmath>
#include <string>

namespace ipmforge {

void MpcSpec::validate() const {
  const int s = state_dim();
  const int u = input_dim();
  if (s < 1 || u < 1) throw ShapeError("MpcSpec: empty state or input");
  if (a_dyn.rows() != a_dyn.cols()) throw ShapeError("MpcSpec: A_dyn must be square");
  if (b_dyn.rows() != s) throw ShapeError("MpcSpec: B_dyn must have as many rows as A_dyn");
  if (x0.size() != s || xN.size() != s) throw ShapeError("MpcSpec: x0/xN must have length s");
  if (horizon < 2) throw InvalidArgument("MpcSpec: horizon must be >= 2");
  if (!(u_bound > 0.0) || !(x_bound > 0.0))
    throw InvalidArgument("MpcSpec: bounds must be > 0");
  require_finite(a_dyn, "MpcSpec.A_dyn");
  require_finite(b_dyn, "MpcSpec.B_dyn");
  require_finite(x0, "MpcSpec.x0");
  require_finite(xN, "MpcSpec.xN");
}

int VariableLayout::index_of(VarRole role, int step, int channel) const {
  const int N = horizon, s = state_dim, u = input_dim;
  int idx = -1;
  switch (role) {
    case VarRole::input:
      if (step < 0 || step >= N || channel < 0 || channel >= u) break;
      idx = step * u + channel;
      break;
    case VarRole::state:
      if (step < 1 || step >= N || channel < 0 || channel >= s) break;
      idx = N * u + (step - 1) * s + channel;
      break;
    case VarRole::abs_slack:
      if (step < 0 || step >= N || channel < 0 || channel >= u) break;
      idx = N * u + (N - 1) * s + step * u + channel;
      break;
  }
  if (idx < 0)
    throw ShapeError("VariableLayout: no variable at step " + std::to_string(step) +
                     ", channel " + std::to_string(channel));
  return idx;
}

namespace {

VariableLayout make_layout(const MpcSpec& spec) {
  VariableLayout layout;
  layout.horizon = spec.horizon;
  layout.state_dim = spec.state_dim();
  layout.input_dim = spec.input_dim();
  layout.x0 = spec.x0;
  layout.xN = spec.xN;
  const int N = spec.horizon;
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < layout.input_dim; ++j)
      layout.entries.push_back({VarRole::input, k, j});
  for (int k = 1; k < N; ++k)
    for (int j = 0; j < layout.state_dim; ++j)
      layout.entries.push_back({VarRole::state, k, j});
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < layout.input_dim; ++j)
      layout.entries.push_back({VarRole::abs_slack, k, j});
  return layout;
}

}  // namespace

EncodeResult encode(const MpcSpec& spec, double epsilon, double relax_margin) {
  spec.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("encode: epsilon must be > 0");
  if (!(relax_margin > 0.0)) throw InvalidArgument("encode: relax_margin must be > 0");

  const int N = spec.horizon;
  const int s = spec.state_dim();
  const int u = spec.input_dim();
  EncodeResult res;
  res.layout = make_layout(spec);
  const VariableLayout& L = res.layout;
  const int n = L.size();
  const int m = 2 * N * u + 2 * N * s + 2 * n;

  LpInstance& lp = res.lp;
  lp.a = Matrix::Zero(m, n);
  lp.b = Vector::Zero(m);
  lp.c = Vector::Zero(n);
  lp.epsilon = epsilon;

  int row = 0;
  // epigraph: u - slack <= 0 and -u - slack <= 0, per scalar channel
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < u; ++j) {
      const int ui = L.index_of(VarRole::input, k, j);
      const int si = L.index_of(VarRole::abs_slack, k, j);
      lp.a(row, ui) = 1.0;
      lp.a(row, si) = -1.0;
      lp.b[row++] = 0.0;
      lp.a(row, ui) = -1.0;
      lp.a(row, si) = -1.0;
      lp.b[row++] = 0.0;
    }
  }
  // dynamics x_{k+1} = A x_k + B u_k, each scalar row relaxed to |.| <= relax_margin
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < s; ++i) {
      Vector coeff = Vector::Zero(n);
      double constant = 0.0;
      if (k + 1 <= N - 1)
        coeff[L.index_of(VarRole::state, k + 1, i)] += 1.0;
      else
        constant += spec.xN[i];
      for (int j = 0; j < s; ++j) {
        if (k >= 1)
          coeff[L.index_of(VarRole::state, k, j)] -= spec.a_dyn(i, j);
        else
          constant -= spec.a_dyn(i, j) * spec.x0[j];
      }
      for (int j = 0; j < u; ++j) coeff[L.index_of(VarRole::input, k, j)] -= spec.b_dyn(i, j);
      lp.a.row(row) = coeff.transpose();
      lp.b[row++] = relax_margin - constant;
      lp.a.row(row) = -coeff.transpose();
      lp.b[row++] = relax_margin + constant;
    }
  }
  // two-sided box on every variable
  for (int v = 0; v < n; ++v) {
    const VarEntry& e = L.entries[static_cast<std::size_t>(v)];
    const double bound = e.role == VarRole::state   ? spec.x_bound
                         : e.role == VarRole::input ? spec.u_bound
                                                    : 2.0 * spec.u_bound;
    lp.a(row, v) = 1.0;
    lp.b[row++] = bound;
    lp.a(row, v) = -1.0;
    lp.b[row++] = bound;
  }
  // cost selects the slacks
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < u; ++j) lp.c[L.index_of(VarRole::abs_slack, k, j)] = 1.0;
  lp.validate();

  // candidate start: states on the x0 -> xN segment, inputs by least squares,
  // slacks lifted above |u|
  Vector z = Vector::Zero(n);
  std::vector<Vector> states(static_cast<std::size_t>(N) + 1);
  states[0] = spec.x0;
  states[static_cast<std::size_t>(N)] = spec.xN;
  for (int k = 1; k < N; ++k)
    states[static_cast<std::size_t>(k)] =
        spec.x0 + (static_cast<double>(k) / N) * (spec.xN - spec.x0);
  const auto cod = spec.b_dyn.completeOrthogonalDecomposition();
  bool witness_ok = true;
  for (int k = 0; k < N && witness_ok; ++k) {
    const Vector target = states[static_cast<std::size_t>(k) + 1] -
                          spec.a_dyn * states[static_cast<std::size_t>(k)];
    const Vector uk = cod.solve(target);
    const Vector resid = spec.b_dyn * uk - target;
    if (resid.cwiseAbs().maxCoeff() >= 0.5 * relax_margin) witness_ok = false;
    for (int j = 0; j < u; ++j) {
      z[L.index_of(VarRole::input, k, j)] = uk[j];
      z[L.index_of(VarRole::abs_slack, k, j)] = std::fabs(uk[j]) + 0.5 * spec.u_bound;
    }
  }
  for (int k = 1; k < N; ++k)
    for (int j = 0; j < s; ++j)
      z[L.index_of(VarRole::state, k, j)] = states[static_cast<std::size_t>(k)][j];
  if (witness_ok) {
    try {
      res.start = check_strict_feasibility(lp, z);
    } catch (const NotStrictlyInterior&) {
      res.start.reset();
    }
  }
  return res;
}

Trajectory decode(const VariableLayout& layout, const Vector& z) {
  if (z.size() != layout.size())
    throw ShapeError("decode: z has length " + std::to_string(z.size()) + ", layout expects " +
                     std::to_string(layout.size()));
  const int N = layout.horizon, s = layout.state_dim, u = layout.input_dim;
  Trajectory tr;
  for (int k = 0; k < N; ++k) {
    Vector uk(u);
    for (int j = 0; j < u; ++j) uk[j] = z[layout.index_of(VarRole::input, k, j)];
    tr.inputs.push_back(std::move(uk));
  }
  tr.states.push_back(layout.x0);
  for (int k = 1; k < N; ++k) {
    Vector xk(s);
    for (int j = 0; j < s; ++j) xk[j] = z[layout.index_of(VarRole::state, k, j)];
    tr.states.push_back(std::move(xk));
  }
  tr.states.push_back(layout.xN);
  return tr;
}

namespace {

Matrix matrix_field(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw SchemaError("mpc json: missing \"" + key + "\"");
  const Json& arr = j.at(key);
  if (!arr.is_array() || arr.empty() || !arr[0].is_array() || arr[0].empty())
    throw SchemaError("mpc json: \"" + key + "\" must be an array of non-empty arrays");
  const int rows = static_cast<int>(arr.size());
  const int cols = static_cast<int>(arr[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!arr[i].is_array() || static_cast<int>(arr[i].size()) != cols)
      throw SchemaError("mpc json: \"" + key + "[" + std::to_string(i) + "]\" must have " +
                        std::to_string(cols) + " entries");
    for (int k = 0; k < cols; ++k) {
      if (!arr[i][k].is_number())
        throw SchemaError("mpc json: \"" + key + "[" + std::to_string(i) + "][" +
                          std::to_string(k) + "]\" is not a number");
      m(i, k) = arr[i][k].get<double>();
    }
  }
  return m;
}

Vector vec_field(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw SchemaError("mpc json: missing or non-array \"" + key + "\"");
  const Json& arr = j.at(key);
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw SchemaError("mpc json: \"" + key + "[" + std::to_string(i) + "]\" is not a number");
    v[static_cast<int>(i)] = arr[i].get<double>();
  }
  return v;
}

double num_field(const Json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw SchemaError("mpc json: missing or non-numeric \"" + key + "\"");
  return j.at(key).get<double>();
}

}  // namespace

MpcFile mpc_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("mpc json: top level must be an object");
  MpcFile f;
  f.spec.a_dyn = matrix_field(j, "A_dyn");
  f.spec.b_dyn = matrix_field(j, "B_dyn");
  f.spec.x0 = vec_field(j, "x0");
  f.spec.xN = vec_field(j, "xN");
  if (!j.contains("N") || !j.at("N").is_number_integer())
    throw SchemaError("mpc json: missing or non-integer \"N\"");
  f.spec.horizon = j.at("N").get<int>();
  f.spec.u_bound = num_field(j, "u_bound");
  f.spec.x_bound = num_field(j, "x_bound");
  f.epsilon = num_field(j, "epsilon");
  if (j.contains("relax_margin")) f.relax_margin = num_field(j, "relax_margin");
  f.spec.validate();
  return f;
}

namespace {

const char* role_name(VarRole r) {
  switch (r) {
    case VarRole::input: return "u";
    case VarRole::state: return "x";
    case VarRole::abs_slack: return "abs_slack";
  }
  return "?";
}

VarRole role_from(const std::string& s) {
  if (s == "u") return VarRole::input;
  if (s == "x") return VarRole::state;
  if (s == "abs_slack") return VarRole::abs_slack;
  throw SchemaError("layout json: unknown role \"" + s + "\"");
}

}  // namespace

Json layout_to_json(const VariableLayout& layout) {
  Json j;
  j["n"] = layout.size();
  j["horizon"] = layout.horizon;
  j["state_dim"] = layout.state_dim;
  j["input_dim"] = layout.input_dim;
  j["x0"] = std::vector<double>(layout.x0.data(), layout.x0.data() + layout.x0.size());
  j["xN"] = std::vector<double>(layout.xN.data(), layout.xN.data() + layout.xN.size());
  Json entries = Json::array();
  for (const VarEntry& e : layout.entries)
    entries.push_back(Json{{"role", role_name(e.role)}, {"step", e.step}, {"channel", e.channel}});
  j["entries"] = std::move(entries);
  return j;
}

VariableLayout layout_from_json(const Json& j) {
  VariableLayout layout;
  try {
    layout.horizon = j.at("horizon").get<int>();
    layout.state_dim = j.at("state_dim").get<int>();
    layout.input_dim = j.at("input_dim").get<int>();
    layout.x0 = vec_field(j, "x0");
    layout.xN = vec_field(j, "xN");
    for (const auto& e : j.at("entries"))
      layout.entries.push_back(
          {role_from(e.at("role").get<std::string>()), e.at("step").get<int>(),
           e.at("channel").get<int>()});
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("layout json: ") + e.what());
  }
  if (j.contains("n") && j.at("n").get<int>() != layout.size())
    throw SchemaError("layout json: \"n\" does not match entry count");
  return layout;
}

}  // namespace ipmforge
