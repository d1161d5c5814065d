#pragma once

#include <optional>
#include <vector>

#include "ipmforge/lp_model.hpp"

namespace ipmforge {

// Finite-horizon problem: minimize sum_k |u_k| subject to x_{k+1} = A x_k + B u_k,
// fixed endpoints x_0, x_N, and box limits on inputs and states.
struct MpcSpec {
  Matrix a_dyn;  // s x s
  Matrix b_dyn;  // s x u
  Vector x0;     // s
  Vector xN;     // s
  int horizon = 2;
  double u_bound = 1.0;
  double x_bound = 1.0;

  int state_dim() const { return static_cast<int>(a_dyn.rows()); }
  int input_dim() const { return static_cast<int>(b_dyn.cols()); }
  void validate() const;
};

enum class VarRole { input, state, abs_slack };

struct VarEntry {
  VarRole role;
  int step;
  int channel;
};

// Decision vector order: u_0..u_{N-1}, x_1..x_{N-1}, s_0..s_{N-1} where s_k are
// the |u_k| epigraph slacks (one per scalar input channel).
struct VariableLayout {
  std::vector<VarEntry> entries;
  int horizon = 0;
  int state_dim = 0;
  int input_dim = 0;
  Vector x0;
  Vector xN;

  int size() const { return static_cast<int>(entries.size()); }
  int index_of(VarRole role, int step, int channel) const;  // fatal on bad query
};

struct Trajectory {
  std::vector<Vector> inputs;  // u_0..u_{N-1}
  std::vector<Vector> states;  // x_0..x_N
};

struct EncodeResult {
  LpInstance lp;
  VariableLayout layout;
  std::optional<FeasibleWitness> start;  // strictly interior point, when one is found
};

// Dynamics equalities are relaxed to |row| <= relax_margin so a strict interior
// exists; every variable gets a two-sided box, making the feasible set bounded.
EncodeResult encode(const MpcSpec& spec, double epsilon,
                    double relax_margin = Tolerances::relax_margin);

Trajectory decode(const VariableLayout& layout, const Vector& z);

// MPC JSON: {"A_dyn": [[..]..], "B_dyn": [[..]..], "x0": [...], "xN": [...],
//            "N": int, "u_bound": num, "x_bound": num, "epsilon": num,
//            "relax_margin": num (optional)}
struct MpcFile {
  MpcSpec spec;
  double epsilon = 1e-2;
  double relax_margin = Tolerances::relax_margin;
};

MpcFile mpc_from_json(const Json& j);
Json layout_to_json(const VariableLayout& layout);
VariableLayout layout_from_json(const Json& j);

}  // namespace ipmforge
