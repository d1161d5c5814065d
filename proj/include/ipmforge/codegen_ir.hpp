#pragma once

#include <string>
#include <vector>

#include "ipmforge/lp_model.hpp"

namespace ipmforge::codegen {

// Straight-line, allocation-free solver IR. Every operand is a named flat
// array: either a baked constant or a declared global whose name is prefixed
// by the function that owns it. The only loop is the fixed-trip path-following
// loop.

struct KernelSizes {
  int n = 0;
  int m = 0;
  int trip_count = 0;
};

struct ConstDecl {
  std::string name;
  int len = 0;
  std::vector<double> data;
};

struct GlobalDecl {
  std::string name;
  int len = 0;
};

// Scalar expression over array elements and literals, used by ElemAssign.
struct Expr {
  enum class Kind { lit, ref, add, sub, mul, div, neg, sqrt_op, log_op };
  Kind kind = Kind::lit;
  double lit = 0.0;
  std::string array;  // ref
  int index = 0;      // ref
  std::vector<Expr> args;

  static Expr L(double v);
  static Expr R(std::string array, int index);
  static Expr bin(Kind k, Expr a, Expr b);
  static Expr un(Kind k, Expr a);
};

struct Stmt {
  enum class Op {
    elem_assign,  // dst[dst_index] = expr
    mat_mul,      // dst = a * b, row-major (rows, inner, cols)
    mat_add,      // dst[i] = a[i] + b[i], len entries
    scale,        // dst[i] = a[i] * scalar[0], len entries
    neg,          // dst[i] = -a[i], len entries
    dot,          // dst[0] = sum a[i]*b[i], len entries
    sqrt_op,      // dst[0] = sqrt(a[0])
    div,          // dst[0] = a[0] / b[0]
    chol_factor,  // dst = lower Cholesky of a, dim x dim
    chol_solve,   // dst = (L L^T)^{-1} b using lower factor a, dim entries
    assert_contract,
    fixed_loop,
    call,
  };
  Op op = Op::call;
  std::string dst;
  std::string a;
  std::string b;
  std::string scalar;  // scale: name of a length-1 array
  int rows = 0, inner = 0, cols = 0;
  int len = 0;
  int dim = 0;
  int dst_index = 0;
  Expr expr;                 // elem_assign
  std::string tag;           // assert_contract
  std::string callee;        // call
  int count = 0;             // fixed_loop
  std::vector<Stmt> body;    // fixed_loop
};

struct Function {
  std::string name;
  std::vector<Stmt> body;
};

// Runtime-checkable contract referenced by AssertContract tags. Bounds and
// slacks are baked at specialization time.
struct ContractCheck {
  enum class Kind { feasible, acc, progress, lower, t_stop };
  std::string tag;
  Kind kind = Kind::feasible;
  double bound = 0.0;
  double slack = 0.0;
};

struct KernelProgram {
  KernelSizes sizes;
  std::vector<ConstDecl> constants;
  std::vector<GlobalDecl> globals;
  std::vector<Function> functions;  // ordered: compute, pathfollowing, ..., set_* kernels
  std::vector<ContractCheck> checks;

  const ConstDecl* find_constant(const std::string& name) const;
  const GlobalDecl* find_global(const std::string& name) const;
  const Function* find_function(const std::string& name) const;
  const ContractCheck* find_check(const std::string& tag) const;
};

// Structural validation: operands resolve to declared arrays with exact
// lengths, writes never target constants, the call graph is acyclic and fully
// reachable from compute, and exactly one fixed loop exists, in pathfollowing,
// with the declared trip count. Raises IllFormedKernel.
void validate(const KernelProgram& k);

// Total bytes of the kernel's static arrays.
std::size_t static_footprint_bytes(const KernelProgram& k);

// Closed form of the same number from the instance sizes alone.
std::size_t expected_footprint_bytes(int n, int m);

Json kernel_to_json(const KernelProgram& k);
KernelProgram kernel_from_json(const Json& j);

// C-style rendering of a scalar expression, e.g. "b[2] - update_pre_ax[2]".
std::string expr_to_text(const Expr& e);

// Names of all arrays an expression reads.
std::vector<std::string> expr_refs(const Expr& e);

// ---------------------------------------------------------------------------
// Contract sidecar: the machine-readable annotations generated next to the
// kernel. Terms carry a rendered text plus the named arrays/constants they
// reference.

struct Term {
  std::string text;
  std::vector<std::string> refs;
  bool operator==(const Term&) const = default;
};

struct FunctionContract {
  std::string name;
  std::vector<Term> requires_;
  std::vector<Term> ensures_;
  std::vector<std::string> assigns;  // ranges like "pathfollowing_X[0..1]"
  bool operator==(const FunctionContract&) const = default;
};

struct LoopContract {
  Term feasibility;
  Term acc;
  Term lower;
  bool operator==(const LoopContract&) const = default;
};

struct Lemma {
  std::string name;
  Term statement;
  bool operator==(const Lemma&) const = default;
};

struct ContractSidecar {
  std::vector<FunctionContract> functions;
  LoopContract loop;
  std::vector<Lemma> lemmas;  // update_t_ensures1 and its _l0.._l3 chain
  bool operator==(const ContractSidecar&) const = default;

  const FunctionContract* find(const std::string& name) const;
};

Json sidecar_to_json(const ContractSidecar& s);
ContractSidecar sidecar_from_json(const Json& j);

// Checks that every term ref and assigns range names a declared array and that
// the lemma chain is exactly the five-statement update_t chain.
void validate_sidecar(const KernelProgram& k, const ContractSidecar& s);

}  // namespace ipmforge::codegen
