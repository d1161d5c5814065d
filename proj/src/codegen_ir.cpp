#include "ipmforge/codegen_ir.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

namespace ipmforge::codegen {

Expr Expr::L(double v) {
  Expr e;
  e.kind = Kind::lit;
  e.lit = v;
  return e;
}

Expr Expr::R(std::string array, int index) {
  Expr e;
  e.kind = Kind::ref;
  e.array = std::move(array);
  e.index = index;
  return e;
}

Expr Expr::bin(Kind k, Expr a, Expr b) {
  Expr e;
  e.kind = k;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

Expr Expr::un(Kind k, Expr a) {
  Expr e;
  e.kind = k;
  e.args.push_back(std::move(a));
  return e;
}

const ConstDecl* KernelProgram::find_constant(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return &c;
  return nullptr;
}

const GlobalDecl* KernelProgram::find_global(const std::string& name) const {
  for (const auto& g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

const Function* KernelProgram::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const ContractCheck* KernelProgram::find_check(const std::string& tag) const {
  for (const auto& c : checks)
    if (c.tag == tag) return &c;
  return nullptr;
}

const FunctionContract* ContractSidecar::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

struct Validator {
  const KernelProgram& k;
  int loop_count = 0;
  std::string loop_owner;

  int array_len(const std::string& name) const {
    if (const GlobalDecl* g = k.find_global(name)) return g->len;
    if (const ConstDecl* c = k.find_constant(name)) return c->len;
    throw IllFormedKernel("undeclared array \"" + name + "\"");
  }

  void require_len(const std::string& name, int len, const char* role) const {
    const int have = array_len(name);
    if (have != len)
      throw IllFormedKernel("array \"" + name + "\" (" + role + ") has length " +
                            std::to_string(have) + ", statement expects " + std::to_string(len));
  }

  void require_writable(const std::string& name) const {
    if (k.find_global(name)) return;
    if (k.find_constant(name))
      throw IllFormedKernel("statement writes to constant \"" + name + "\"");
    throw IllFormedKernel("undeclared destination \"" + name + "\"");
  }

  void check_expr(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::lit:
        return;
      case Expr::Kind::ref: {
        const int len = array_len(e.array);
        if (e.index < 0 || e.index >= len)
          throw IllFormedKernel("ref " + e.array + "[" + std::to_string(e.index) +
                                "] out of range (length " + std::to_string(len) + ")");
        return;
      }
      case Expr::Kind::add:
      case Expr::Kind::sub:
      case Expr::Kind::mul:
      case Expr::Kind::div:
        if (e.args.size() != 2) throw IllFormedKernel("binary expr needs 2 operands");
        break;
      case Expr::Kind::neg:
      case Expr::Kind::sqrt_op:
      case Expr::Kind::log_op:
        if (e.args.size() != 1) throw IllFormedKernel("unary expr needs 1 operand");
        break;
    }
    for (const Expr& a : e.args) check_expr(a);
  }

  void check_stmt(const Stmt& s, const std::string& fn) {
    using Op = Stmt::Op;
    switch (s.op) {
      case Op::elem_assign:
        require_writable(s.dst);
        if (s.dst_index < 0 || s.dst_index >= array_len(s.dst))
          throw IllFormedKernel("elem_assign index out of range on \"" + s.dst + "\"");
        check_expr(s.expr);
        break;
      case Op::mat_mul:
        require_writable(s.dst);
        require_len(s.dst, s.rows * s.cols, "dst");
        require_len(s.a, s.rows * s.inner, "lhs");
        require_len(s.b, s.inner * s.cols, "rhs");
        if (s.dst == s.a || s.dst == s.b)
          throw IllFormedKernel("mat_mul destination aliases an operand");
        break;
      case Op::mat_add:
        require_writable(s.dst);
        require_len(s.dst, s.len, "dst");
        require_len(s.a, s.len, "lhs");
        require_len(s.b, s.len, "rhs");
        break;
      case Op::scale:
        require_writable(s.dst);
        require_len(s.dst, s.len, "dst");
        require_len(s.a, s.len, "src");
        require_len(s.scalar, 1, "scalar");
        break;
      case Op::neg:
        require_writable(s.dst);
        require_len(s.dst, s.len, "dst");
        require_len(s.a, s.len, "src");
        break;
      case Op::dot:
        require_writable(s.dst);
        require_len(s.dst, 1, "dst");
        require_len(s.a, s.len, "lhs");
        require_len(s.b, s.len, "rhs");
        break;
      case Op::sqrt_op:
        require_writable(s.dst);
        require_len(s.dst, 1, "dst");
        require_len(s.a, 1, "src");
        break;
      case Op::div:
        require_writable(s.dst);
        require_len(s.dst, 1, "dst");
        require_len(s.a, 1, "num");
        require_len(s.b, 1, "den");
        break;
      case Op::chol_factor:
        require_writable(s.dst);
        require_len(s.dst, s.dim * s.dim, "factor");
        require_len(s.a, s.dim * s.dim, "matrix");
        if (s.dst == s.a) throw IllFormedKernel("chol_factor destination aliases its input");
        break;
      case Op::chol_solve:
        require_writable(s.dst);
        require_len(s.dst, s.dim, "solution");
        require_len(s.a, s.dim * s.dim, "factor");
        require_len(s.b, s.dim, "rhs");
        break;
      case Op::assert_contract:
        if (!k.find_check(s.tag))
          throw IllFormedKernel("assert references unknown check \"" + s.tag + "\"");
        break;
      case Op::fixed_loop:
        ++loop_count;
        loop_owner = fn;
        if (s.count != k.sizes.trip_count)
          throw IllFormedKernel("fixed loop count " + std::to_string(s.count) +
                                " differs from declared trip count " +
                                std::to_string(k.sizes.trip_count));
        for (const Stmt& inner : s.body) check_stmt(inner, fn);
        break;
      case Op::call:
        if (!k.find_function(s.callee))
          throw IllFormedKernel("call to unknown function \"" + s.callee + "\"");
        break;
    }
  }
};

void collect_callees(const std::vector<Stmt>& body, std::set<std::string>& out) {
  for (const Stmt& s : body) {
    if (s.op == Stmt::Op::call) out.insert(s.callee);
    if (s.op == Stmt::Op::fixed_loop) collect_callees(s.body, out);
  }
}

}  // namespace

void validate(const KernelProgram& k) {
  if (k.sizes.n < 1 || k.sizes.m < 1 || k.sizes.trip_count < 1)
    throw IllFormedKernel("sizes must be positive");
  std::set<std::string> names;
  for (const auto& c : k.constants) {
    if (c.len < 1 || static_cast<int>(c.data.size()) != c.len)
      throw IllFormedKernel("constant \"" + c.name + "\" has inconsistent length");
    if (!names.insert(c.name).second)
      throw IllFormedKernel("duplicate array name \"" + c.name + "\"");
  }
  for (const auto& g : k.globals) {
    if (g.len < 1) throw IllFormedKernel("global \"" + g.name + "\" has non-positive length");
    if (!names.insert(g.name).second)
      throw IllFormedKernel("duplicate array name \"" + g.name + "\"");
  }

  Validator v{k};
  for (const auto& f : k.functions)
    for (const Stmt& s : f.body) v.check_stmt(s, f.name);
  if (v.loop_count != 1)
    throw IllFormedKernel("kernel must contain exactly one fixed loop, found " +
                          std::to_string(v.loop_count));
  if (v.loop_owner != "pathfollowing")
    throw IllFormedKernel("the fixed loop must live in pathfollowing, found in " + v.loop_owner);

  // call graph: existing targets were checked above; now acyclicity and
  // reachability from compute
  if (!k.find_function("compute")) throw IllFormedKernel("missing entry function compute");
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& f : k.functions) collect_callees(f.body, edges[f.name]);

  std::map<std::string, int> state;  // 0 unseen, 1 in progress, 2 done
  std::vector<std::string> stack{"compute"};
  // iterative DFS with explicit coloring
  std::function<void(const std::string&)> dfs = [&](const std::string& fn) {
    state[fn] = 1;
    for (const std::string& callee : edges[fn]) {
      if (state[callee] == 1) throw IllFormedKernel("call cycle through \"" + callee + "\"");
      if (state[callee] == 0) dfs(callee);
    }
    state[fn] = 2;
  };
  dfs("compute");
  for (const auto& f : k.functions)
    if (state[f.name] != 2)
      throw IllFormedKernel("function \"" + f.name + "\" unreachable from compute");
}

std::size_t static_footprint_bytes(const KernelProgram& k) {
  std::size_t total = 0;
  for (const auto& g : k.globals) total += static_cast<std::size_t>(g.len) * sizeof(double);
  return total;
}

std::size_t expected_footprint_bytes(int n, int m) {
  const std::size_t doubles = 2u * static_cast<std::size_t>(n) * n + 7u * n + 4u * m + 5u;
  return doubles * sizeof(double);
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    default: return 3;
  }
}

void expr_text(const Expr& e, std::string& out, int parent_prec) {
  const int prec = precedence(e.kind);
  switch (e.kind) {
    case Expr::Kind::lit: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.lit);
      out += buf;
      return;
    }
    case Expr::Kind::ref:
      out += e.array + "[" + std::to_string(e.index) + "]";
      return;
    case Expr::Kind::neg:
      out += "-";
      expr_text(e.args[0], out, 3);
      return;
    case Expr::Kind::sqrt_op:
      out += "sqrt(";
      expr_text(e.args[0], out, 0);
      out += ")";
      return;
    case Expr::Kind::log_op:
      out += "log(";
      expr_text(e.args[0], out, 0);
      out += ")";
      return;
    default:
      break;
  }
  const char* sym = e.kind == Expr::Kind::add   ? " + "
                    : e.kind == Expr::Kind::sub ? " - "
                    : e.kind == Expr::Kind::mul ? " * "
                                                : " / ";
  const bool parens = prec < parent_prec;
  if (parens) out += "(";
  expr_text(e.args[0], out, prec);
  out += sym;
  // right operand of - and / needs parens on equal precedence
  expr_text(e.args[1], out, prec + 1);
  if (parens) out += ")";
}

void collect_refs(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::ref) out.insert(e.array);
  for (const Expr& a : e.args) collect_refs(a, out);
}

}  // namespace

std::string expr_to_text(const Expr& e) {
  std::string out;
  expr_text(e, out, 0);
  return out;
}

std::vector<std::string> expr_refs(const Expr& e) {
  std::set<std::string> refs;
  collect_refs(e, refs);
  return {refs.begin(), refs.end()};
}

// --------------------------------------------------------------------------
// JSON serialization

namespace {

const char* expr_kind_name(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::lit: return "lit";
    case Expr::Kind::ref: return "ref";
    case Expr::Kind::add: return "add";
    case Expr::Kind::sub: return "sub";
    case Expr::Kind::mul: return "mul";
    case Expr::Kind::div: return "div";
    case Expr::Kind::neg: return "neg";
    case Expr::Kind::sqrt_op: return "sqrt";
    case Expr::Kind::log_op: return "log";
  }
  return "?";
}

Expr::Kind expr_kind_from(const std::string& s) {
  if (s == "lit") return Expr::Kind::lit;
  if (s == "ref") return Expr::Kind::ref;
  if (s == "add") return Expr::Kind::add;
  if (s == "sub") return Expr::Kind::sub;
  if (s == "mul") return Expr::Kind::mul;
  if (s == "div") return Expr::Kind::div;
  if (s == "neg") return Expr::Kind::neg;
  if (s == "sqrt") return Expr::Kind::sqrt_op;
  if (s == "log") return Expr::Kind::log_op;
  throw SchemaError("kernel json: unknown expr kind \"" + s + "\"");
}

Json expr_to_json(const Expr& e) {
  Json j;
  j["k"] = expr_kind_name(e.kind);
  if (e.kind == Expr::Kind::lit) j["v"] = e.lit;
  if (e.kind == Expr::Kind::ref) {
    j["a"] = e.array;
    j["i"] = e.index;
  }
  if (!e.args.empty()) {
    Json args = Json::array();
    for (const Expr& a : e.args) args.push_back(expr_to_json(a));
    j["args"] = std::move(args);
  }
  return j;
}

Expr expr_from_json(const Json& j) {
  Expr e;
  e.kind = expr_kind_from(j.at("k").get<std::string>());
  if (e.kind == Expr::Kind::lit) e.lit = j.at("v").get<double>();
  if (e.kind == Expr::Kind::ref) {
    e.array = j.at("a").get<std::string>();
    e.index = j.at("i").get<int>();
  }
  if (j.contains("args"))
    for (const auto& a : j.at("args")) e.args.push_back(expr_from_json(a));
  return e;
}

const char* stmt_op_name(Stmt::Op op) {
  switch (op) {
    case Stmt::Op::elem_assign: return "elem_assign";
    case Stmt::Op::mat_mul: return "mat_mul";
    case Stmt::Op::mat_add: return "mat_add";
    case Stmt::Op::scale: return "scale";
    case Stmt::Op::neg: return "neg";
    case Stmt::Op::dot: return "dot";
    case Stmt::Op::sqrt_op: return "sqrt";
    case Stmt::Op::div: return "div";
    case Stmt::Op::chol_factor: return "chol_factor";
    case Stmt::Op::chol_solve: return "chol_solve";
    case Stmt::Op::assert_contract: return "assert";
    case Stmt::Op::fixed_loop: return "fixed_loop";
    case Stmt::Op::call: return "call";
  }
  return "?";
}

Stmt::Op stmt_op_from(const std::string& s) {
  if (s == "elem_assign") return Stmt::Op::elem_assign;
  if (s == "mat_mul") return Stmt::Op::mat_mul;
  if (s == "mat_add") return Stmt::Op::mat_add;
  if (s == "scale") return Stmt::Op::scale;
  if (s == "neg") return Stmt::Op::neg;
  if (s == "dot") return Stmt::Op::dot;
  if (s == "sqrt") return Stmt::Op::sqrt_op;
  if (s == "div") return Stmt::Op::div;
  if (s == "chol_factor") return Stmt::Op::chol_factor;
  if (s == "chol_solve") return Stmt::Op::chol_solve;
  if (s == "assert") return Stmt::Op::assert_contract;
  if (s == "fixed_loop") return Stmt::Op::fixed_loop;
  if (s == "call") return Stmt::Op::call;
  throw SchemaError("kernel json: unknown statement op \"" + s + "\"");
}

Json stmt_to_json(const Stmt& s) {
  Json j;
  j["op"] = stmt_op_name(s.op);
  switch (s.op) {
    case Stmt::Op::elem_assign:
      j["dst"] = s.dst;
      j["idx"] = s.dst_index;
      j["expr"] = expr_to_json(s.expr);
      break;
    case Stmt::Op::mat_mul:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["b"] = s.b;
      j["rows"] = s.rows;
      j["inner"] = s.inner;
      j["cols"] = s.cols;
      break;
    case Stmt::Op::mat_add:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["b"] = s.b;
      j["len"] = s.len;
      break;
    case Stmt::Op::scale:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["scalar"] = s.scalar;
      j["len"] = s.len;
      break;
    case Stmt::Op::neg:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["len"] = s.len;
      break;
    case Stmt::Op::dot:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["b"] = s.b;
      j["len"] = s.len;
      break;
    case Stmt::Op::sqrt_op:
      j["dst"] = s.dst;
      j["a"] = s.a;
      break;
    case Stmt::Op::div:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["b"] = s.b;
      break;
    case Stmt::Op::chol_factor:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["dim"] = s.dim;
      break;
    case Stmt::Op::chol_solve:
      j["dst"] = s.dst;
      j["a"] = s.a;
      j["b"] = s.b;
      j["dim"] = s.dim;
      break;
    case Stmt::Op::assert_contract:
      j["tag"] = s.tag;
      break;
    case Stmt::Op::fixed_loop: {
      j["count"] = s.count;
      Json body = Json::array();
      for (const Stmt& inner : s.body) body.push_back(stmt_to_json(inner));
      j["body"] = std::move(body);
      break;
    }
    case Stmt::Op::call:
      j["fn"] = s.callee;
      break;
  }
  return j;
}

Stmt stmt_from_json(const Json& j) {
  Stmt s;
  s.op = stmt_op_from(j.at("op").get<std::string>());
  auto str = [&](const char* key) { return j.at(key).get<std::string>(); };
  auto num = [&](const char* key) { return j.at(key).get<int>(); };
  switch (s.op) {
    case Stmt::Op::elem_assign:
      s.dst = str("dst");
      s.dst_index = num("idx");
      s.expr = expr_from_json(j.at("expr"));
      break;
    case Stmt::Op::mat_mul:
      s.dst = str("dst");
      s.a = str("a");
      s.b = str("b");
      s.rows = num("rows");
      s.inner = num("inner");
      s.cols = num("cols");
      break;
    case Stmt::Op::mat_add:
      s.dst = str("dst");
      s.a = str("a");
      s.b = str("b");
      s.len = num("len");
      break;
    case Stmt::Op::scale:
      s.dst = str("dst");
      s.a = str("a");
      s.scalar = str("scalar");
      s.len = num("len");
      break;
    case Stmt::Op::neg:
      s.dst = str("dst");
      s.a = str("a");
      s.len = num("len");
      break;
    case Stmt::Op::dot:
      s.dst = str("dst");
      s.a = str("a");
      s.b = str("b");
      s.len = num("len");
      break;
    case Stmt::Op::sqrt_op:
      s.dst = str("dst");
      s.a = str("a");
      break;
    case Stmt::Op::div:
      s.dst = str("dst");
      s.a = str("a");
      s.b = str("b");
      break;
    case Stmt::Op::chol_factor:
      s.dst = str("dst");
      s.a = str("a");
      s.dim = num("dim");
      break;
    case Stmt::Op::chol_solve:
      s.dst = str("dst");
      s.a = str("a");
      s.b = str("b");
      s.dim = num("dim");
      break;
    case Stmt::Op::assert_contract:
      s.tag = str("tag");
      break;
    case Stmt::Op::fixed_loop:
      s.count = num("count");
      for (const auto& inner : j.at("body")) s.body.push_back(stmt_from_json(inner));
      break;
    case Stmt::Op::call:
      s.callee = str("fn");
      break;
  }
  return s;
}

const char* check_kind_name(ContractCheck::Kind k) {
  switch (k) {
    case ContractCheck::Kind::feasible: return "feasible";
    case ContractCheck::Kind::acc: return "acc";
    case ContractCheck::Kind::progress: return "progress";
    case ContractCheck::Kind::lower: return "lower";
    case ContractCheck::Kind::t_stop: return "t_stop";
  }
  return "?";
}

ContractCheck::Kind check_kind_from(const std::string& s) {
  if (s == "feasible") return ContractCheck::Kind::feasible;
  if (s == "acc") return ContractCheck::Kind::acc;
  if (s == "progress") return ContractCheck::Kind::progress;
  if (s == "lower") return ContractCheck::Kind::lower;
  if (s == "t_stop") return ContractCheck::Kind::t_stop;
  throw SchemaError("kernel json: unknown check kind \"" + s + "\"");
}

}  // namespace

Json kernel_to_json(const KernelProgram& k) {
  Json j;
  j["sizes"] = Json{{"n", k.sizes.n}, {"m", k.sizes.m}, {"trip_count", k.sizes.trip_count}};
  Json consts = Json::array();
  for (const auto& c : k.constants)
    consts.push_back(Json{{"name", c.name}, {"len", c.len}, {"data", c.data}});
  j["constants"] = std::move(consts);
  Json globals = Json::array();
  for (const auto& g : k.globals) globals.push_back(Json{{"name", g.name}, {"len", g.len}});
  j["globals"] = std::move(globals);
  Json fns = Json::array();
  for (const auto& f : k.functions) {
    Json body = Json::array();
    for (const Stmt& s : f.body) body.push_back(stmt_to_json(s));
    fns.push_back(Json{{"name", f.name}, {"body", std::move(body)}});
  }
  j["functions"] = std::move(fns);
  Json checks = Json::array();
  for (const auto& c : k.checks)
    checks.push_back(Json{{"tag", c.tag},
                          {"kind", check_kind_name(c.kind)},
                          {"bound", c.bound},
                          {"slack", c.slack}});
  j["checks"] = std::move(checks);
  return j;
}

KernelProgram kernel_from_json(const Json& j) {
  KernelProgram k;
  try {
    k.sizes.n = j.at("sizes").at("n").get<int>();
    k.sizes.m = j.at("sizes").at("m").get<int>();
    k.sizes.trip_count = j.at("sizes").at("trip_count").get<int>();
    for (const auto& c : j.at("constants")) {
      ConstDecl d;
      d.name = c.at("name").get<std::string>();
      d.len = c.at("len").get<int>();
      d.data = c.at("data").get<std::vector<double>>();
      k.constants.push_back(std::move(d));
    }
    for (const auto& g : j.at("globals"))
      k.globals.push_back(GlobalDecl{g.at("name").get<std::string>(), g.at("len").get<int>()});
    for (const auto& f : j.at("functions")) {
      Function fn;
      fn.name = f.at("name").get<std::string>();
      for (const auto& s : f.at("body")) fn.body.push_back(stmt_from_json(s));
      k.functions.push_back(std::move(fn));
    }
    for (const auto& c : j.at("checks")) {
      ContractCheck ck;
      ck.tag = c.at("tag").get<std::string>();
      ck.kind = check_kind_from(c.at("kind").get<std::string>());
      ck.bound = c.at("bound").get<double>();
      ck.slack = c.at("slack").get<double>();
      k.checks.push_back(std::move(ck));
    }
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("kernel json: ") + e.what());
  }
  return k;
}

namespace {

Json term_to_json(const Term& t) {
  return Json{{"text", t.text}, {"refs", t.refs}};
}

Term term_from_json(const Json& j) {
  Term t;
  t.text = j.at("text").get<std::string>();
  t.refs = j.at("refs").get<std::vector<std::string>>();
  return t;
}

}  // namespace

Json sidecar_to_json(const ContractSidecar& s) {
  Json j;
  Json fns = Json::array();
  for (const auto& f : s.functions) {
    Json req = Json::array(), ens = Json::array();
    for (const Term& t : f.requires_) req.push_back(term_to_json(t));
    for (const Term& t : f.ensures_) ens.push_back(term_to_json(t));
    fns.push_back(Json{{"name", f.name},
                       {"requires", std::move(req)},
                       {"ensures", std::move(ens)},
                       {"assigns", f.assigns}});
  }
  j["functions"] = std::move(fns);
  j["loop"] = Json{{"invariants", Json{{"feasibility", term_to_json(s.loop.feasibility)},
                                       {"acc", term_to_json(s.loop.acc)},
                                       {"lower", term_to_json(s.loop.lower)}}}};
  Json lemmas = Json::array();
  for (const auto& l : s.lemmas)
    lemmas.push_back(Json{{"name", l.name}, {"statement", term_to_json(l.statement)}});
  j["lemmas"] = std::move(lemmas);
  return j;
}

ContractSidecar sidecar_from_json(const Json& j) {
  ContractSidecar s;
  try {
    for (const auto& f : j.at("functions")) {
      FunctionContract fc;
      fc.name = f.at("name").get<std::string>();
      for (const auto& t : f.at("requires")) fc.requires_.push_back(term_from_json(t));
      for (const auto& t : f.at("ensures")) fc.ensures_.push_back(term_from_json(t));
      fc.assigns = f.at("assigns").get<std::vector<std::string>>();
      s.functions.push_back(std::move(fc));
    }
    const Json& inv = j.at("loop").at("invariants");
    s.loop.feasibility = term_from_json(inv.at("feasibility"));
    s.loop.acc = term_from_json(inv.at("acc"));
    s.loop.lower = term_from_json(inv.at("lower"));
    for (const auto& l : j.at("lemmas"))
      s.lemmas.push_back(Lemma{l.at("name").get<std::string>(),
                               term_from_json(l.at("statement"))});
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("sidecar json: ") + e.what());
  }
  return s;
}

void validate_sidecar(const KernelProgram& k, const ContractSidecar& s) {
  auto known = [&](const std::string& name) {
    return k.find_global(name) != nullptr || k.find_constant(name) != nullptr;
  };
  auto check_term = [&](const Term& t, const std::string& where) {
    for (const std::string& r : t.refs)
      if (!known(r))
        throw IllFormedKernel("sidecar term in " + where + " references undeclared \"" + r + "\"");
  };
  for (const auto& f : s.functions) {
    for (const Term& t : f.requires_) check_term(t, f.name);
    for (const Term& t : f.ensures_) check_term(t, f.name);
    for (const std::string& range : f.assigns) {
      const std::string name = range.substr(0, range.find('['));
      if (!k.find_global(name))
        throw IllFormedKernel("sidecar assigns in " + f.name + " names non-global \"" + name +
                              "\"");
    }
  }
  check_term(s.loop.feasibility, "loop");
  check_term(s.loop.acc, "loop");
  check_term(s.loop.lower, "loop");
  const std::vector<std::string> expected = {
      "update_t_ensures1", "update_t_ensures1_l0", "update_t_ensures1_l1",
      "update_t_ensures1_l2", "update_t_ensures1_l3"};
  if (s.lemmas.size() != expected.size())
    throw IllFormedKernel("sidecar must carry the five-lemma update_t chain");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (s.lemmas[i].name != expected[i])
      throw IllFormedKernel("unexpected lemma \"" + s.lemmas[i].name + "\" at position " +
                            std::to_string(i));
    check_term(s.lemmas[i].statement, s.lemmas[i].name);
  }
}

}  // namespace ipmforge::codegen
