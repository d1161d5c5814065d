#include <cstdio>
#include <string>

#include "ipmforge/codegen.hpp"

namespace ipmforge::codegen {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // keep floating literals recognizable as doubles in the C text
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

// Scalar constants become #define so that contract comments can reference
// them without leaving unused objects behind.
bool is_macro_constant(const ConstDecl& c) { return c.len == 1; }

struct CWriter {
  const KernelProgram& k;
  const ContractSidecar& s;
  RenderOptions opts;
  std::string out;
  int indent = 0;

  void line(const std::string& text) {
    if (!text.empty()) out.append(static_cast<std::size_t>(indent) * 4, ' ');
    out += text;
    out += '\n';
  }

  std::string elem(const std::string& array, int idx) const {
    if (const ConstDecl* c = k.find_constant(array); c && is_macro_constant(*c)) return array;
    return array + "[" + std::to_string(idx) + "]";
  }

  std::string expr(const Expr& e, int parent_prec = 0) const {
    auto prec = [](Expr::Kind kk) {
      switch (kk) {
        case Expr::Kind::add:
        case Expr::Kind::sub: return 1;
        case Expr::Kind::mul:
        case Expr::Kind::div: return 2;
        default: return 3;
      }
    };
    switch (e.kind) {
      case Expr::Kind::lit: return num(e.lit);
      case Expr::Kind::ref: return elem(e.array, e.index);
      case Expr::Kind::neg: return "-" + expr(e.args[0], 3);
      case Expr::Kind::sqrt_op: return "sqrt(" + expr(e.args[0]) + ")";
      case Expr::Kind::log_op: return "log(" + expr(e.args[0]) + ")";
      default: break;
    }
    const int p = prec(e.kind);
    const char* sym = e.kind == Expr::Kind::add   ? " + "
                      : e.kind == Expr::Kind::sub ? " - "
                      : e.kind == Expr::Kind::mul ? " * "
                                                  : " / ";
    std::string t = expr(e.args[0], p) + sym + expr(e.args[1], p + 1);
    if (p < parent_prec) t = "(" + t + ")";
    return t;
  }

  void contract_comment(const std::string& fn_name) {
    const FunctionContract* fc = s.find(fn_name);
    if (!fc) return;
    std::string block;
    bool first = true;
    auto add = [&](const std::string& kw, const std::string& text) {
      block += first ? "/*@ " : "  @ ";
      first = false;
      block += kw + " " + text + ";\n";
    };
    for (const Term& t : fc->requires_) add("requires", t.text);
    for (const Term& t : fc->ensures_) add("ensures", t.text);
    if (!fc->assigns.empty()) {
      std::string joined;
      for (std::size_t i = 0; i < fc->assigns.size(); ++i) {
        if (i) joined += ", ";
        joined += fc->assigns[i];
      }
      add("assigns", joined);
    }
    if (first) return;
    block += "  @*/";
    // emit with current indentation per comment line
    std::size_t pos = 0;
    while (pos < block.size()) {
      std::size_t nl = block.find('\n', pos);
      if (nl == std::string::npos) nl = block.size();
      line(block.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  void stmt(const Stmt& st) {
    using Op = Stmt::Op;
    switch (st.op) {
      case Op::elem_assign:
        line(elem(st.dst, st.dst_index) + " = " + expr(st.expr) + ";");
        break;
      case Op::mat_mul:
        for (int r = 0; r < st.rows; ++r)
          for (int c = 0; c < st.cols; ++c) {
            std::string rhs;
            for (int kk = 0; kk < st.inner; ++kk) {
              if (kk) rhs += " + ";
              rhs += elem(st.a, r * st.inner + kk) + " * " + elem(st.b, kk * st.cols + c);
            }
            line(elem(st.dst, r * st.cols + c) + " = " + rhs + ";");
          }
        break;
      case Op::mat_add:
        for (int i = 0; i < st.len; ++i)
          line(elem(st.dst, i) + " = " + elem(st.a, i) + " + " + elem(st.b, i) + ";");
        break;
      case Op::scale:
        for (int i = 0; i < st.len; ++i)
          line(elem(st.dst, i) + " = " + elem(st.a, i) + " * " + elem(st.scalar, 0) + ";");
        break;
      case Op::neg:
        for (int i = 0; i < st.len; ++i)
          line(elem(st.dst, i) + " = -" + elem(st.a, i) + ";");
        break;
      case Op::dot: {
        std::string rhs;
        for (int i = 0; i < st.len; ++i) {
          if (i) rhs += " + ";
          rhs += elem(st.a, i) + " * " + elem(st.b, i);
        }
        line(elem(st.dst, 0) + " = " + rhs + ";");
        break;
      }
      case Op::sqrt_op:
        line(elem(st.dst, 0) + " = sqrt(" + elem(st.a, 0) + ");");
        break;
      case Op::div:
        line(elem(st.dst, 0) + " = " + elem(st.a, 0) + " / " + elem(st.b, 0) + ";");
        break;
      case Op::chol_factor: {
        // unrolled lower Cholesky, same operation order as the library kernel
        const int d = st.dim;
        const std::string& L = st.dst;
        for (int j = 0; j < d; ++j) {
          std::string diag = elem(st.a, j * d + j);
          for (int kk = 0; kk < j; ++kk)
            diag += " - " + elem(L, j * d + kk) + " * " + elem(L, j * d + kk);
          line(elem(L, j * d + j) + " = sqrt(" + diag + ");");
          for (int i = j + 1; i < d; ++i) {
            std::string sum = elem(st.a, i * d + j);
            for (int kk = 0; kk < j; ++kk)
              sum += " - " + elem(L, i * d + kk) + " * " + elem(L, j * d + kk);
            line(elem(L, i * d + j) + " = (" + sum + ") / " + elem(L, j * d + j) + ";");
          }
          for (int i = 0; i < j; ++i) line(elem(L, i * d + j) + " = 0.0;");
        }
        break;
      }
      case Op::chol_solve: {
        const int d = st.dim;
        for (int i = 0; i < d; ++i) {
          std::string sum = elem(st.b, i);
          for (int kk = 0; kk < i; ++kk)
            sum += " - " + elem(st.a, i * d + kk) + " * " + elem(st.dst, kk);
          line(elem(st.dst, i) + " = (" + sum + ") / " + elem(st.a, i * d + i) + ";");
        }
        for (int i = d - 1; i >= 0; --i) {
          std::string sum = elem(st.dst, i);
          for (int kk = i + 1; kk < d; ++kk)
            sum += " - " + elem(st.a, kk * d + i) + " * " + elem(st.dst, kk);
          line(elem(st.dst, i) + " = (" + sum + ") / " + elem(st.a, i * d + i) + ";");
        }
        break;
      }
      case Op::assert_contract: {
        line("/*@ assert <" + st.tag + ">; */");
        if (opts.runtime_asserts) runtime_assert(st.tag);
        break;
      }
      case Op::fixed_loop: {
        line("/*@ loop invariant " + s.loop.feasibility.text + ";");
        line("  @ loop invariant " + s.loop.acc.text + ";");
        line("  @ loop invariant " + s.loop.lower.text + ";");
        line("  @*/");
        line("for (l = 0; l < NBR; l++) {");
        ++indent;
        for (const Stmt& inner : st.body) stmt(inner);
        --indent;
        line("}");
        break;
      }
      case Op::call:
        line(st.callee + "();");
        break;
    }
  }

  // Scalar contracts are checkable without a second linear-algebra stack.
  void runtime_assert(const std::string& tag) {
    const ContractCheck* c = k.find_check(tag);
    if (!c) return;
    switch (c->kind) {
      case ContractCheck::Kind::progress:
        line("assert(update_t_old_t[0] <= 0.0 || pathfollowing_t[0] > update_t_old_t[0] * RATIO - " +
             num(c->slack) + ");");
        break;
      case ContractCheck::Kind::lower:
        line("assert(pathfollowing_t[0] >= T_INIT * pow_ratio[l] - " + num(c->slack) + ");");
        break;
      case ContractCheck::Kind::t_stop:
        line("assert(pathfollowing_t[0] >= T_STOP * (1.0 - " + num(c->slack) + "));");
        break;
      default:
        break;  // feasibility/acc stay comment-only
    }
  }
};

}  // namespace

std::string render_c(const KernelProgram& k, const ContractSidecar& s, const RenderOptions& opts) {
  validate(k);
  CWriter w{k, s, opts, std::string(), 0};

  w.line("/* Instance-specialized primal interior-point solver kernel.");
  w.line(" * Sizes: n = " + std::to_string(k.sizes.n) + ", m = " + std::to_string(k.sizes.m) +
         ", iterations = " + std::to_string(k.sizes.trip_count) + ".");
  w.line(" * Straight-line code, statically allocated, single fixed-trip loop;");
  w.line(" * the only library calls are sqrt/log. Contracts appear as ACSL-style");
  w.line(" * comments next to each function. */");
  w.line("");
  w.line("#include <math.h>");
  if (opts.runtime_asserts) w.line("#include <assert.h>");
  w.line("");

  for (const ConstDecl& c : k.constants)
    if (is_macro_constant(c)) w.line("#define " + c.name + " " + num(c.data[0]));
  w.line("#define NBR " + std::to_string(k.sizes.trip_count));
  w.line("");

  for (const ConstDecl& c : k.constants) {
    if (is_macro_constant(c)) continue;
    std::string init = "static const double " + c.name + "[" + std::to_string(c.len) + "] = {";
    for (int i = 0; i < c.len; ++i) {
      if (i) init += ", ";
      init += num(c.data[static_cast<std::size_t>(i)]);
    }
    init += "};";
    w.line(init);
  }
  w.line("");

  for (const GlobalDecl& g : k.globals)
    w.line("static double " + g.name + "[" + std::to_string(g.len) + "];");
  if (opts.runtime_asserts) {
    // precomputed geometric lower bounds, one per iteration
    std::string init = "static const double pow_ratio[NBR] = {";
    const ConstDecl* ratio = k.find_constant("RATIO");
    double v = 1.0;
    for (int i = 0; i < k.sizes.trip_count; ++i) {
      if (i) init += ", ";
      init += num(v);
      v *= ratio ? ratio->data[0] : 1.0;
    }
    init += "};";
    w.line(init);
  }
  w.line("");

  for (const Function& f : k.functions) {
    if (f.name == "compute") continue;
    w.line("static void " + f.name + "(void);");
  }
  w.line("void compute(void);");
  w.line("");

  for (const Function& f : k.functions) {
    w.contract_comment(f.name);
    const bool is_entry = f.name == "compute";
    const bool has_loop = [&] {
      for (const Stmt& st : f.body)
        if (st.op == Stmt::Op::fixed_loop) return true;
      return false;
    }();
    w.line((is_entry ? std::string("void ") : std::string("static void ")) + f.name + "(void) {");
    ++w.indent;
    if (has_loop) w.line("int l;");
    for (const Stmt& st : f.body) w.stmt(st);
    --w.indent;
    w.line("}");
    w.line("");
  }
  return w.out;
}

std::string render_sidecar_json(const ContractSidecar& s) {
  return sidecar_to_json(s).dump(2) + "\n";
}

}  // namespace ipmforge::codegen
