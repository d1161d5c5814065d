#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ipmforge/codegen.hpp"

namespace ipmforge::codegen {

namespace {

// Scratch evaluation of the barrier quantities at the interpreter's current X,
// used by the checked-mode contract predicates. Mirrors the solver's operation
// order exactly; writes nothing into kernel memory.
struct CheckContext {
  const KernelProgram& k;
  const double* A;
  const double* b;
  const double* c;
  int n, m;
  double beta, gamma, t_init, ratio, t_stop, feas_margin;

  explicit CheckContext(const KernelProgram& kp) : k(kp) {
    n = k.sizes.n;
    m = k.sizes.m;
    A = constant("A");
    b = constant("b");
    c = constant("c");
    beta = constant("BETA")[0];
    gamma = constant("GAMMA")[0];
    t_init = constant("T_INIT")[0];
    ratio = constant("RATIO")[0];
    t_stop = constant("T_STOP")[0];
    const ContractCheck* feas = k.find_check("loop.invariant.feasible");
    feas_margin = feas ? feas->bound : Tolerances::feas_margin;
  }

  const double* constant(const std::string& name) const {
    const ConstDecl* c_ = k.find_constant(name);
    if (!c_) throw IllFormedKernel("kernel lacks baked constant \"" + name + "\"");
    return c_->data.data();
  }

  double min_slack(const double* x) const {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double ax = kernels::dot_fold(A + static_cast<std::ptrdiff_t>(i) * n, x, n);
      worst = std::min(worst, b[i] - ax);
    }
    return worst;
  }

  // ||t c + F'(x)||_x from scratch buffers.
  double acc_lhs(const double* x, double t) const {
    std::vector<double> slack(m), w(m), w2(m), grad(n), hess(static_cast<std::size_t>(n) * n),
        lower(static_cast<std::size_t>(n) * n), v(n), z(n);
    for (int i = 0; i < m; ++i) {
      const double ax = kernels::dot_fold(A + static_cast<std::ptrdiff_t>(i) * n, x, n);
      slack[i] = b[i] - ax;
      if (!(slack[i] > 0.0)) throw ContractViolation("acc.slack", 0, slack[i]);
    }
    for (int i = 0; i < m; ++i) w[i] = 1.0 / slack[i];
    for (int i = 0; i < m; ++i) w2[i] = w[i] / slack[i];
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += A[i * n + r] * w[i];
      grad[r] = acc;
    }
    for (int r = 0; r < n; ++r)
      for (int cc = 0; cc < n; ++cc) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += (A[i * n + r] * A[i * n + cc]) * w2[i];
        hess[r * n + cc] = acc;
      }
    double max_diag = hess[0];
    for (int i = 1; i < n; ++i) max_diag = std::max(max_diag, hess[i * n + i]);
    if (!kernels::chol_factor(lower.data(), hess.data(), n,
                              Tolerances::chol_pivot_rel * max_diag))
      throw ContractViolation("acc.hessian_not_spd", 0, max_diag);
    for (int i = 0; i < n; ++i) v[i] = c[i] * t + grad[i];
    kernels::chol_solve(lower.data(), v.data(), z.data(), n);
    return std::sqrt(std::max(kernels::dot_fold(v.data(), z.data(), n), 0.0));
  }
};

struct Interp {
  const KernelProgram& k;
  InterpretMode mode;
  CheckContext ctx;
  std::map<std::string, std::vector<double>> mem;
  int loop_index = -1;  // 0-based, -1 outside the loop
  // per-iteration measurements for the monitor record
  double cur_acc_after_t = 0.0, cur_acc_after_x = 0.0, cur_min_slack = 0.0, cur_lower = 0.0;
  bool cur_pass = true;
  std::vector<MonitorRecord> records;
  int call_depth = 0;

  Interp(const KernelProgram& kp, InterpretMode md) : k(kp), mode(md), ctx(kp) {
    for (const GlobalDecl& g : k.globals)
      mem.emplace(g.name, std::vector<double>(static_cast<std::size_t>(g.len), 0.0));
  }

  const double* read(const std::string& name) const {
    auto it = mem.find(name);
    if (it != mem.end()) return it->second.data();
    return ctx.k.find_constant(name)->data.data();
  }

  double* write(const std::string& name) { return mem.at(name).data(); }

  double eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::lit: return e.lit;
      case Expr::Kind::ref: return read(e.array)[e.index];
      case Expr::Kind::add: return eval(e.args[0]) + eval(e.args[1]);
      case Expr::Kind::sub: return eval(e.args[0]) - eval(e.args[1]);
      case Expr::Kind::mul: return eval(e.args[0]) * eval(e.args[1]);
      case Expr::Kind::div: return eval(e.args[0]) / eval(e.args[1]);
      case Expr::Kind::neg: return -eval(e.args[0]);
      case Expr::Kind::sqrt_op: return std::sqrt(eval(e.args[0]));
      case Expr::Kind::log_op: return std::log(eval(e.args[0]));
    }
    return 0.0;
  }

  int iter_k() const { return loop_index + 1; }  // 1-based step index

  void run_check(const std::string& tag) {
    const ContractCheck& c = *k.find_check(tag);
    const double* X = read("pathfollowing_X");
    const double t = read("pathfollowing_t")[0];
    switch (c.kind) {
      case ContractCheck::Kind::feasible: {
        const double ms = ctx.min_slack(X);
        if (loop_index >= 0) cur_min_slack = ms;
        if (!(ms > c.bound)) fail(tag, ms);
        break;
      }
      case ContractCheck::Kind::acc: {
        const double lhs = ctx.acc_lhs(X, t);
        if (loop_index >= 0) {
          if (tag == "update_t.ensures.acc") cur_acc_after_t = lhs;
          if (tag == "loop.invariant.acc") cur_acc_after_x = lhs;
        }
        if (!(lhs <= c.bound + c.slack)) fail(tag, lhs);
        break;
      }
      case ContractCheck::Kind::progress: {
        const double old_t = read("update_t_old_t")[0];
        if (old_t > 0.0 && !(t > old_t * ctx.ratio - c.slack)) fail(tag, t);
        break;
      }
      case ContractCheck::Kind::lower: {
        const double lower = ctx.t_init * std::pow(ctx.ratio, loop_index);
        cur_lower = lower;
        if (!(t >= lower - c.slack)) fail(tag, t);
        break;
      }
      case ContractCheck::Kind::t_stop: {
        if (!(t >= ctx.t_stop * (1.0 - c.slack))) fail(tag, t);
        break;
      }
    }
  }

  void fail(const std::string& tag, double measured) {
    cur_pass = false;
    throw ContractViolation(tag, iter_k(), measured);
  }

  void exec(const Stmt& s) {
    using Op = Stmt::Op;
    switch (s.op) {
      case Op::elem_assign: {
        const double v = eval(s.expr);
        write(s.dst)[s.dst_index] = v;
        break;
      }
      case Op::mat_mul: {
        const double* a = read(s.a);
        const double* b = read(s.b);
        kernels::mat_mul(write(s.dst), a, b, s.rows, s.inner, s.cols);
        break;
      }
      case Op::mat_add: {
        const double* a = read(s.a);
        const double* b = read(s.b);
        double* d = write(s.dst);
        for (int i = 0; i < s.len; ++i) d[i] = a[i] + b[i];
        break;
      }
      case Op::scale: {
        const double* a = read(s.a);
        const double sc = read(s.scalar)[0];
        double* d = write(s.dst);
        for (int i = 0; i < s.len; ++i) d[i] = a[i] * sc;
        break;
      }
      case Op::neg: {
        const double* a = read(s.a);
        double* d = write(s.dst);
        for (int i = 0; i < s.len; ++i) d[i] = -a[i];
        break;
      }
      case Op::dot:
        write(s.dst)[0] = kernels::dot_fold(read(s.a), read(s.b), s.len);
        break;
      case Op::sqrt_op:
        write(s.dst)[0] = std::sqrt(read(s.a)[0]);
        break;
      case Op::div:
        write(s.dst)[0] = read(s.a)[0] / read(s.b)[0];
        break;
      case Op::chol_factor: {
        const double* a = read(s.a);
        double max_diag = a[0];
        for (int i = 1; i < s.dim; ++i) max_diag = std::max(max_diag, a[i * s.dim + i]);
        if (!kernels::chol_factor(write(s.dst), a, s.dim,
                                  Tolerances::chol_pivot_rel * max_diag))
          throw ContractViolation("cholesky.not_positive_definite", iter_k(), max_diag);
        break;
      }
      case Op::chol_solve:
        kernels::chol_solve(read(s.a), read(s.b), write(s.dst), s.dim);
        break;
      case Op::assert_contract:
        if (mode == InterpretMode::checked) run_check(s.tag);
        break;
      case Op::fixed_loop:
        for (int l = 0; l < s.count; ++l) {
          loop_index = l;
          cur_pass = true;
          for (const Stmt& inner : s.body) exec(inner);
          if (mode == InterpretMode::checked) {
            records.push_back(MonitorRecord{l + 1, read("pathfollowing_t")[0], cur_acc_after_t,
                                            cur_acc_after_x, cur_min_slack, cur_lower, cur_pass});
          }
        }
        loop_index = -1;
        break;
      case Op::call: {
        if (++call_depth > 64) throw IllFormedKernel("call depth exceeded");
        const Function* f = k.find_function(s.callee);
        for (const Stmt& inner : f->body) exec(inner);
        --call_depth;
        break;
      }
    }
  }
};

}  // namespace

SolveCertificate interpret(const KernelProgram& k, InterpretMode mode) {
  validate(k);
  Interp in(k, mode);
  const Function* entry = k.find_function("compute");
  for (const Stmt& s : entry->body) in.exec(s);

  SolveCertificate cert;
  const int n = k.sizes.n;
  const std::vector<double>& x = in.mem.at("pathfollowing_X");
  cert.x_final = Vector(n);
  for (int i = 0; i < n; ++i) cert.x_final[i] = x[static_cast<std::size_t>(i)];
  cert.t_final = in.mem.at("pathfollowing_t")[0];
  cert.objective = kernels::dot_fold(in.ctx.c, x.data(), n);
  cert.gap_bound = gap_bound_at(in.ctx.beta, cert.t_final);
  cert.iterations = k.sizes.trip_count;
  cert.monitor = std::move(in.records);
  cert.config.beta = in.ctx.beta;
  cert.config.gamma = in.ctx.gamma;
  cert.config.epsilon = in.ctx.constant("EPSILON")[0];
  cert.schedule.t_init = in.ctx.t_init;
  cert.schedule.ratio = in.ctx.ratio;
  cert.schedule.t_stop = in.ctx.t_stop;
  cert.schedule.trip_count = k.sizes.trip_count;
  return cert;
}

}  // namespace ipmforge::codegen
