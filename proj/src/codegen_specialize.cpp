#include <cmath>
#include <string>

#include "ipmforge/codegen.hpp"

namespace ipmforge::codegen {

namespace {

using EK = Expr::Kind;

std::string range_of(const std::string& name, int len) {
  return name + "[0.." + std::to_string(len - 1) + "]";
}

// Builds the kernel and sidecar side by side so that every emitted function
// gets a contract record.
struct Emitter {
  KernelProgram k;
  ContractSidecar s;
  int n, m;

  void global(const std::string& name, int len) { k.globals.push_back({name, len}); }

  void constant(const std::string& name, std::vector<double> data) {
    k.constants.push_back({name, static_cast<int>(data.size()), std::move(data)});
  }

  Function& fn(const std::string& name) {
    k.functions.push_back({name, {}});
    return k.functions.back();
  }

  FunctionContract& contract(const std::string& name) {
    s.functions.push_back({name, {}, {}, {}});
    return s.functions.back();
  }

  static Stmt call(const std::string& callee) {
    Stmt st;
    st.op = Stmt::Op::call;
    st.callee = callee;
    return st;
  }

  static Stmt assert_tag(const std::string& tag) {
    Stmt st;
    st.op = Stmt::Op::assert_contract;
    st.tag = tag;
    return st;
  }

  static Stmt assign(const std::string& dst, int idx, Expr e) {
    Stmt st;
    st.op = Stmt::Op::elem_assign;
    st.dst = dst;
    st.dst_index = idx;
    st.expr = std::move(e);
    return st;
  }

  // Emits an elementwise operation as a dedicated set_* function. Assignments
  // above the split threshold move into one function per element, named
  // <base>_<row>_<col>, all called from the parent set function.
  void emit_set_fn(const std::string& base, std::vector<Stmt> assigns, int rows, int cols,
                   Term whole_op_ensures, const std::string& dst, int dst_len) {
    {
      FunctionContract fc;
      fc.name = base;
      fc.ensures_.push_back(whole_op_ensures);
      fc.assigns.push_back(range_of(dst, dst_len));
      s.functions.push_back(std::move(fc));
    }
    if (static_cast<int>(assigns.size()) <= Tolerances::elem_split_threshold) {
      k.functions.push_back({base, std::move(assigns)});
      return;
    }
    Function parent{base, {}};
    std::vector<Function> elems;
    for (std::size_t i = 0; i < assigns.size(); ++i) {
      Stmt& st = assigns[i];
      const int r = static_cast<int>(i) / cols, c = static_cast<int>(i) % cols;
      const std::string elem = base + "_" + std::to_string(r) + "_" + std::to_string(c);
      parent.body.push_back(call(elem));
      FunctionContract ec;
      ec.name = elem;
      std::vector<std::string> refs = expr_refs(st.expr);
      refs.insert(refs.begin(), dst);
      ec.ensures_.push_back({"mat_get(" + std::string("MatVar(") + dst + ", " +
                                 std::to_string(rows) + ", " + std::to_string(cols) + "), " +
                                 std::to_string(r) + ", " + std::to_string(c) +
                                 ") == " + expr_to_text(st.expr),
                             std::move(refs)});
      ec.assigns.push_back(dst + "[" + std::to_string(st.dst_index) + ".." +
                           std::to_string(st.dst_index) + "]");
      s.functions.push_back(std::move(ec));
      elems.push_back({elem, {std::move(st)}});
    }
    k.functions.push_back(std::move(parent));
    for (Function& e : elems) k.functions.push_back(std::move(e));
  }
};

std::string matvar(const std::string& name, int rows, int cols) {
  return "MatVar(" + name + ", " + std::to_string(rows) + ", " + std::to_string(cols) + ")";
}

}  // namespace

SpecializeResult specialize(const LpInstance& p, const IpmConfig& cfg,
                            const IterationSchedule& sched, const Vector& x_ac) {
  p.validate();
  cfg.validate();
  if (x_ac.size() != p.cols()) throw ShapeError("specialize: x_ac length mismatch");
  if (sched.trip_count < 1) throw InvalidArgument("specialize: schedule has no iterations");

  Emitter em;
  const int n = em.n = p.cols();
  const int m = em.m = p.rows();
  em.k.sizes = {n, m, sched.trip_count};

  // baked constants
  em.constant("A", std::vector<double>(p.a.data(), p.a.data() + m * n));
  em.constant("b", std::vector<double>(p.b.data(), p.b.data() + m));
  em.constant("c", std::vector<double>(p.c.data(), p.c.data() + n));
  em.constant("X_AC", std::vector<double>(x_ac.data(), x_ac.data() + n));
  em.constant("BETA", {cfg.beta});
  em.constant("GAMMA", {cfg.gamma});
  em.constant("EPSILON", {cfg.epsilon});
  em.constant("SQRT_NU", {std::sqrt(static_cast<double>(m))});  // barrier parameter nu = m
  em.constant("T_INIT", {sched.t_init});
  em.constant("RATIO", {sched.ratio});
  em.constant("T_STOP", {sched.t_stop});

  // globals, prefixed by their owning function
  em.global("pathfollowing_X", n);
  em.global("pathfollowing_t", 1);
  em.global("update_pre_ax", m);
  em.global("update_pre_slack", m);
  em.global("update_pre_w", m);
  em.global("update_pre_w2", m);
  em.global("update_pre_grad", n);
  em.global("update_pre_hess", n * n);
  em.global("update_t_old_t", 1);
  em.global("compute_dt_cholesky", n);
  em.global("compute_dt_dot", 1);
  em.global("compute_dt_norm", 1);
  em.global("compute_dt_dt", 1);
  em.global("cholesky_L", n * n);
  em.global("compute_dx_tc", n);
  em.global("compute_dx_rhs", n);
  em.global("compute_dx_cholesky", n);
  em.global("compute_dx_dX", n);

  // runtime checks behind the AssertContract tags
  em.k.checks = {
      {"pathfollowing.requires.feasible", ContractCheck::Kind::feasible, cfg.feas_margin, 0.0},
      {"pathfollowing.requires.acc0", ContractCheck::Kind::acc, cfg.beta, cfg.acc_slack},
      {"update_t.ensures.acc", ContractCheck::Kind::acc, cfg.beta + cfg.gamma, cfg.acc_slack},
      {"update_t.ensures.progress", ContractCheck::Kind::progress, 0.0,
       Tolerances::progress_slack},
      {"loop.invariant.feasible", ContractCheck::Kind::feasible, cfg.feas_margin, 0.0},
      {"loop.invariant.acc", ContractCheck::Kind::acc, cfg.beta, cfg.acc_slack},
      {"loop.invariant.lower", ContractCheck::Kind::lower, 0.0, Tolerances::progress_slack},
      {"pathfollowing.ensures.t_stop", ContractCheck::Kind::t_stop, 0.0,
       Tolerances::tstop_rel_slack},
  };

  const std::string X = "pathfollowing_X";
  const std::string T = "pathfollowing_t";
  const std::string feas_text = "mat_gt(b, mat_mult(A, " + matvar(X, n, 1) + "))";
  const std::string acc_at = "acc(A, b, c, " + T + "[0], " + matvar(X, n, 1) + ", BETA)";
  const std::vector<std::string> feas_refs = {"A", "b", X};
  const std::vector<std::string> acc_refs = {"A", "b", "c", T, X, "BETA"};

  // ---- compute -------------------------------------------------------------
  {
    Function& f = em.fn("compute");
    f.body.push_back(Emitter::call("set_X_init"));
    f.body.push_back(Emitter::assign(T, 0, Expr::L(0.0)));
    f.body.push_back(Emitter::call("pathfollowing"));
    FunctionContract& fc = em.contract("compute");
    fc.ensures_.push_back({feas_text, feas_refs});
    fc.ensures_.push_back(
        {"dot(" + matvar(X, n, 1) + ", c) - sol(A, b, c) < EPSILON", {X, "c", "A", "b", "EPSILON"}});
    for (const auto& g : em.k.globals) fc.assigns.push_back(range_of(g.name, g.len));
  }

  // ---- pathfollowing -------------------------------------------------------
  {
    Function& f = em.fn("pathfollowing");
    f.body.push_back(Emitter::assert_tag("pathfollowing.requires.feasible"));
    f.body.push_back(Emitter::assert_tag("pathfollowing.requires.acc0"));
    Stmt loop;
    loop.op = Stmt::Op::fixed_loop;
    loop.count = sched.trip_count;
    loop.body.push_back(Emitter::call("update_pre"));
    loop.body.push_back(Emitter::call("update_t"));
    loop.body.push_back(Emitter::call("update_x"));
    loop.body.push_back(Emitter::assert_tag("loop.invariant.feasible"));
    loop.body.push_back(Emitter::assert_tag("loop.invariant.acc"));
    loop.body.push_back(Emitter::assert_tag("loop.invariant.lower"));
    f.body.push_back(std::move(loop));
    f.body.push_back(Emitter::assert_tag("pathfollowing.ensures.t_stop"));

    FunctionContract& fc = em.contract("pathfollowing");
    fc.requires_.push_back({feas_text, feas_refs});
    fc.requires_.push_back(
        {"acc(A, b, c, 0.0, " + matvar(X, n, 1) + ", BETA)", {"A", "b", "c", X, "BETA"}});
    fc.ensures_.push_back({feas_text, feas_refs});
    fc.ensures_.push_back(
        {"dot(" + matvar(X, n, 1) + ", c) - sol(A, b, c) < EPSILON", {X, "c", "A", "b", "EPSILON"}});
    for (const auto& g : em.k.globals) fc.assigns.push_back(range_of(g.name, g.len));

    em.s.loop.feasibility = {feas_text, feas_refs};
    em.s.loop.acc = {acc_at, acc_refs};
    em.s.loop.lower = {T + "[0] >= T_INIT * pow(RATIO, l - 1)", {T, "T_INIT", "RATIO"}};
  }

  // ---- update_pre ----------------------------------------------------------
  {
    Function& f = em.fn("update_pre");
    f.body.push_back(Emitter::call("set_update_pre_ax"));
    f.body.push_back(Emitter::call("set_update_pre_slack"));
    f.body.push_back(Emitter::call("set_update_pre_w"));
    f.body.push_back(Emitter::call("set_update_pre_w2"));
    f.body.push_back(Emitter::call("set_update_pre_grad"));
    f.body.push_back(Emitter::call("set_update_pre_hess"));
    FunctionContract& fc = em.contract("update_pre");
    fc.requires_.push_back({feas_text, feas_refs});
    fc.ensures_.push_back({matvar("update_pre_slack", m, 1) + " == mat_add(b, mat_scal(mat_mult(A, " +
                               matvar(X, n, 1) + "), -1.0))",
                           {"update_pre_slack", "b", "A", X}});
    fc.ensures_.push_back({matvar("update_pre_grad", n, 1) + " == grad(A, b, " + matvar(X, n, 1) + ")",
                           {"update_pre_grad", "A", "b", X}});
    fc.ensures_.push_back({matvar("update_pre_hess", n, n) + " == hess(A, b, " + matvar(X, n, 1) + ")",
                           {"update_pre_hess", "A", "b", X}});
    for (const char* g : {"update_pre_ax", "update_pre_slack", "update_pre_w", "update_pre_w2"})
      fc.assigns.push_back(range_of(g, m));
    fc.assigns.push_back(range_of("update_pre_grad", n));
    fc.assigns.push_back(range_of("update_pre_hess", n * n));
  }

  // ---- update_t ------------------------------------------------------------
  {
    Function& f = em.fn("update_t");
    f.body.push_back(Emitter::assign("update_t_old_t", 0, Expr::R(T, 0)));
    f.body.push_back(Emitter::call("compute_dt"));
    f.body.push_back(
        Emitter::assign(T, 0, Expr::bin(EK::add, Expr::R(T, 0), Expr::R("compute_dt_dt", 0))));
    f.body.push_back(Emitter::assert_tag("update_t.ensures.acc"));
    f.body.push_back(Emitter::assert_tag("update_t.ensures.progress"));
    FunctionContract& fc = em.contract("update_t");
    fc.requires_.push_back({matvar("update_pre_hess", n, n) + " == hess(A, b, " + matvar(X, n, 1) + ")",
                            {"update_pre_hess", "A", "b", X}});
    fc.requires_.push_back({acc_at, acc_refs});
    fc.ensures_.push_back(
        {"acc(A, b, c, " + T + "[0], " + matvar(X, n, 1) + ", BETA + GAMMA)",
         {"A", "b", "c", T, X, "BETA", "GAMMA"}});
    fc.ensures_.push_back(
        {T + "[0] > \\old(" + T + "[0]) * (1 + GAMMA / (BETA + SQRT_NU))",
         {T, "GAMMA", "BETA", "SQRT_NU"}});
    fc.assigns.push_back(range_of("update_t_old_t", 1));
    fc.assigns.push_back(range_of(T, 1));
    fc.assigns.push_back(range_of("cholesky_L", n * n));
    fc.assigns.push_back(range_of("compute_dt_cholesky", n));
    for (const char* g : {"compute_dt_dot", "compute_dt_norm", "compute_dt_dt"})
      fc.assigns.push_back(range_of(g, 1));
  }

  // ---- compute_dt ----------------------------------------------------------
  {
    Function& f = em.fn("compute_dt");
    f.body.push_back(Emitter::call("cholesky"));
    Stmt solve;
    solve.op = Stmt::Op::chol_solve;
    solve.dst = "compute_dt_cholesky";
    solve.a = "cholesky_L";
    solve.b = "c";
    solve.dim = n;
    f.body.push_back(std::move(solve));
    Stmt d;
    d.op = Stmt::Op::dot;
    d.dst = "compute_dt_dot";
    d.a = "c";
    d.b = "compute_dt_cholesky";
    d.len = n;
    f.body.push_back(std::move(d));
    Stmt sq;
    sq.op = Stmt::Op::sqrt_op;
    sq.dst = "compute_dt_norm";
    sq.a = "compute_dt_dot";
    f.body.push_back(std::move(sq));
    Stmt dv;
    dv.op = Stmt::Op::div;
    dv.dst = "compute_dt_dt";
    dv.a = "GAMMA";
    dv.b = "compute_dt_norm";
    f.body.push_back(std::move(dv));
    FunctionContract& fc = em.contract("compute_dt");
    fc.requires_.push_back({matvar("update_pre_hess", n, n) + " == hess(A, b, " + matvar(X, n, 1) + ")",
                            {"update_pre_hess", "A", "b", X}});
    fc.ensures_.push_back({"compute_dt_dt[0] == GAMMA / norm(A, b, c, " + matvar(X, n, 1) + ")",
                           {"compute_dt_dt", "GAMMA", "A", "b", "c", X}});
    fc.assigns.push_back(range_of("cholesky_L", n * n));
    fc.assigns.push_back(range_of("compute_dt_cholesky", n));
    for (const char* g : {"compute_dt_dot", "compute_dt_norm", "compute_dt_dt"})
      fc.assigns.push_back(range_of(g, 1));
  }

  // ---- update_x ------------------------------------------------------------
  {
    Function& f = em.fn("update_x");
    f.body.push_back(Emitter::call("compute_dx"));
    f.body.push_back(Emitter::call("set_update_x_X"));
    FunctionContract& fc = em.contract("update_x");
    fc.requires_.push_back(
        {"acc(A, b, c, " + T + "[0], " + matvar(X, n, 1) + ", BETA + GAMMA)",
         {"A", "b", "c", T, X, "BETA", "GAMMA"}});
    fc.ensures_.push_back({feas_text, feas_refs});
    fc.ensures_.push_back({acc_at, acc_refs});
    fc.assigns.push_back(range_of(X, n));
    fc.assigns.push_back(range_of("cholesky_L", n * n));
    for (const char* g : {"compute_dx_tc", "compute_dx_rhs", "compute_dx_cholesky", "compute_dx_dX"})
      fc.assigns.push_back(range_of(g, n));
  }

  // ---- compute_dx ----------------------------------------------------------
  {
    Function& f = em.fn("compute_dx");
    f.body.push_back(Emitter::call("cholesky"));
    f.body.push_back(Emitter::call("set_compute_dx_tc"));
    f.body.push_back(Emitter::call("set_compute_dx_rhs"));
    Stmt solve;
    solve.op = Stmt::Op::chol_solve;
    solve.dst = "compute_dx_cholesky";
    solve.a = "cholesky_L";
    solve.b = "compute_dx_rhs";
    solve.dim = n;
    f.body.push_back(std::move(solve));
    f.body.push_back(Emitter::call("set_dX"));
    FunctionContract& fc = em.contract("compute_dx");
    fc.requires_.push_back({matvar("update_pre_hess", n, n) + " == hess(A, b, " + matvar(X, n, 1) + ")",
                            {"update_pre_hess", "A", "b", X}});
    fc.ensures_.push_back(
        {matvar("compute_dx_dX", n, 1) + " == mat_scal(mat_mult(inv(" + matvar("update_pre_hess", n, n) +
             "), mat_add(mat_scal(c, " + T + "[0]), " + matvar("update_pre_grad", n, 1) + ")), -1.0)",
         {"compute_dx_dX", "update_pre_hess", "c", T, "update_pre_grad"}});
    fc.assigns.push_back(range_of("cholesky_L", n * n));
    for (const char* g : {"compute_dx_tc", "compute_dx_rhs", "compute_dx_cholesky", "compute_dx_dX"})
      fc.assigns.push_back(range_of(g, n));
  }

  // ---- cholesky ------------------------------------------------------------
  {
    Function& f = em.fn("cholesky");
    Stmt st;
    st.op = Stmt::Op::chol_factor;
    st.dst = "cholesky_L";
    st.a = "update_pre_hess";
    st.dim = n;
    f.body.push_back(std::move(st));
    FunctionContract& fc = em.contract("cholesky");
    fc.requires_.push_back({matvar("update_pre_hess", n, n) + " == transpose(" +
                                matvar("update_pre_hess", n, n) + ")",
                            {"update_pre_hess"}});
    fc.ensures_.push_back({"mat_mult(" + matvar("cholesky_L", n, n) + ", transpose(" +
                               matvar("cholesky_L", n, n) + ")) == " + matvar("update_pre_hess", n, n),
                           {"cholesky_L", "update_pre_hess"}});
    fc.assigns.push_back(range_of("cholesky_L", n * n));
  }

  // ---- set_* element kernels ----------------------------------------------
  {
    std::vector<Stmt> init;
    for (int i = 0; i < n; ++i) init.push_back(Emitter::assign(X, i, Expr::R("X_AC", i)));
    em.emit_set_fn("set_X_init", std::move(init), n, 1,
                   {matvar(X, n, 1) + " == " + matvar("X_AC", n, 1), {X, "X_AC"}}, X, n);
  }
  {
    // ax = A * X as a macro statement unless it must split
    if (m <= Tolerances::elem_split_threshold) {
      FunctionContract& fc = em.contract("set_update_pre_ax");
      fc.ensures_.push_back({matvar("update_pre_ax", m, 1) + " == mat_mult(A, " + matvar(X, n, 1) + ")",
                             {"update_pre_ax", "A", X}});
      fc.assigns.push_back(range_of("update_pre_ax", m));
      Function& f = em.fn("set_update_pre_ax");
      Stmt mm;
      mm.op = Stmt::Op::mat_mul;
      mm.dst = "update_pre_ax";
      mm.a = "A";
      mm.b = X;
      mm.rows = m;
      mm.inner = n;
      mm.cols = 1;
      f.body.push_back(std::move(mm));
    } else {
      std::vector<Stmt> rows;
      for (int i = 0; i < m; ++i) {
        Expr acc = Expr::bin(EK::mul, Expr::R("A", i * n), Expr::R(X, 0));
        for (int j = 1; j < n; ++j)
          acc = Expr::bin(EK::add, std::move(acc),
                          Expr::bin(EK::mul, Expr::R("A", i * n + j), Expr::R(X, j)));
        rows.push_back(Emitter::assign("update_pre_ax", i, std::move(acc)));
      }
      em.emit_set_fn("set_update_pre_ax", std::move(rows), m, 1,
                     {matvar("update_pre_ax", m, 1) + " == mat_mult(A, " + matvar(X, n, 1) + ")",
                      {"update_pre_ax", "A", X}},
                     "update_pre_ax", m);
    }
  }
  {
    std::vector<Stmt> rows;
    for (int i = 0; i < m; ++i)
      rows.push_back(Emitter::assign(
          "update_pre_slack", i,
          Expr::bin(EK::sub, Expr::R("b", i), Expr::R("update_pre_ax", i))));
    em.emit_set_fn("set_update_pre_slack", std::move(rows), m, 1,
                   {matvar("update_pre_slack", m, 1) + " == mat_add(b, mat_scal(" +
                        matvar("update_pre_ax", m, 1) + ", -1.0))",
                    {"update_pre_slack", "b", "update_pre_ax"}},
                   "update_pre_slack", m);
  }
  {
    std::vector<Stmt> rows;
    for (int i = 0; i < m; ++i)
      rows.push_back(Emitter::assign(
          "update_pre_w", i, Expr::bin(EK::div, Expr::L(1.0), Expr::R("update_pre_slack", i))));
    em.emit_set_fn("set_update_pre_w", std::move(rows), m, 1,
                   {"\\forall integer i; 0 <= i < " + std::to_string(m) +
                        " ==> update_pre_w[i] == 1.0 / update_pre_slack[i]",
                    {"update_pre_w", "update_pre_slack"}},
                   "update_pre_w", m);
  }
  {
    std::vector<Stmt> rows;
    for (int i = 0; i < m; ++i)
      rows.push_back(Emitter::assign(
          "update_pre_w2", i,
          Expr::bin(EK::div, Expr::R("update_pre_w", i), Expr::R("update_pre_slack", i))));
    em.emit_set_fn("set_update_pre_w2", std::move(rows), m, 1,
                   {"\\forall integer i; 0 <= i < " + std::to_string(m) +
                        " ==> update_pre_w2[i] == update_pre_w[i] / update_pre_slack[i]",
                    {"update_pre_w2", "update_pre_w", "update_pre_slack"}},
                   "update_pre_w2", m);
  }
  {
    // grad[r] = sum_i A[i][r] * w[i]
    std::vector<Stmt> rows;
    for (int r = 0; r < n; ++r) {
      Expr acc = Expr::bin(EK::mul, Expr::R("A", r), Expr::R("update_pre_w", 0));
      for (int i = 1; i < m; ++i)
        acc = Expr::bin(EK::add, std::move(acc),
                        Expr::bin(EK::mul, Expr::R("A", i * n + r), Expr::R("update_pre_w", i)));
      rows.push_back(Emitter::assign("update_pre_grad", r, std::move(acc)));
    }
    em.emit_set_fn("set_update_pre_grad", std::move(rows), n, 1,
                   {matvar("update_pre_grad", n, 1) + " == grad(A, b, " + matvar(X, n, 1) + ")",
                    {"update_pre_grad", "A", "b", X}},
                   "update_pre_grad", n);
  }
  {
    // hess[r][c] = sum_i (A[i][r] * A[i][c]) * w2[i], outer-product accumulation
    std::vector<Stmt> cells;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        Expr acc = Expr::bin(EK::mul, Expr::bin(EK::mul, Expr::R("A", r), Expr::R("A", c)),
                             Expr::R("update_pre_w2", 0));
        for (int i = 1; i < m; ++i)
          acc = Expr::bin(
              EK::add, std::move(acc),
              Expr::bin(EK::mul,
                        Expr::bin(EK::mul, Expr::R("A", i * n + r), Expr::R("A", i * n + c)),
                        Expr::R("update_pre_w2", i)));
        cells.push_back(Emitter::assign("update_pre_hess", r * n + c, std::move(acc)));
      }
    }
    em.emit_set_fn("set_update_pre_hess", std::move(cells), n, n,
                   {matvar("update_pre_hess", n, n) + " == hess(A, b, " + matvar(X, n, 1) + ")",
                    {"update_pre_hess", "A", "b", X}},
                   "update_pre_hess", n * n);
  }
  {
    if (n <= Tolerances::elem_split_threshold) {
      FunctionContract& fc = em.contract("set_compute_dx_tc");
      fc.ensures_.push_back({matvar("compute_dx_tc", n, 1) + " == mat_scal(c, " + T + "[0])",
                             {"compute_dx_tc", "c", T}});
      fc.assigns.push_back(range_of("compute_dx_tc", n));
      Function& f = em.fn("set_compute_dx_tc");
      Stmt sc;
      sc.op = Stmt::Op::scale;
      sc.dst = "compute_dx_tc";
      sc.a = "c";
      sc.scalar = T;
      sc.len = n;
      f.body.push_back(std::move(sc));
    } else {
      std::vector<Stmt> rows;
      for (int i = 0; i < n; ++i)
        rows.push_back(Emitter::assign(
            "compute_dx_tc", i, Expr::bin(EK::mul, Expr::R("c", i), Expr::R(T, 0))));
      em.emit_set_fn("set_compute_dx_tc", std::move(rows), n, 1,
                     {matvar("compute_dx_tc", n, 1) + " == mat_scal(c, " + T + "[0])",
                      {"compute_dx_tc", "c", T}},
                     "compute_dx_tc", n);
    }
  }
  {
    if (n <= Tolerances::elem_split_threshold) {
      FunctionContract& fc = em.contract("set_compute_dx_rhs");
      fc.ensures_.push_back({matvar("compute_dx_rhs", n, 1) + " == mat_add(" +
                                 matvar("compute_dx_tc", n, 1) + ", " +
                                 matvar("update_pre_grad", n, 1) + ")",
                             {"compute_dx_rhs", "compute_dx_tc", "update_pre_grad"}});
      fc.assigns.push_back(range_of("compute_dx_rhs", n));
      Function& f = em.fn("set_compute_dx_rhs");
      Stmt ad;
      ad.op = Stmt::Op::mat_add;
      ad.dst = "compute_dx_rhs";
      ad.a = "compute_dx_tc";
      ad.b = "update_pre_grad";
      ad.len = n;
      f.body.push_back(std::move(ad));
    } else {
      std::vector<Stmt> rows;
      for (int i = 0; i < n; ++i)
        rows.push_back(Emitter::assign(
            "compute_dx_rhs", i,
            Expr::bin(EK::add, Expr::R("compute_dx_tc", i), Expr::R("update_pre_grad", i))));
      em.emit_set_fn("set_compute_dx_rhs", std::move(rows), n, 1,
                     {matvar("compute_dx_rhs", n, 1) + " == mat_add(" + matvar("compute_dx_tc", n, 1) +
                          ", " + matvar("update_pre_grad", n, 1) + ")",
                      {"compute_dx_rhs", "compute_dx_tc", "update_pre_grad"}},
                     "compute_dx_rhs", n);
    }
  }
  {
    std::vector<Stmt> rows;
    for (int i = 0; i < n; ++i)
      rows.push_back(Emitter::assign("compute_dx_dX", i,
                                     Expr::un(EK::neg, Expr::R("compute_dx_cholesky", i))));
    em.emit_set_fn("set_dX", std::move(rows), n, 1,
                   {matvar("compute_dx_dX", n, 1) + " == mat_scal(" +
                        matvar("compute_dx_cholesky", n, 1) + ", -1.0)",
                    {"compute_dx_dX", "compute_dx_cholesky"}},
                   "compute_dx_dX", n);
  }
  {
    std::vector<Stmt> rows;
    for (int i = 0; i < n; ++i)
      rows.push_back(Emitter::assign(
          X, i, Expr::bin(EK::add, Expr::R(X, i), Expr::R("compute_dx_dX", i))));
    em.emit_set_fn("set_update_x_X", std::move(rows), n, 1,
                   {matvar(X, n, 1) + " == mat_add(\\old(" + matvar(X, n, 1) + "), " +
                        matvar("compute_dx_dX", n, 1) + ")",
                    {X, "compute_dx_dX"}},
                   X, n);
  }

  // ---- lemma chain ----------------------------------------------------------
  {
    const std::string P1 = "acc(A, b, c, t, X, BETA)";
    const std::string P2 = "dt == GAMMA / norm(A, b, c, X)";
    const std::string q = "\\forall LMat X; \\forall real t, dt; ";
    const std::vector<std::string> lemma_refs = {"A", "b", "c", "BETA", "GAMMA"};
    em.s.lemmas = {
        {"update_t_ensures1",
         {q + P1 + " ==> " + P2 + " ==> acc(A, b, c, t + dt, X, BETA + GAMMA)", lemma_refs}},
        {"update_t_ensures1_l0",
         {q + P1 + " ==> " + P2 +
              " ==> norm(A, b, mat_add(grad(A, b, X), mat_scal(c, t + dt)), X) <= BETA + GAMMA",
          lemma_refs}},
        {"update_t_ensures1_l1",
         {q + P1 + " ==> " + P2 +
              " ==> norm(A, b, mat_add(grad(A, b, X), mat_scal(c, t + dt)), X) <= "
              "norm(A, b, mat_add(grad(A, b, X), mat_scal(c, t)), X) + "
              "norm(A, b, mat_scal(c, dt), X)",
          lemma_refs}},
        {"update_t_ensures1_l2",
         {q + P1 + " ==> norm(A, b, mat_add(grad(A, b, X), mat_scal(c, t)), X) <= BETA",
          lemma_refs}},
        {"update_t_ensures1_l3",
         {q + P2 + " ==> norm(A, b, mat_scal(c, dt), X) == GAMMA", lemma_refs}},
    };
  }

  validate(em.k);
  validate_sidecar(em.k, em.s);
  return SpecializeResult{std::move(em.k), std::move(em.s)};
}

}  // namespace ipmforge::codegen
