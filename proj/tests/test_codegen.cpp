#include <functional>
#include <regex>
#include <set>

#include "doctest.h"

#include "ipmforge/codegen.hpp"
#include "support/test_support.hpp"

using namespace ipmforge;
using namespace ipmforge::codegen;
using ipmforge::testing::unit1;

namespace {

SpecializeResult specialize_unit1(double epsilon = 1e-2) {
  LpInstance p = unit1(epsilon);
  IpmConfig cfg = default_config(epsilon);
  CenterResult center = analytic_center(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  IterationSchedule sched = build_schedule(p, center.be, cfg);
  return specialize(p, cfg, sched, center.x);
}

SpecializeResult specialize_instance(const LpInstance& p, const FeasibleWitness& start) {
  IpmConfig cfg = default_config(p.epsilon);
  CenterResult center = analytic_center(p, start, cfg);
  IterationSchedule sched = build_schedule(p, center.be, cfg);
  return specialize(p, cfg, sched, center.x);
}

int count_for_tokens(const std::string& text) {
  static const std::regex re(R"(\bfor\b)");
  return static_cast<int>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                        std::sregex_iterator()));
}

}  // namespace

TEST_CASE("unit interval kernel bakes the schedule") {
  SpecializeResult r = specialize_unit1();
  CHECK(r.kernel.sizes.n == 1);
  CHECK(r.kernel.sizes.m == 2);
  CHECK(r.kernel.sizes.trip_count == 147);
  const GlobalDecl* x = r.kernel.find_global("pathfollowing_X");
  REQUIRE(x != nullptr);
  CHECK(x->len == 1);
  const GlobalDecl* chol = r.kernel.find_global("compute_dt_cholesky");
  REQUIRE(chol != nullptr);
  CHECK(chol->len == 1);
  CHECK_NOTHROW(validate(r.kernel));
}

TEST_CASE("call tree matches the expected shape") {
  SpecializeResult r = specialize_unit1();
  auto callees = [&](const std::string& fn) {
    std::set<std::string> out;
    const Function* f = r.kernel.find_function(fn);
    REQUIRE(f != nullptr);
    std::function<void(const std::vector<Stmt>&)> walk = [&](const std::vector<Stmt>& body) {
      for (const Stmt& s : body) {
        if (s.op == Stmt::Op::call) out.insert(s.callee);
        if (s.op == Stmt::Op::fixed_loop) walk(s.body);
      }
    };
    walk(f->body);
    return out;
  };
  CHECK(callees("compute") == std::set<std::string>{"set_X_init", "pathfollowing"});
  CHECK(callees("pathfollowing") == std::set<std::string>{"update_pre", "update_t", "update_x"});
  CHECK(callees("update_t") == std::set<std::string>{"compute_dt"});
  CHECK(callees("update_x") == std::set<std::string>{"compute_dx"});
  // cholesky sits under both compute_dt and compute_dx
  CHECK(callees("compute_dt").count("cholesky") == 1);
  CHECK(callees("compute_dx").count("cholesky") == 1);
  CHECK(callees("compute_dx").count("set_dX") == 1);
}

TEST_CASE("sidecar carries the update_t contract and lemma chain") {
  SpecializeResult r = specialize_unit1();
  const FunctionContract* ut = r.sidecar.find("update_t");
  REQUIRE(ut != nullptr);
  bool found_ratio = false;
  for (const Term& t : ut->ensures_)
    if (t.text.find("(1 + GAMMA / (BETA + SQRT_NU))") != std::string::npos) found_ratio = true;
  CHECK(found_ratio);

  REQUIRE(r.sidecar.lemmas.size() == 5);
  CHECK(r.sidecar.lemmas[0].name == "update_t_ensures1");
  CHECK(r.sidecar.lemmas[1].name == "update_t_ensures1_l0");
  CHECK(r.sidecar.lemmas[2].name == "update_t_ensures1_l1");
  CHECK(r.sidecar.lemmas[3].name == "update_t_ensures1_l2");
  CHECK(r.sidecar.lemmas[4].name == "update_t_ensures1_l3");

  const FunctionContract* pf = r.sidecar.find("pathfollowing");
  REQUIRE(pf != nullptr);
  CHECK(pf->requires_.size() == 2);
  CHECK(pf->ensures_.size() == 2);
  CHECK_NOTHROW(validate_sidecar(r.kernel, r.sidecar));
}

TEST_CASE("interpreter reproduces the solver on the unit interval") {
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  FeasibleWitness start = check_strict_feasibility(p, Vector::Zero(1));
  SolveCertificate direct = solve(p, start, cfg);
  SpecializeResult r = specialize_instance(p, start);

  SolveCertificate checked = interpret(r.kernel, InterpretMode::checked);
  CHECK(checked.iterations == direct.iterations);
  CHECK(std::fabs(checked.x_final[0] - direct.x_final[0]) <= Tolerances::diff_test);
  for (const MonitorRecord& rec : checked.monitor) CHECK(rec.pass);

  SolveCertificate unchecked = interpret(r.kernel, InterpretMode::unchecked);
  CHECK(unchecked.x_final[0] == checked.x_final[0]);  // bitwise
  CHECK(unchecked.t_final == checked.t_final);
  CHECK(unchecked.monitor.empty());
}

TEST_CASE("differential equivalence on random instances") {
  IpmConfig cfg = default_config(1e-2);
  for (std::uint64_t seed : {61u, 62u}) {
    RandomInstance inst = random_instance(3, 10, seed);
    SolveCertificate direct = solve(inst.lp, inst.start, cfg);
    SpecializeResult r = specialize_instance(inst.lp, inst.start);
    SolveCertificate interp = interpret(r.kernel, InterpretMode::checked);
    CHECK(interp.iterations == direct.iterations);
    for (int i = 0; i < inst.lp.cols(); ++i)
      CHECK(std::fabs(interp.x_final[i] - direct.x_final[i]) <= Tolerances::diff_test);
  }
}

TEST_CASE("kernel json round trips byte for byte") {
  SpecializeResult r = specialize_unit1();
  Json j = kernel_to_json(r.kernel);
  KernelProgram back = kernel_from_json(j);
  CHECK_NOTHROW(validate(back));
  CHECK(kernel_to_json(back).dump() == j.dump());
  // and the reparsed kernel still runs identically
  SolveCertificate a = interpret(r.kernel, InterpretMode::unchecked);
  SolveCertificate b = interpret(back, InterpretMode::unchecked);
  CHECK(a.x_final == b.x_final);
}

TEST_CASE("mismatched array length is rejected before execution") {
  SpecializeResult r = specialize_unit1();
  Json j = kernel_to_json(r.kernel);
  for (auto& g : j.at("globals"))
    if (g.at("name") == "update_pre_hess") g["len"] = 7;
  KernelProgram bad = kernel_from_json(j);
  CHECK_THROWS_AS(validate(bad), IllFormedKernel);
  CHECK_THROWS_AS(interpret(bad, InterpretMode::unchecked), IllFormedKernel);
}

TEST_CASE("validator rejects a second loop and bad calls") {
  SpecializeResult r = specialize_unit1();
  {
    KernelProgram k = r.kernel;
    Stmt loop;
    loop.op = Stmt::Op::fixed_loop;
    loop.count = k.sizes.trip_count;
    for (auto& f : k.functions)
      if (f.name == "update_pre") f.body.push_back(loop);
    CHECK_THROWS_AS(validate(k), IllFormedKernel);
  }
  {
    KernelProgram k = r.kernel;
    Stmt call;
    call.op = Stmt::Op::call;
    call.callee = "missing_fn";
    for (auto& f : k.functions)
      if (f.name == "compute") f.body.push_back(call);
    CHECK_THROWS_AS(validate(k), IllFormedKernel);
  }
  {
    // a call cycle
    KernelProgram k = r.kernel;
    Stmt call;
    call.op = Stmt::Op::call;
    call.callee = "pathfollowing";
    for (auto& f : k.functions)
      if (f.name == "update_pre") f.body.push_back(call);
    CHECK_THROWS_AS(validate(k), IllFormedKernel);
  }
}

TEST_CASE("sidecar json round trips") {
  SpecializeResult r = specialize_unit1();
  const std::string text = render_sidecar_json(r.sidecar);
  ContractSidecar back = sidecar_from_json(Json::parse(text));
  CHECK(back == r.sidecar);
  // canonical: serializing again gives identical bytes
  CHECK(render_sidecar_json(back) == text);
}

TEST_CASE("rendered C text has exactly one loop and static storage") {
  SpecializeResult r = specialize_unit1();
  const std::string text = render_c(r.kernel, r.sidecar);
  CHECK(count_for_tokens(text) == 1);
  CHECK(text.find("static double pathfollowing_X[1];") != std::string::npos);
  CHECK(text.find("#define NBR 147") != std::string::npos);
  CHECK(text.find("malloc") == std::string::npos);
  // contract comments made it in
  CHECK(text.find("(1 + GAMMA / (BETA + SQRT_NU))") != std::string::npos);
  CHECK(text.find("loop invariant") != std::string::npos);
}

TEST_CASE("static footprint follows the closed form") {
  for (auto [n, m] : {std::pair{1, 2}, std::pair{3, 10}, std::pair{4, 14}}) {
    RandomInstance inst =
        n == 1 ? RandomInstance{unit1(), check_strict_feasibility(unit1(), Vector::Zero(1))}
               : random_instance(n, m, 99);
    SpecializeResult r = specialize_instance(inst.lp, inst.start);
    CHECK(static_footprint_bytes(r.kernel) ==
          expected_footprint_bytes(inst.lp.cols(), inst.lp.rows()));
  }
}

TEST_CASE("footprint is independent of the numerical values") {
  RandomInstance a = random_instance(3, 10, 1);
  RandomInstance b = random_instance(3, 10, 2);
  SpecializeResult ra = specialize_instance(a.lp, a.start);
  SpecializeResult rb = specialize_instance(b.lp, b.start);
  CHECK(static_footprint_bytes(ra.kernel) == static_footprint_bytes(rb.kernel));
}

TEST_CASE("large elementwise ops split into per-element kernels") {
  // n = 11 makes the hessian op 121 elements, above the threshold of 100
  LpInstance p;
  p.a = Matrix(0, 11);
  p.b = Vector(0);
  p.c = Vector::Ones(11);
  p.epsilon = 1e-1;
  p = add_hypercube(p, 1.0);
  FeasibleWitness start = check_strict_feasibility(p, Vector::Zero(11));
  SpecializeResult r = specialize_instance(p, start);
  CHECK(r.kernel.find_function("set_update_pre_hess_0_0") != nullptr);
  CHECK(r.kernel.find_function("set_update_pre_hess_10_10") != nullptr);
  const FunctionContract* fc = r.sidecar.find("set_update_pre_hess_0_0");
  REQUIRE(fc != nullptr);
  REQUIRE(fc->ensures_.size() == 1);
  CHECK(fc->ensures_[0].text.find("mat_get(MatVar(update_pre_hess, 11, 11), 0, 0)") !=
        std::string::npos);
  // still interprets correctly
  SolveCertificate direct = solve(p, start, default_config(p.epsilon));
  SolveCertificate interp = interpret(r.kernel, InterpretMode::checked);
  for (int i = 0; i < p.cols(); ++i)
    CHECK(std::fabs(interp.x_final[i] - direct.x_final[i]) <= Tolerances::diff_test);
}
