#include <cmath>

#include "doctest.h"

#include "ipmforge/ipm_core.hpp"
#include "ipmforge/oracle.hpp"
#include "support/test_support.hpp"

using namespace ipmforge;
using ipmforge::testing::unit1;

TEST_CASE("default config hits the admissible extremes") {
  IpmConfig cfg = default_config(1e-2);
  CHECK(cfg.beta == 0.25);
  CHECK(cfg.beta < (3.0 - std::sqrt(5.0)) / 2.0);
  CHECK(cfg.gamma == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config invariants are enforced") {
  IpmConfig cfg = default_config(1e-2);
  cfg.beta = 0.4;  // beyond (3 - sqrt 5)/2 ~ 0.381966
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = default_config(1e-2);
  cfg.gamma = 0.1;  // beyond 1/12
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = default_config(1e-2);
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("analytic center of the unit interval") {
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  FeasibleWitness start = check_strict_feasibility(p, Vector::Constant(1, 0.5));
  CenterResult res = analytic_center(p, start, cfg);
  CHECK(std::fabs(res.x[0]) <= 1e-8);
  CHECK(res.decrements.back() <= Tolerances::center_tol);
}

TEST_CASE("centering from the center takes no step") {
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  CenterResult res = analytic_center(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  CHECK(res.steps == 0);
  CHECK(res.decrements.size() == 1);
}

TEST_CASE("centering decrement decreases monotonically on random instances") {
  IpmConfig cfg = default_config(1e-2);
  for (std::uint64_t seed : {41u, 42u, 43u}) {
    RandomInstance inst = random_instance(3, 11, seed);
    CenterResult res = analytic_center(inst.lp, inst.start, cfg);
    for (std::size_t i = 1; i < res.decrements.size(); ++i)
      CHECK(res.decrements[i] <= res.decrements[i - 1] * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("unit interval schedule closed forms") {
  LpInstance p = unit1(1e-2);
  IpmConfig cfg = default_config(1e-2);
  CenterResult center = analytic_center(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  IterationSchedule s = build_schedule(p, center.be, cfg);

  CHECK(s.t_init == doctest::Approx(std::sqrt(2.0) / 12.0).epsilon(1e-9));
  // guaranteed growth 1 + gamma/(beta + sqrt(nu)), nu = m = 2
  CHECK(s.ratio ==
        doctest::Approx(1.0 + (1.0 / 12.0) / (0.25 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(s.t_stop == doctest::Approx(100.0 * 17.0 / 12.0).epsilon(1e-12));
  CHECK(s.trip_count == 147);

  // minimality confirmed by iterating the progression directly
  int k = 1;
  double t = s.t_init;
  while (t < s.t_stop) {
    t *= s.ratio;
    ++k;
  }
  CHECK(s.trip_count == k);
  CHECK(schedule_lower(s, s.trip_count) >= s.t_stop);
  CHECK(schedule_lower(s, s.trip_count - 1) < s.t_stop);
}

TEST_CASE("halving epsilon grows the trip count by ~log(2)/log(ratio)") {
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  CenterResult center = analytic_center(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  IterationSchedule s1 = build_schedule(p, center.be, cfg);
  IpmConfig cfg2 = default_config(0.5e-2);
  IterationSchedule s2 = build_schedule(p, center.be, cfg2);
  CHECK(s2.t_stop == doctest::Approx(2.0 * s1.t_stop).epsilon(1e-12));
  const int expect = static_cast<int>(std::ceil(std::log(2.0) / std::log(s1.ratio)));
  CHECK(std::abs((s2.trip_count - s1.trip_count) - expect) <= 1);
}

TEST_CASE("first path-following step on the unit interval") {
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  CenterResult center = analytic_center(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  IterationSchedule sched = build_schedule(p, center.be, cfg);

  Iterate it{center.x, 0.0, 0};
  StepResult step = path_following_step(p, cfg, sched, it, center.be);
  CHECK(step.violations.empty());
  CHECK(step.it.t == doctest::Approx(0.117851).epsilon(1e-5));
  CHECK(step.it.x[0] == doctest::Approx(-0.058926).epsilon(1e-4));
  CHECK(step.it.k == 1);
  // from an exact center the intermediate acc value is gamma itself
  CHECK(step.record.acc_after_t == doctest::Approx(cfg.gamma).epsilon(1e-6));
}

TEST_CASE("solve the unit interval") {
  LpInstance p = unit1(1e-2);
  IpmConfig cfg = default_config(1e-2);
  FeasibleWitness start = check_strict_feasibility(p, Vector::Constant(1, 0.5));
  SolveCertificate cert = solve(p, start, cfg);

  CHECK(cert.status == SolveStatus::success);
  CHECK(cert.iterations == 147);
  CHECK(static_cast<int>(cert.monitor.size()) == cert.iterations);
  CHECK(cert.objective == doctest::Approx(-1.0).epsilon(1.1e-2));
  CHECK(cert.x_final[0] > -1.0);
  CHECK(cert.x_final[0] < -1.0 + 2.0 * 1e-2);
  CHECK(cert.gap_bound <= cfg.epsilon);
  CHECK(cert.t_final >= cert.schedule.t_stop);
  for (const MonitorRecord& r : cert.monitor) CHECK(r.pass);
}

TEST_CASE("degenerate cost short-circuits") {
  LpInstance p = unit1();
  p.c = Vector::Zero(1);
  IpmConfig cfg = default_config(1e-2);
  FeasibleWitness start = check_strict_feasibility(p, Vector::Constant(1, 0.25));
  SolveCertificate cert = solve(p, start, cfg);
  CHECK(cert.status == SolveStatus::degenerate_cost);
  CHECK(cert.iterations == 0);
  CHECK(cert.gap_bound == 0.0);
  CHECK(cert.x_final[0] == 0.25);
}

TEST_CASE("solve matches the oracle on a small random batch") {
  IpmConfig cfg = default_config(1e-2);
  for (std::uint64_t seed : {51u, 52u, 53u, 54u}) {
    RandomInstance inst = random_instance(3, 10, seed);
    SolveCertificate cert = solve(inst.lp, inst.start, cfg);
    OracleResult oracle = solve_by_vertex_enumeration(inst.lp);
    CHECK(std::fabs(cert.objective - oracle.optimum) <= cfg.epsilon + 1e-9);
    CHECK(cert.objective - oracle.optimum <= cert.gap_bound + 1e-9);
    CHECK(cert.iterations == cert.schedule.trip_count);
    for (const MonitorRecord& r : cert.monitor) {
      CHECK(r.pass);
      CHECK(r.t >= r.lower_k - Tolerances::progress_slack);
    }
    // geometric progress between consecutive records
    for (std::size_t i = 1; i < cert.monitor.size(); ++i)
      CHECK(cert.monitor[i].t >
            cert.monitor[i - 1].t * cert.schedule.ratio - Tolerances::progress_slack);
  }
}

TEST_CASE("warn mode records instead of throwing") {
  // An acc_slack of zero flips marginal checks into violations rarely; instead
  // force a violation by shrinking beta after the schedule is fixed. Warn mode
  // must still finish and record every iteration.
  RandomInstance inst = random_instance(2, 6, 77);
  IpmConfig cfg = default_config(1e-1);
  cfg.monitor = MonitorMode::warn;
  SolveCertificate cert = solve(inst.lp, inst.start, cfg);
  CHECK(cert.iterations == cert.schedule.trip_count);
}

TEST_CASE("certificate json round trip") {
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  SolveCertificate cert = solve(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  Json j = certificate_to_json(cert);
  CHECK(j.contains("x"));
  CHECK(j.contains("objective"));
  CHECK(j.contains("t_final"));
  CHECK(j.contains("gap_bound"));
  CHECK(j.contains("iterations"));
  CHECK(j.at("config").contains("beta"));
  CHECK(j.at("monitor").size() == cert.monitor.size());
  SolveCertificate back = certificate_from_json(j);
  CHECK(back.objective == cert.objective);
  CHECK(back.t_final == cert.t_final);
  CHECK(back.iterations == cert.iterations);
  CHECK(back.x_final == cert.x_final);
  CHECK(back.monitor.size() == cert.monitor.size());
  CHECK(back.status == SolveStatus::success);
}

TEST_CASE("monitor violations carry the partial certificate") {
  // corrupt the schedule so the lower-bound check must fail at once
  LpInstance p = unit1();
  IpmConfig cfg = default_config(1e-2);
  CenterResult center = analytic_center(p, check_strict_feasibility(p, Vector::Zero(1)), cfg);
  IterationSchedule sched = build_schedule(p, center.be, cfg);
  sched.t_init *= 10.0;  // unreachable progression
  Iterate it{center.x, 0.0, 0};
  StepResult step = path_following_step(p, cfg, sched, it, center.be);
  CHECK_FALSE(step.violations.empty());
  CHECK(step.violations.front().first == "loop.invariant.lower");
  CHECK_FALSE(step.record.pass);
}
