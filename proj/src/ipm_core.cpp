#include "ipmforge/ipm_core.hpp"

#include <cmath>
#include <limits>

namespace ipmforge {

void IpmConfig::validate() const {
  const double beta_max = (3.0 - std::sqrt(5.0)) / 2.0;
  if (!(beta > 0.0 && beta < beta_max))
    throw InvalidArgument("IpmConfig: beta must lie in (0, " + std::to_string(beta_max) + ")");
  const double gamma_max = std::sqrt(beta) / (1.0 + std::sqrt(beta)) - beta;
  if (!(gamma > 0.0 && gamma <= gamma_max))
    throw InvalidArgument("IpmConfig: gamma must lie in (0, " + std::to_string(gamma_max) + "]");
  if (!(epsilon > 0.0)) throw InvalidArgument("IpmConfig: epsilon must be > 0");
  if (!(acc_slack >= 0.0) || !(feas_margin >= 0.0))
    throw InvalidArgument("IpmConfig: tolerances must be >= 0");
}

IpmConfig default_config(double epsilon) {
  IpmConfig cfg;
  cfg.beta = 0.25;
  cfg.gamma = std::sqrt(0.25) / (1.0 + std::sqrt(0.25)) - 0.25;
  cfg.epsilon = epsilon;
  cfg.validate();
  return cfg;
}

double schedule_lower(const IterationSchedule& s, int k) {
  return s.t_init * std::pow(s.ratio, k - 1);
}

double gap_bound_at(double beta, double t) {
  return (1.0 / t) * (1.0 + (beta + 1.0) * beta / (1.0 - beta));
}

CenterResult analytic_center(const LpInstance& p, const FeasibleWitness& start,
                             const IpmConfig& cfg) {
  check_strict_feasibility(p, start.x, cfg.feas_margin);
  CenterResult res;
  res.x = start.x;
  res.be = eval_barrier(p, res.x, cfg.feas_margin);
  for (int iter = 0; iter <= Tolerances::max_center_iters; ++iter) {
    const double lambda = local_norm(res.be, res.be.grad);
    res.decrements.push_back(lambda);
    if (lambda <= Tolerances::center_tol) return res;
    if (iter == Tolerances::max_center_iters) break;
    const Vector dir = chol_solve(res.be.hess_factor, res.be.grad);
    res.x -= (1.0 / (1.0 + lambda)) * dir;
    res.be = eval_barrier(p, res.x, cfg.feas_margin);
    ++res.steps;
  }
  if (res.decrements.back() <= Tolerances::center_safety * cfg.beta) return res;
  throw CenteringDivergence("analytic_center: decrement " +
                            std::to_string(res.decrements.back()) + " after " +
                            std::to_string(Tolerances::max_center_iters) + " iterations");
}

IterationSchedule build_schedule(const LpInstance& p, const BarrierEval& at_center,
                                 const IpmConfig& cfg) {
  const double norm_c = local_norm(at_center, p.c);
  if (norm_c <= Tolerances::degenerate_cost_norm)
    throw DegenerateCost("build_schedule: ||c||_x = " + std::to_string(norm_c));
  IterationSchedule s;
  s.t_init = cfg.gamma / norm_c;
  // guaranteed per-step growth: t ||c||_x <= beta + ||F'(x)||_x <= beta + sqrt(nu)
  // with nu = m, the parameter of the m-row log barrier
  s.ratio = 1.0 + cfg.gamma / (cfg.beta + std::sqrt(static_cast<double>(p.rows())));
  s.t_stop = (1.0 / cfg.epsilon) * (1.0 + (cfg.beta + 1.0) * cfg.beta / (1.0 - cfg.beta));
  double k_guess = std::ceil(1.0 + std::log(s.t_stop / s.t_init) / std::log(s.ratio));
  if (!std::isfinite(k_guess) || k_guess < 1.0) k_guess = 1.0;
  if (k_guess > 1e9) throw Error("build_schedule: trip count out of range");
  int k = static_cast<int>(k_guess);
  s.trip_count = k;
  while (k > 1 && schedule_lower(s, k - 1) >= s.t_stop) s.trip_count = --k;
  while (schedule_lower(s, k) < s.t_stop) s.trip_count = ++k;
  return s;
}

namespace {

// Fills the summary fields of a certificate from the last safe iterate, used
// when a monitor violation aborts the run.
void finalize_partial(SolveCertificate& cert, const Iterate& it, const LpInstance& p) {
  cert.x_final = it.x;
  cert.objective = it.x.size() == p.c.size() ? dot(p.c, it.x) : 0.0;
  cert.t_final = it.t;
  cert.gap_bound = it.t > 0.0 ? gap_bound_at(cert.config.beta, it.t)
                              : std::numeric_limits<double>::infinity();
  cert.iterations = it.k;
}

}  // namespace

StepResult path_following_step(const LpInstance& p, const IpmConfig& cfg,
                               const IterationSchedule& sched, const Iterate& it,
                               const BarrierEval& be) {
  const int n = p.cols();
  StepResult out;

  const double norm_c = local_norm(be, p.c);
  if (!(norm_c > 0.0) || !std::isfinite(norm_c))
    throw Error("path_following_step: degenerate ||c||_x");
  const double dt = cfg.gamma / norm_c;
  const double t_next = it.t + dt;

  // Newton system for x*(t+dt): shares the solve with the intermediate check.
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = p.c[i] * t_next + be.grad[i];
  const Vector z = chol_solve(be.hess_factor, v);
  const double acc_after_t =
      std::sqrt(std::max(kernels::dot_fold(v.data(), z.data(), n), 0.0));
  if (acc_after_t > cfg.beta + cfg.gamma + cfg.acc_slack)
    out.violations.emplace_back("update_t.ensures.acc", acc_after_t);
  if (it.t > 0.0 && !(t_next > it.t * sched.ratio - Tolerances::progress_slack))
    out.violations.emplace_back("update_t.ensures.progress", t_next);

  Vector x_next(n);
  for (int i = 0; i < n; ++i) x_next[i] = it.x[i] + (-z[i]);

  const int k_next = it.k + 1;
  double min_slack = std::numeric_limits<double>::infinity();
  {
    Vector slack(p.rows());
    for (int i = 0; i < p.rows(); ++i) {
      const double ax = kernels::dot_fold(p.a.data() + static_cast<std::ptrdiff_t>(i) * n,
                                          x_next.data(), n);
      slack[i] = p.b[i] - ax;
      min_slack = std::min(min_slack, slack[i]);
    }
  }
  if (!(min_slack > cfg.feas_margin)) {
    // cannot continue: the barrier is undefined here, so this is fatal in
    // every monitor mode
    MonitorViolation mv("loop.invariant.feasible", min_slack, k_next);
    throw mv;
  }

  out.be = eval_barrier(p, x_next, cfg.feas_margin);
  const AccResult acc_x = acc(p, out.be, t_next, cfg.beta, cfg.acc_slack);
  if (!acc_x.holds) out.violations.emplace_back("loop.invariant.acc", acc_x.lhs);

  const double lower_k = schedule_lower(sched, k_next);
  if (!(t_next >= lower_k - Tolerances::progress_slack))
    out.violations.emplace_back("loop.invariant.lower", t_next);

  out.it = Iterate{std::move(x_next), t_next, k_next};
  out.record = MonitorRecord{k_next, t_next,      acc_after_t, acc_x.lhs,
                             min_slack, lower_k, out.violations.empty()};
  return out;
}

SolveCertificate solve(const LpInstance& p, const FeasibleWitness& start, const IpmConfig& cfg) {
  p.validate();
  cfg.validate();
  SolveCertificate cert;
  cert.config = cfg;

  CenterResult center = analytic_center(p, start, cfg);

  IterationSchedule sched;
  try {
    sched = build_schedule(p, center.be, cfg);
  } catch (const DegenerateCost&) {
    // c is numerically zero: any feasible point is optimal, report the start
    cert.status = SolveStatus::degenerate_cost;
    cert.x_final = start.x;
    cert.objective = dot(p.c, start.x);
    cert.t_final = 0.0;
    cert.gap_bound = 0.0;
    cert.iterations = 0;
    return cert;
  }
  cert.schedule = sched;

  // entry conditions of the path-following loop
  const AccResult acc0 = acc(p, center.be, 0.0, cfg.beta, cfg.acc_slack);
  if (!acc0.holds) {
    MonitorViolation mv("pathfollowing.requires.acc0", acc0.lhs, 0);
    mv.partial = cert;
    throw mv;
  }

  Iterate it{center.x, 0.0, 0};
  BarrierEval be = std::move(center.be);
  cert.monitor.reserve(static_cast<std::size_t>(sched.trip_count));

  for (int k = 0; k < sched.trip_count; ++k) {
    StepResult step;
    try {
      step = path_following_step(p, cfg, sched, it, be);
    } catch (MonitorViolation& mv) {
      finalize_partial(cert, it, p);
      mv.partial = cert;
      throw;
    }
    cert.monitor.push_back(step.record);
    if (!step.violations.empty() && cfg.monitor == MonitorMode::error) {
      MonitorViolation mv(step.violations.front().first, step.violations.front().second,
                          step.record.k);
      finalize_partial(cert, step.it, p);
      mv.partial = cert;
      throw mv;
    }
    it = std::move(step.it);
    be = std::move(step.be);
  }

  cert.x_final = it.x;
  cert.objective = dot(p.c, it.x);
  cert.t_final = it.t;
  cert.gap_bound = gap_bound_at(cfg.beta, it.t);
  cert.iterations = it.k;

  if (!(it.t >= sched.t_stop * (1.0 - Tolerances::tstop_rel_slack))) {
    MonitorViolation mv("pathfollowing.ensures.t_stop", it.t, it.k);
    mv.partial = cert;
    if (cfg.monitor == MonitorMode::error) throw mv;
  }
  return cert;
}

Json certificate_to_json(const SolveCertificate& cert) {
  Json j;
  j["x"] = std::vector<double>(cert.x_final.data(), cert.x_final.data() + cert.x_final.size());
  j["objective"] = cert.objective;
  j["t_final"] = cert.t_final;
  j["gap_bound"] = cert.gap_bound;
  j["iterations"] = cert.iterations;
  j["config"] = Json{{"beta", cert.config.beta},
                     {"gamma", cert.config.gamma},
                     {"epsilon", cert.config.epsilon}};
  Json records = Json::array();
  for (const MonitorRecord& r : cert.monitor) {
    records.push_back(Json{{"k", r.k},
                           {"t", r.t},
                           {"acc_after_t", r.acc_after_t},
                           {"acc_after_x", r.acc_after_x},
                           {"min_slack", r.min_slack},
                           {"lower_k", r.lower_k},
                           {"pass", r.pass}});
  }
  j["monitor"] = std::move(records);
  return j;
}

SolveCertificate certificate_from_json(const Json& j) {
  SolveCertificate cert;
  try {
    const auto& xs = j.at("x");
    cert.x_final = Vector(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) cert.x_final[static_cast<int>(i)] = xs[i].get<double>();
    cert.objective = j.at("objective").get<double>();
    cert.t_final = j.at("t_final").get<double>();
    cert.gap_bound = j.at("gap_bound").get<double>();
    cert.iterations = j.at("iterations").get<int>();
    cert.config.beta = j.at("config").at("beta").get<double>();
    cert.config.gamma = j.at("config").at("gamma").get<double>();
    cert.config.epsilon = j.at("config").at("epsilon").get<double>();
    if (j.contains("monitor")) {
      for (const auto& r : j.at("monitor")) {
        MonitorRecord rec;
        rec.k = r.at("k").get<int>();
        rec.t = r.at("t").get<double>();
        rec.acc_after_t = r.at("acc_after_t").get<double>();
        rec.acc_after_x = r.at("acc_after_x").get<double>();
        rec.min_slack = r.at("min_slack").get<double>();
        rec.lower_k = r.at("lower_k").get<double>();
        rec.pass = r.at("pass").get<bool>();
        cert.monitor.push_back(rec);
      }
    }
    cert.status = (cert.iterations == 0 && cert.t_final == 0.0) ? SolveStatus::degenerate_cost
                                                                : SolveStatus::success;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("certificate json: ") + e.what());
  }
  return cert;
}

}  // namespace ipmforge
