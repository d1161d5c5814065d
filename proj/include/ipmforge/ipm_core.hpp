#pragma once

#include <vector>

#include "ipmforge/barrier.hpp"
#include "ipmforge/lp_model.hpp"

namespace ipmforge {

enum class MonitorMode { error, warn };

struct IpmConfig {
  double beta = 0.25;
  double gamma = 1.0 / 12.0;
  double epsilon = 1e-2;
  double acc_slack = Tolerances::acc_slack;
  double feas_margin = Tolerances::feas_margin;
  MonitorMode monitor = MonitorMode::error;

  // 0 < beta < (3 - sqrt(5))/2 and 0 < gamma <= sqrt(beta)/(1+sqrt(beta)) - beta.
  void validate() const;
};

// beta = 1/4 with gamma at its admissible maximum 1/3 - 1/4 = 1/12.
IpmConfig default_config(double epsilon);

// Precomputed progression: t_1 = t_init, t_k >= t_init * ratio^(k-1), and the
// loop runs exactly trip_count iterations, enough to push t past t_stop.
struct IterationSchedule {
  double t_init = 0.0;
  double ratio = 0.0;
  double t_stop = 0.0;
  int trip_count = 0;
};

double schedule_lower(const IterationSchedule& s, int k);

// (1/t) * (m + (beta+1)*beta/(1-beta)), with m the barrier parameter of the
// m-row log barrier.
double gap_bound_at(double beta, int m, double t);

struct Iterate {
  Vector x;
  double t = 0.0;
  int k = 0;
};

struct MonitorRecord {
  int k = 0;
  double t = 0.0;
  double acc_after_t = 0.0;  // ||t' c + F'(x)||_x, must stay <= beta+gamma
  double acc_after_x = 0.0;  // ||t' c + F'(x')||_x', must stay <= beta
  double min_slack = 0.0;
  double lower_k = 0.0;
  bool pass = true;
};

enum class SolveStatus { success, degenerate_cost };

struct SolveCertificate {
  SolveStatus status = SolveStatus::success;
  Vector x_final;
  double objective = 0.0;
  double t_final = 0.0;
  double gap_bound = 0.0;
  int iterations = 0;
  std::vector<MonitorRecord> monitor;
  IpmConfig config;
  IterationSchedule schedule;  // in-memory only, not serialized
};

// Raised when a monitored invariant fails and the monitor mode is error.
// Carries the certificate built so far.
struct MonitorViolation : Error {
  MonitorViolation(std::string check_, double measured_, int k_)
      : Error("monitor violation [" + check_ + "] at iteration " + std::to_string(k_) +
              ", measured " + std::to_string(measured_)),
        check(std::move(check_)),
        measured(measured_),
        k(k_) {}
  std::string check;
  double measured;
  int k;
  SolveCertificate partial;
};

struct CenterResult {
  Vector x;
  BarrierEval be;
  std::vector<double> decrements;  // lambda at each visited point, last one at return
  int steps = 0;
};

// Damped Newton on F with step 1/(1+lambda). Returns once the decrement drops
// under Tolerances::center_tol; accepts center_safety*beta at the iteration
// cap; raises CenteringDivergence beyond that.
CenterResult analytic_center(const LpInstance& p, const FeasibleWitness& start,
                             const IpmConfig& cfg);

// Raises DegenerateCost when ||c||_x is numerically zero at the center.
IterationSchedule build_schedule(const LpInstance& p, const BarrierEval& at_center,
                                 const IpmConfig& cfg);

struct StepResult {
  Iterate it;
  BarrierEval be;
  MonitorRecord record;
  std::vector<std::pair<std::string, double>> violations;  // check tag, measured value
};

// One path-following iteration: dt = gamma/||c||_x, Newton step toward
// x*(t+dt), plus the four monitored checks.
StepResult path_following_step(const LpInstance& p, const IpmConfig& cfg,
                               const IterationSchedule& sched, const Iterate& it,
                               const BarrierEval& be);

// Analytic centering, schedule, then exactly trip_count steps.
SolveCertificate solve(const LpInstance& p, const FeasibleWitness& start, const IpmConfig& cfg);

Json certificate_to_json(const SolveCertificate& cert);
SolveCertificate certificate_from_json(const Json& j);

}  // namespace ipmforge
