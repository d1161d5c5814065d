#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "ipmforge/codegen.hpp"
#include "ipmforge/ipm_core.hpp"
#include "ipmforge/mpc_encoder.hpp"
#include "ipmforge/oracle.hpp"

namespace {

using namespace ipmforge;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitGuard = 3;

bool log_enabled() {
  const char* v = std::getenv("IPMFORGE_LOG");
  return v && std::string(v) != "" && std::string(v) != "quiet";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[ipmforge] " << msg << "\n";
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Vector parse_x0_flag(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (...) {
      throw SchemaError("--x0: \"" + item + "\" is not a number");
    }
  }
  if (vals.empty()) throw SchemaError("--x0: empty list");
  Vector v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
  return v;
}

struct CommonOpts {
  double epsilon = -1.0;  // <0: keep instance value
  double beta = -1.0;
  double gamma = -1.0;
  std::string monitor = "error";
};

IpmConfig make_config(const CommonOpts& o, double instance_epsilon) {
  IpmConfig cfg = default_config(o.epsilon > 0 ? o.epsilon : instance_epsilon);
  if (o.beta > 0) cfg.beta = o.beta;
  if (o.gamma > 0) cfg.gamma = o.gamma;
  cfg.monitor = o.monitor == "warn" ? MonitorMode::warn : MonitorMode::error;
  cfg.validate();
  return cfg;
}

void print_violation(const MonitorViolation& mv) {
  std::cerr << "monitor violation: check=" << mv.check << " iteration=" << mv.k
            << " measured=" << mv.measured << "\n";
}

int cmd_encode(const std::string& input, const std::string& out, std::string layout_path) {
  MpcFile f = mpc_from_json(read_json_file(input));
  EncodeResult enc = encode(f.spec, f.epsilon, f.relax_margin);
  std::optional<Vector> x0;
  if (enc.start) x0 = enc.start->x;
  write_json_file(out, lp_to_json(enc.lp, x0));
  if (layout_path.empty()) {
    layout_path = out;
    const auto pos = layout_path.rfind(".json");
    layout_path = (pos == std::string::npos ? layout_path : layout_path.substr(0, pos)) +
                  ".layout.json";
  }
  write_json_file(layout_path, layout_to_json(enc.layout));
  log_line("encoded " + input + " -> " + out + " (n=" + std::to_string(enc.lp.cols()) +
           ", m=" + std::to_string(enc.lp.rows()) +
           (enc.start ? ", strictly feasible start included" : ", no interior start found") + ")");
  return kExitOk;
}

FeasibleWitness resolve_start(const LpFile& f, const std::string& x0_flag) {
  Vector x0;
  if (!x0_flag.empty())
    x0 = parse_x0_flag(x0_flag);
  else if (f.x0)
    x0 = *f.x0;
  else
    throw InvalidArgument("no starting point: pass --x0 or include \"x0\" in the instance");
  return check_strict_feasibility(f.lp, x0);
}

int cmd_solve(const std::string& input, const std::string& out, const std::string& x0_flag,
              const CommonOpts& opts) {
  LpFile f = lp_from_json(read_json_file(input));
  IpmConfig cfg = make_config(opts, f.lp.epsilon);
  FeasibleWitness start = resolve_start(f, x0_flag);
  SolveCertificate cert;
  try {
    cert = solve(f.lp, start, cfg);
  } catch (const MonitorViolation& mv) {
    print_violation(mv);
    if (!out.empty()) write_json_file(out, certificate_to_json(mv.partial));
    return kExitVerification;
  }
  if (!out.empty()) write_json_file(out, certificate_to_json(cert));
  std::cout << "objective " << cert.objective << ", gap bound " << cert.gap_bound << ", "
            << cert.iterations << " iterations\n";
  bool clean = cert.gap_bound <= cfg.epsilon;
  for (const MonitorRecord& r : cert.monitor) clean = clean && r.pass;
  if (cert.status == SolveStatus::degenerate_cost) clean = true;
  if (!clean && cfg.monitor == MonitorMode::error) return kExitVerification;
  return kExitOk;
}

int cmd_gen(const std::string& input, const std::string& out_dir, const std::string& x0_flag,
            const CommonOpts& opts) {
  LpFile f = lp_from_json(read_json_file(input));
  IpmConfig cfg = make_config(opts, f.lp.epsilon);
  FeasibleWitness start = resolve_start(f, x0_flag);
  CenterResult center = analytic_center(f.lp, start, cfg);
  IterationSchedule sched = build_schedule(f.lp, center.be, cfg);
  codegen::SpecializeResult spec = codegen::specialize(f.lp, cfg, sched, center.x);
  // checked interpretation gates the output files
  SolveCertificate cert = codegen::interpret(spec.kernel, codegen::InterpretMode::checked);
  for (const MonitorRecord& r : cert.monitor)
    if (!r.pass) throw ContractViolation("monitor", r.k, r.acc_after_x);
  fs::create_directories(out_dir);
  write_json_file((fs::path(out_dir) / "kernel.json").string(),
                  codegen::kernel_to_json(spec.kernel));
  write_text_file((fs::path(out_dir) / "solver.c").string(),
                  codegen::render_c(spec.kernel, spec.sidecar));
  write_text_file((fs::path(out_dir) / "sidecar.json").string(),
                  codegen::render_sidecar_json(spec.sidecar));
  std::cout << "wrote kernel.json, solver.c, sidecar.json to " << out_dir << " (trip count "
            << sched.trip_count << ", interpreter objective " << cert.objective << ")\n";
  return kExitOk;
}

int cmd_check(const std::string& lp_path, const std::string& cert_path) {
  LpFile f = lp_from_json(read_json_file(lp_path));
  SolveCertificate cert = certificate_from_json(read_json_file(cert_path));
  OracleResult oracle = solve_by_vertex_enumeration(f.lp);
  const double eps = cert.config.epsilon;
  bool ok = true;

  const double gap = cert.objective - oracle.optimum;
  std::cout << "oracle optimum " << oracle.optimum << ", certificate objective "
            << cert.objective << ", gap " << gap << "\n";
  if (!(std::fabs(gap) <= eps + Tolerances::acc_slack)) {
    std::cout << "FAIL: |objective - optimum| exceeds epsilon + 1e-9\n";
    ok = false;
  }
  if (cert.status == SolveStatus::success) {
    const double bound = gap_bound_at(cert.config.beta, cert.t_final);
    if (!(std::fabs(bound - cert.gap_bound) <= 1e-12 * std::max(1.0, std::fabs(bound)))) {
      std::cout << "FAIL: stored gap_bound " << cert.gap_bound
                << " does not match the bound recomputed at t_final (" << bound << ")\n";
      ok = false;
    }
    if (!(gap <= bound + Tolerances::acc_slack)) {
      std::cout << "FAIL: measured gap " << gap << " violates the proved bound " << bound << "\n";
      ok = false;
    }
    if (!(bound <= eps + Tolerances::acc_slack)) {
      std::cout << "FAIL: bound " << bound << " exceeds epsilon " << eps << "\n";
      ok = false;
    }
  }
  for (const MonitorRecord& r : cert.monitor)
    if (!r.pass) {
      std::cout << "FAIL: monitor record " << r.k << " did not pass\n";
      ok = false;
      break;
    }
  std::cout << (ok ? "check passed\n" : "check failed\n");
  return ok ? kExitOk : kExitVerification;
}

struct BenchRow {
  int n, m;
  std::uint64_t seed;
  int trip_count = 0;
  double t_final = 0.0, gap_bound = 0.0, oracle_gap = 0.0;
  bool monitor_pass = false;
  double wall_ms = 0.0;
};

int cmd_bench(const std::string& n_range, const std::string& m_range, int count,
              std::uint64_t seed_base, int jobs, const std::string& out,
              const CommonOpts& opts) {
  auto parse_range = [](const std::string& s, const char* what) {
    const auto pos = s.find(':');
    if (pos == std::string::npos)
      throw SchemaError(std::string(what) + ": expected LO:HI, got \"" + s + "\"");
    return std::pair<int, int>{std::stoi(s.substr(0, pos)), std::stoi(s.substr(pos + 1))};
  };
  const auto [n_lo, n_hi] = parse_range(n_range, "--n-range");           // inclusive
  const auto [mf_lo, mf_hi] = parse_range(m_range, "--m-range");         // factors of n, [lo, hi)
  if (n_lo < 1 || n_hi < n_lo) throw SchemaError("--n-range: bad bounds");
  if (mf_lo < 3 || mf_hi <= mf_lo) throw SchemaError("--m-range: factors must satisfy 3 <= lo < hi");

  std::vector<BenchRow> rows;
  for (int n = n_lo; n <= n_hi; ++n)
    for (int m = mf_lo * n; m < mf_hi * n; ++m)
      for (int i = 0; i < count; ++i)
        rows.push_back(BenchRow{n, m, seed_base + 10000u * static_cast<unsigned>(n) +
                                          100u * static_cast<unsigned>(m) +
                                          static_cast<unsigned>(i)});

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= rows.size()) return;
      BenchRow& row = rows[idx];
      const auto start_time = std::chrono::steady_clock::now();
      try {
        RandomInstance inst = random_instance(row.n, row.m, row.seed);
        IpmConfig cfg = make_config(opts, inst.lp.epsilon);
        cfg.monitor = MonitorMode::warn;  // record, do not abort: failures land in the row
        SolveCertificate cert = solve(inst.lp, inst.start, cfg);
        OracleResult oracle = solve_by_vertex_enumeration(inst.lp);
        row.trip_count = cert.iterations;
        row.t_final = cert.t_final;
        row.gap_bound = cert.gap_bound;
        row.oracle_gap = cert.objective - oracle.optimum;
        row.monitor_pass = true;
        for (const MonitorRecord& r : cert.monitor) row.monitor_pass &= r.pass;
      } catch (const std::exception& e) {
        log_line("bench (" + std::to_string(row.n) + "," + std::to_string(row.m) + "," +
                 std::to_string(row.seed) + "): " + e.what());
        row.monitor_pass = false;
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start_time)
                        .count();
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::max(1, jobs);
  for (int i = 0; i < workers - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // rows were generated in (n, m, seed) order and never reordered, so the
  // output bytes are independent of the worker count
  std::ostringstream csv;
  csv << "n,m,seed,trip_count,t_final,gap_bound,oracle_gap,monitor_pass,wall_ms\n";
  csv.precision(17);
  for (const BenchRow& r : rows)
    csv << r.n << ',' << r.m << ',' << r.seed << ',' << r.trip_count << ',' << r.t_final << ','
        << r.gap_bound << ',' << r.oracle_gap << ',' << (r.monitor_pass ? "true" : "false")
        << ',' << r.wall_ms << '\n';
  if (out.empty())
    std::cout << csv.str();
  else
    write_text_file(out, csv.str());
  std::size_t passed = 0;
  for (const BenchRow& r : rows) passed += r.monitor_pass ? 1 : 0;
  std::cerr << passed << "/" << rows.size() << " instances clean\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ipmforge: short-step primal interior-point LP solver with runtime "
               "invariant monitoring and instance-specialized kernel generation"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string input, output, x0_flag, layout_path, cert_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--epsilon", opts.epsilon, "target optimality gap (overrides the instance)");
    sub->add_option("--beta", opts.beta, "centering radius");
    sub->add_option("--gamma", opts.gamma, "step aggressiveness");
    sub->add_option("--monitor", opts.monitor, "error|warn")
        ->check(CLI::IsMember({"error", "warn"}));
  };

  CLI::App* enc = app.add_subcommand("encode", "MPC JSON -> canonical LP JSON + layout JSON");
  enc->add_option("input", input, "MPC problem JSON")->required();
  enc->add_option("--out", output, "LP output path")->required();
  enc->add_option("--layout", layout_path, "layout output path (default: <out>.layout.json)");

  CLI::App* sol = app.add_subcommand("solve", "solve an LP JSON and write a certificate");
  sol->add_option("input", input, "LP JSON")->required();
  sol->add_option("--out", output, "certificate output path");
  sol->add_option("--x0", x0_flag, "strictly feasible start, comma-separated");
  add_common(sol);

  CLI::App* gen = app.add_subcommand(
      "gen", "generate kernel.json, solver.c, sidecar.json from an LP JSON");
  gen->add_option("input", input, "LP JSON")->required();
  gen->add_option("--out", output, "output directory")->required();
  gen->add_option("--x0", x0_flag, "strictly feasible start, comma-separated");
  add_common(gen);

  CLI::App* chk = app.add_subcommand("check", "verify a certificate against the oracle");
  chk->add_option("input", input, "LP JSON")->required();
  chk->add_option("certificate", cert_path, "certificate JSON")->required();

  CLI::App* ben = app.add_subcommand("bench", "random-instance benchmark, CSV output");
  std::string n_range = "2:4", m_range = "3:5";
  int count = 100, jobs = 1;
  std::uint64_t seed = 0;
  ben->add_option("--n-range", n_range, "inclusive n range LO:HI (default 2:4)");
  ben->add_option("--m-range", m_range, "m as factors of n, [LO*n, HI*n) (default 3:5)");
  ben->add_option("--count", count, "instances per (n, m) pair (default 100)");
  ben->add_option("--seed", seed, "seed base");
  ben->add_option("--jobs", jobs, "parallel workers");
  ben->add_option("--out", output, "CSV path (default: stdout)");
  add_common(ben);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (enc->parsed()) return cmd_encode(input, output, layout_path);
    if (sol->parsed()) return cmd_solve(input, output, x0_flag, opts);
    if (gen->parsed()) return cmd_gen(input, output, x0_flag, opts);
    if (chk->parsed()) return cmd_check(input, cert_path);
    if (ben->parsed()) return cmd_bench(n_range, m_range, count, seed, jobs, output, opts);
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const MonitorViolation& e) {
    print_violation(e);
    return kExitVerification;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
