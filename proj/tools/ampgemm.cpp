// Command-line front end: bench, tune, validate, plan.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ampgemm/bench.hpp"
#include "ampgemm/energy.hpp"
#include "ampgemm/profile.hpp"
#include "ampgemm/scheduler.hpp"
#include "ampgemm/tuner.hpp"
#include "ampgemm/types.hpp"

#ifndef AMPGEMM_CONFIG_DIR
#define AMPGEMM_CONFIG_DIR "configs"
#endif

using namespace ampgemm;

namespace {

struct CommonArgs {
  std::string fast_config = AMPGEMM_CONFIG_DIR "/exynos5422-a15.cfg";
  std::string slow_config = AMPGEMM_CONFIG_DIR "/exynos5422-a7.cfg";
  std::optional<std::size_t> threads_fast;
  std::optional<std::size_t> threads_slow;
  std::optional<double> slowdown;
  std::string policy = "sss";
  double ratio = 1.0;
  std::string coarse = "1";
  std::string fine = "4";
  std::string degrees;
  unsigned seed = 1;
};

void add_cluster_options(CLI::App* app, CommonArgs& a) {
  app->add_option("--fast-config", a.fast_config, "Fast-cluster profile")->envname("AMPGEMM_FAST_CONFIG");
  app->add_option("--slow-config", a.slow_config, "Slow-cluster profile")->envname("AMPGEMM_SLOW_CONFIG");
  app->add_option("--threads-fast", a.threads_fast, "Fast-cluster threads (overrides core_count)")
      ->envname("AMPGEMM_THREADS_FAST");
  app->add_option("--threads-slow", a.threads_slow, "Slow-cluster threads; 0 drops the slow cluster")
      ->envname("AMPGEMM_THREADS_SLOW");
  app->add_option("--emulate-slowdown", a.slowdown, "Emulated slowdown of the slow cluster");
}

void add_policy_options(CLI::App* app, CommonArgs& a, bool with_defaults = true) {
  auto* p = app->add_option("--policy", a.policy, "single, sss, sas, ca-sas, das or ca-das")->envname("AMPGEMM_POLICY");
  auto* r = app->add_option("--ratio", a.ratio, "Fast:slow workload ratio")->envname("AMPGEMM_RATIO");
  auto* c = app->add_option("--coarse", a.coarse, "Coarse loop: 1, 3 or none")->envname("AMPGEMM_COARSE");
  auto* f = app->add_option("--fine", a.fine, "Fine loops: 4, 5 or 45")->envname("AMPGEMM_FINE");
  if (with_defaults) {
    p->capture_default_str();
    r->capture_default_str();
    c->capture_default_str();
    f->capture_default_str();
  }
  app->add_option("--degrees", a.degrees, "Explicit loop degrees d1,d2,d3,d4,d5");
}

std::optional<LoopId> parse_coarse(const std::string& s) {
  if (s == "none" || s == "0" || s.empty()) return std::nullopt;
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw ConfigError("BAD_COARSE_LOOP: --coarse must be 1, 3 or none, got '" + s + "'");
  }
}

std::array<std::size_t, 5> parse_degrees(const std::string& s) {
  std::array<std::size_t, 5> d{};
  std::size_t i = 0;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    const std::string tok = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (i == 5) throw ConfigError("--degrees takes exactly five values");
    try {
      std::size_t used = 0;
      d[i++] = std::stoul(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("--degrees: bad value '" + tok + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (i != 5) throw ConfigError("--degrees takes exactly five values");
  return d;
}

RunConfig make_run_config(const CommonArgs& a) {
  RunConfig cfg;
  cfg.policy = parse_policy(a.policy);
  cfg.ratio = a.ratio;
  cfg.coarse = parse_coarse(a.coarse);
  cfg.fine = parse_fine_loops(a.fine);
  cfg.fast = load_cluster(a.fast_config);
  if (a.threads_fast) cfg.fast.core_count = *a.threads_fast;
  if (!(a.threads_slow && *a.threads_slow == 0)) {
    ClusterSpec slow = load_cluster(a.slow_config);
    if (a.threads_slow) slow.core_count = *a.threads_slow;
    if (a.slowdown) slow.emulated_slowdown = *a.slowdown;
    cfg.slow = slow;
  }
  if (!a.degrees.empty()) cfg.degrees = parse_degrees(a.degrees);
  return cfg;
}

std::vector<ProblemSize> sizes_from(const std::string& sizes, const std::string& range) {
  if (!sizes.empty() && !range.empty()) throw std::invalid_argument("use either --sizes or --size-range");
  if (!range.empty()) return parse_size_range(range);
  return parse_sizes(sizes);
}

int run_bench_cmd(const CommonArgs& a, const std::string& sizes, const std::string& range, std::size_t reps,
                  const std::string& csv, const std::string& trace, std::optional<double> power_const,
                  std::optional<double> mock_clock) {
  const RunConfig cfg = make_run_config(a);
  const auto problem = sizes_from(sizes, range);

  std::unique_ptr<PowerSampler> sampler;
  if (!trace.empty() && power_const) throw std::invalid_argument("use either --power-trace or --power-const");
  if (!trace.empty())
    sampler = std::make_unique<ReplayPowerSampler>(load_power_trace(trace));
  else if (power_const)
    sampler = std::make_unique<ConstantPowerSampler>(*power_const);
  else
    sampler = std::make_unique<NullSampler>();

  BenchOptions opts;
  opts.repetitions = reps;
  opts.seed = a.seed;
  opts.synthetic_gflops = mock_clock;
  const auto records = run_bench(problem, cfg, opts, *sampler);

  if (csv.empty() || csv == "-") {
    write_csv(std::cout, records);
  } else {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write '" + csv + "'");
    write_csv(out, records);
  }
  return 0;
}

int run_validate_cmd(const CommonArgs& a, const CLI::App& sub, const std::string& sizes, const std::string& range) {
  const RunConfig base = make_run_config(a);
  const auto problem = sizes_from(sizes.empty() && range.empty() ? "7,64,129" : sizes, range);

  const bool two = base.slow.has_value();
  std::vector<Combination> combos;
  const bool pick_policy = sub.count("--policy") > 0 || std::getenv("AMPGEMM_POLICY");
  const bool pick_coarse = sub.count("--coarse") > 0 || std::getenv("AMPGEMM_COARSE");
  const bool pick_fine = sub.count("--fine") > 0 || std::getenv("AMPGEMM_FINE");
  if (!pick_policy && !pick_coarse && !pick_fine) {
    combos = default_combinations(base.ratio, two);
  } else {
    std::vector<Policy> policies;
    if (pick_policy)
      policies = {base.policy};
    else if (two)
      policies = {Policy::Sss, Policy::Sas, Policy::CaSas, Policy::Das, Policy::CaDas};
    else
      policies = {Policy::SingleCluster};
    std::vector<FineLoops> fines;
    if (pick_fine)
      fines = {base.fine};
    else
      fines = {{true, false}, {false, true}, {true, true}};
    for (Policy p : policies) {
      std::vector<std::optional<LoopId>> coarses;
      if (pick_coarse)
        coarses = {base.coarse};
      else if (p == Policy::SingleCluster)
        coarses = {std::nullopt};
      else if (is_dynamic(p))
        coarses = {3};
      else
        coarses = {1, 3};
      const double r = (p == Policy::Sas || p == Policy::CaSas) ? base.ratio : 1.0;
      for (const auto& c : coarses)
        for (const auto& f : fines) combos.push_back({p, r, c, f});
    }
  }

  const auto rows = validate_combinations(base, combos, problem, a.seed);
  bool all_ok = true;
  for (const auto& r : rows) {
    char head[160];
    std::snprintf(head, sizeof head, "%-34s %5zux%zux%zu", to_string(r.combo).c_str(), r.size.m, r.size.n,
                  r.size.k);
    if (!r.error.empty()) {
      std::cout << head << "  REJECTED  " << r.error << '\n';
    } else {
      char tail[96];
      std::snprintf(tail, sizeof tail, "  max_rel_err %.3e  tol %.3e  %s", r.max_rel_error, r.tolerance,
                    r.ok ? "ok" : "FAIL");
      std::cout << head << tail << '\n';
    }
    all_ok = all_ok && r.ok;
  }
  std::cout << (all_ok ? "all comparisons within tolerance\n" : "validation FAILED\n");
  return all_ok ? 0 : 1;
}

int run_plan_cmd(const CommonArgs& a, std::optional<std::size_t> size, std::size_t m, std::size_t n,
                 std::size_t k) {
  const RunConfig cfg = make_run_config(a);
  if (size) m = n = k = *size;
  const WorkPlan plan = make_plan(make_plan_request(cfg, m, n, k));
  std::cout << describe_plan(plan);
  return 0;
}

std::vector<std::size_t> parse_grid(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& p : parse_size_range(s)) out.push_back(p.m);
  return out;
}

int run_tune_cmd(const std::string& profile, const std::string& out_path, const std::string& log_path,
                 std::size_t size, std::size_t reps, std::size_t radius, const std::string& mc_grid,
                 const std::string& kc_grid, std::optional<std::size_t> step_m, std::optional<std::size_t> step_k,
                 std::optional<std::size_t> threads, unsigned seed) {
  ClusterSpec cluster = load_cluster(profile);
  if (threads) cluster.core_count = *threads;

  SearchSpec spec = SearchSpec::defaults();
  spec.problem_size = size;
  spec.repetitions = reps;
  spec.radius = radius;
  if (!mc_grid.empty()) spec.mc_grid = parse_grid(mc_grid);
  if (!kc_grid.empty()) spec.kc_grid = parse_grid(kc_grid);
  if (step_m) spec.refine_step_m = *step_m;
  if (step_k) spec.refine_step_k = *step_k;

  const TuneResult res = tune(spec, timed_evaluator(engine_timer(cluster, size, seed), size, cluster, 1), cluster);
  std::cout << "best m_c=" << res.best.first << " k_c=" << res.best.second << "  " << res.best_score
            << " GFLOPS (coarse best m_c=" << res.coarse_best.first << " k_c=" << res.coarse_best.second << ")\n";

  if (!log_path.empty()) {
    std::ofstream log(log_path);
    if (!log) throw std::runtime_error("cannot write '" + log_path + "'");
    write_tune_log(log, res);
  }
  if (!out_path.empty()) {
    ClusterSpec tuned = cluster;
    tuned.cache.m_c = res.best.first;
    tuned.cache.k_c = res.best.second;
    save_profile(out_path, Topology{{tuned}},
                 "tuned at r=" + std::to_string(size) + ", " + std::to_string(res.best_score) + " GFLOPS");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blocked GEMM for asymmetric multicores"};
  app.require_subcommand(1);

  CommonArgs bench_args, validate_args, plan_args;

  auto* bench = app.add_subcommand("bench", "Size sweep with timing, GFLOPS and energy");
  std::string b_sizes, b_range, b_csv, b_trace;
  std::size_t b_reps = 3;
  std::optional<double> b_const, b_mock;
  add_cluster_options(bench, bench_args);
  add_policy_options(bench, bench_args);
  bench->add_option("--sizes", b_sizes, "Comma-separated sizes (r or MxNxK)");
  bench->add_option("--size-range", b_range, "lo:hi:step");
  bench->add_option("--reps", b_reps, "Timed repetitions per size")->capture_default_str();
  bench->add_option("--csv", b_csv, "CSV output path (default stdout)");
  bench->add_option("--power-trace", b_trace, "Replay a recorded power trace");
  bench->add_option("--power-const", b_const, "Constant power draw in watts");
  bench->add_option("--mock-clock", b_mock, "Synthesize times at this GFLOPS rate");
  bench->add_option("--seed", bench_args.seed, "Operand seed")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Compare policy combinations against the naive GEMM");
  std::string v_sizes, v_range;
  add_cluster_options(validate, validate_args);
  add_policy_options(validate, validate_args, false);
  validate->add_option("--sizes", v_sizes, "Comma-separated sizes (default 7,64,129)");
  validate->add_option("--size-range", v_range, "lo:hi:step");
  validate->add_option("--seed", validate_args.seed, "Operand seed");

  auto* plan = app.add_subcommand("plan", "Print the iteration-space partition of a plan");
  std::optional<std::size_t> p_size;
  std::size_t p_m = 1024, p_n = 1024, p_k = 1024;
  add_cluster_options(plan, plan_args);
  add_policy_options(plan, plan_args);
  plan->add_option("--size", p_size, "Square order r");
  plan->add_option("-m", p_m)->capture_default_str();
  plan->add_option("-n", p_n)->capture_default_str();
  plan->add_option("-k", p_k)->capture_default_str();

  auto* tune_cmd = app.add_subcommand("tune", "Search m_c and k_c for one cluster");
  std::string t_profile = AMPGEMM_CONFIG_DIR "/exynos5422-a15.cfg", t_out, t_log, t_mc, t_kc;
  std::size_t t_size = 512, t_reps = 1, t_radius = 2;
  std::optional<std::size_t> t_step_m, t_step_k, t_threads;
  unsigned t_seed = 1;
  tune_cmd->add_option("--config", t_profile, "Single-cluster profile to tune")->capture_default_str();
  tune_cmd->add_option("--out", t_out, "Write the tuned profile here");
  tune_cmd->add_option("--tune-log", t_log, "JSON-lines log of every point");
  tune_cmd->add_option("--size", t_size, "Problem order r")->capture_default_str();
  tune_cmd->add_option("--reps", t_reps, "Timings per point (median kept)")->capture_default_str();
  tune_cmd->add_option("--radius", t_radius, "Refinement half-width in steps")->capture_default_str();
  tune_cmd->add_option("--mc-grid", t_mc, "Coarse m_c grid lo:hi:step");
  tune_cmd->add_option("--kc-grid", t_kc, "Coarse k_c grid lo:hi:step");
  tune_cmd->add_option("--refine-step-m", t_step_m);
  tune_cmd->add_option("--refine-step-k", t_step_k);
  tune_cmd->add_option("--threads", t_threads, "Threads (overrides core_count)");
  tune_cmd->add_option("--seed", t_seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed())
      return run_bench_cmd(bench_args, b_sizes.empty() && b_range.empty() ? "512" : b_sizes, b_range, b_reps, b_csv,
                           b_trace, b_const, b_mock);
    if (validate->parsed()) return run_validate_cmd(validate_args, *validate, v_sizes, v_range);
    if (plan->parsed()) return run_plan_cmd(plan_args, p_size, p_m, p_n, p_k);
    if (tune_cmd->parsed())
      return run_tune_cmd(t_profile, t_out, t_log, t_size, t_reps, t_radius, t_mc, t_kc, t_step_m, t_step_k,
                          t_threads, t_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
