// Acceptance gate. Usage: acceptance [criterion...] where a criterion is 1-8 or
// 5a/5b/5c; no argument runs everything. Prints one PASS/FAIL line per criterion
// and exits nonzero if any selected criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ampgemm/bench.hpp"
#include "ampgemm/energy.hpp"
#include "ampgemm/engine.hpp"
#include "ampgemm/packing.hpp"
#include "ampgemm/reference.hpp"
#include "ampgemm/scheduler.hpp"
#include "ampgemm/tuner.hpp"
#include "ampgemm/validation.hpp"

#ifndef AMPGEMM_CLI
#define AMPGEMM_CLI "ampgemm"
#endif

using namespace ampgemm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few failures with context.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (ok) return;
    ++failed_;
    if (failed_ <= 5) msgs_ += (msgs_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {true, summary + " (" + std::to_string(count_) + " checks)"};
    return {false, std::to_string(failed_) + "/" + std::to_string(count_) + " checks failed: " + msgs_};
  }

 private:
  std::size_t count_ = 0, failed_ = 0;
  std::string msgs_;
};

ClusterSpec a15(std::size_t cores = 4) {
  ClusterSpec c;
  c.core_class = CoreClass::Fast;
  c.core_count = cores;
  c.l1d_bytes = 32768;
  c.l2_bytes = 2097152;
  c.cache = {4096, 952, 152, 4, 4};
  return c;
}

ClusterSpec a7(std::size_t cores = 4) {
  ClusterSpec c;
  c.core_class = CoreClass::Slow;
  c.core_count = cores;
  c.l1d_bytes = 32768;
  c.l2_bytes = 524288;
  c.cache = {4096, 352, 80, 4, 4};
  return c;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  Matrix x(rows, cols);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) x(i, j) = d(rng);
  return x;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double x = a(i, j), y = b(i, j);
      if (std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
  return true;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  struct Combo {
    Policy p;
    double ratio;
  };
  const Combo combos[] = {{Policy::Sss, 1}, {Policy::Sas, 1},   {Policy::Sas, 3},
                          {Policy::Sas, 5}, {Policy::CaSas, 5}, {Policy::CaDas, 1}};
  std::vector<std::array<std::size_t, 3>> sizes;
  for (std::size_t r : {1, 2, 3, 5, 7, 8, 16, 37, 64, 96, 129, 200}) sizes.push_back({r, r, r});
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 256);
  for (int i = 0; i < 10; ++i) sizes.push_back({dim(rng), dim(rng), dim(rng)});

  const Topology topo{{a15(), a7()}};
  Check check;
  double worst = 0.0;
  for (const auto& [m, n, k] : sizes) {
    const Matrix a = random_matrix(m, k, rng);
    const Matrix b = random_matrix(k, n, rng);
    const Matrix c0 = random_matrix(m, n, rng);
    Matrix oracle = c0;
    reference_gemm(a.view(), b.view(), oracle.view());

    for (const auto& combo : combos)
      for (LoopId coarse : {1, 3}) {
        if (is_dynamic(combo.p) && coarse == 1) continue;
        for (FineLoops fine : {FineLoops{true, false}, FineLoops{false, true}}) {
          PlanRequest req;
          req.policy = combo.p;
          req.m = m;
          req.n = n;
          req.k = k;
          req.topology = topo;
          req.ratio = combo.ratio;
          req.trees = {make_control_tree(a15().cache, topo, coarse, fine)};
          if (is_cache_aware(combo.p)) req.trees.push_back(make_control_tree(a7().cache, topo, coarse, fine));
          const WorkPlan plan = make_plan(req);

          Matrix got = c0;
          execute_plan(plan, a.view(), b.view(), got.view());

          // Sequential reference: each coarse slice with the blocking of the
          // cluster that owns it. Only k_c affects the summation order.
          Matrix seq = c0;
          if (plan.trees.size() == 2 && coarse == 1) {
            for (const auto& g : plan.groups) {
              if (g.coarse.empty()) continue;
              const auto bs = static_cast<ConstMatrixView>(b.view()).block(0, g.coarse.begin, k, g.coarse.size());
              const auto cs = seq.view().block(0, g.coarse.begin, m, g.coarse.size());
              gemm_sequential(a.view(), bs, cs, plan.trees[g.tree].cache);
            }
          } else {
            gemm_sequential(a.view(), b.view(), seq.view(), plan.trees[0].cache);
          }

          const double err = max_relative_error(got.view(), oracle.view());
          worst = std::max(worst, err);
          const std::string tag = std::string(to_string(combo.p)) + " R=" + fmt("%g", combo.ratio) + " coarse " +
                                  std::to_string(coarse) + " fine " + to_string(fine) + " " + std::to_string(m) +
                                  "x" + std::to_string(n) + "x" + std::to_string(k);
          check.expect(err <= gemm_tolerance(k), tag + " rel err " + fmt("%.3e", err));
          check.expect(bitwise_equal(got, seq), tag + " differs from gemm_sequential");
        }
      }
  }
  return check.outcome("max rel err " + fmt("%.3e", worst) + " <= 4*k*eps, bitwise equal to sequential");
}

// ---------------------------------------------------------------------------

Outcome partition_laws() {
  Check check;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> ext(0, 100000), parts(1, 16), align(1, 16);
  std::uniform_real_distribution<double> ratio(0.05, 20.0);

  for (int i = 0; i < 2000; ++i) {
    const std::size_t e = ext(rng), p = parts(rng), a = align(rng);
    const auto rs = split_even(e, p, a);
    bool ok = rs.size() == p && rs.front().begin == 0 && rs.back().end == e;
    std::size_t lo = e, hi = 0;
    for (std::size_t j = 0; ok && j < p; ++j) {
      ok = rs[j].begin <= rs[j].end && (j + 1 == p || (rs[j].end == rs[j + 1].begin && rs[j].end % a == 0));
      lo = std::min(lo, rs[j].size());
      hi = std::max(hi, rs[j].size());
    }
    check.expect(ok && hi - lo <= a, "split_even(" + std::to_string(e) + "," + std::to_string(p) + "," +
                                         std::to_string(a) + ")");
  }

  for (int i = 0; i < 2000; ++i) {
    const std::size_t e = ext(rng), a = align(rng);
    const double r1 = ratio(rng), r2 = ratio(rng);
    const auto [f, s] = split_ratio(e, r1, a);
    check.expect(f.begin == 0 && f.end == s.begin && s.end == e && (f.end % a == 0 || f.end == e),
                 "split_ratio coverage/alignment e=" + std::to_string(e));
    const auto one = split_ratio(e, 1.0, a);
    const auto even = split_even(e, 2, a);
    check.expect(one.first == even[0] && one.second == even[1], "R=1 degeneration e=" + std::to_string(e));
    const auto lo = split_ratio(e, std::min(r1, r2), a);
    const auto hi = split_ratio(e, std::max(r1, r2), a);
    check.expect(lo.first.size() <= hi.first.size(), "ratio monotonicity e=" + std::to_string(e));
  }

  // Dispatcher: randomized single-threaded interleavings of leader calls.
  std::uniform_int_distribution<std::size_t> mc(1, 64);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t e = ext(rng);
    const ChunkRule rule{4 * mc(rng), 4 * mc(rng)};
    ChunkDispatcher d(e, rule);
    std::size_t cursor = 0;
    bool ok = true;
    while (true) {
      const CoreClass c = rng() % 2 ? CoreClass::Fast : CoreClass::Slow;
      const auto r = d.next_chunk(c);
      if (!r) break;
      ok = ok && r->begin == cursor && r->size() > 0 && r->size() <= rule.chunk(c) &&
           (r->end == e || r->size() == rule.chunk(c));
      cursor = r->end;
    }
    check.expect(ok && cursor == e && !d.next_chunk(CoreClass::Fast), "dispatcher e=" + std::to_string(e));
  }

  // Dispatcher: concurrent leaders.
  for (int i = 0; i < 50; ++i) {
    const std::size_t e = ext(rng);
    const ChunkRule rule{4 * mc(rng), 4 * mc(rng)};
    ChunkDispatcher d(e, rule);
    std::vector<std::vector<std::pair<Range, CoreClass>>> got(4);
    {
      std::vector<std::jthread> ts;
      for (std::size_t t = 0; t < 4; ++t)
        ts.emplace_back([&, t] {
          const CoreClass c = t % 2 ? CoreClass::Slow : CoreClass::Fast;
          while (auto r = d.next_chunk(c)) got[t].push_back({*r, c});
        });
    }
    std::vector<std::pair<Range, CoreClass>> all;
    for (auto& g : got) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end(), [](auto& x, auto& y) { return x.first.begin < y.first.begin; });
    std::size_t cursor = 0;
    bool ok = true;
    for (const auto& [r, c] : all) {
      ok = ok && r.begin == cursor && r.size() <= rule.chunk(c);
      cursor = r.end;
    }
    check.expect(ok && cursor == e, "concurrent dispatcher e=" + std::to_string(e));
  }
  return check.outcome("split_even, split_ratio and dispatcher laws");
}

// ---------------------------------------------------------------------------

Outcome published_blocking() {
  Check check;
  check.expect(cache_fit_check({4096, 952, 152, 4, 4}, a15()).fits(), "(152,952) on A15-like");
  check.expect(cache_fit_check({4096, 352, 80, 4, 4}, a7()).fits(), "(80,352) on A7-like");
  check.expect(!cache_fit_check({4096, 952, 152, 4, 4}, a7()).fits(), "(152,952) must not fit A7-like");
  const auto [f, s] = harmonize_trees(a15().cache, a7().cache, 3, std::nullopt, a7());
  check.expect(s.m_c == 32, "harmonized slow m_c = " + std::to_string(s.m_c));
  check.expect(s.k_c == 952, "harmonized slow k_c = " + std::to_string(s.k_c));
  return check.outcome("fit checks hold; harmonized slow m_c = 32");
}

// ---------------------------------------------------------------------------

std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = std::string(AMPGEMM_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, "popen failed"};
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  const int status = pclose(p);
  return {status, out};
}

Outcome loop2_prohibition() {
  Check check;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> deg(1, 4), race(2, 8);
  const Topology topo{{a15(), a7()}};
  for (int i = 0; i < 1000; ++i) {
    ControlTree t;
    t.cache = a15().cache;
    t.loop_degrees = {deg(rng), race(rng), deg(rng), deg(rng), deg(rng)};
    t.coarse_loop = std::array<std::optional<LoopId>, 3>{1, 3, std::nullopt}[rng() % 3];
    t.fine_loops = rng() % 2 ? std::vector<LoopId>{4} : std::vector<LoopId>{4, 5};
    check.expect(has_violation(validate_control_tree(t, topo), ViolationCode::Loop2Race), "tree not rejected");
  }
  // Every other degree valid, only Loop 2 wrong.
  ControlTree t = make_control_tree(a15().cache, topo, 1, {});
  t.degree(2) = 2;
  check.expect(has_violation(validate_control_tree(t, topo), ViolationCode::Loop2Race), "8-core tree");

  for (const char* sub : {"plan --degrees 2,2,1,2,1", "bench --sizes 16 --coarse none --degrees 1,2,1,4,1",
                          "validate --sizes 8 --policy sss --coarse 1 --fine 4 --degrees 2,2,1,2,1"}) {
    const auto [status, out] = run_cli(sub);
    check.expect(status != 0, std::string("CLI '") + sub + "' exited 0");
    check.expect(out.find("LOOP2_RACE") != std::string::npos, std::string("CLI '") + sub + "' lacks LOOP2_RACE");
  }
  return check.outcome("validate_control_tree and CLI reject Loop-2 degree > 1 with LOOP2_RACE");
}

// ---------------------------------------------------------------------------

// Scaled blocking for the load-balance runs: m = 1536 is at least 20 fast m_c,
// and the slow config shares the fast k_c as the coarse-Loop-3 policies need.
constexpr std::size_t kBalanceOrder = 1536;
constexpr double kSlowdown = 4.0;

Topology balance_topology() {
  auto fast = a15();
  fast.cache = {4096, 256, 72, 4, 4};
  auto slow = a7();
  slow.cache = {4096, 256, 24, 4, 4};
  slow.emulated_slowdown = kSlowdown;
  return Topology{{fast, slow}};
}

struct Timed {
  double seconds;
  ExecutionStats stats;
};

struct BalanceOperands {
  Matrix a, b, c;
  BalanceOperands() {
    std::mt19937_64 rng(31);
    a = random_matrix(kBalanceOrder, kBalanceOrder, rng);
    b = random_matrix(kBalanceOrder, kBalanceOrder, rng);
    c = Matrix(kBalanceOrder, kBalanceOrder);
  }
};

BalanceOperands& balance_operands() {
  static BalanceOperands ops;
  return ops;
}

Timed run_balanced(Policy p, LoopId coarse, double ratio, std::size_t reps = 3) {
  const Topology topo = balance_topology();
  PlanRequest req;
  req.policy = p;
  req.m = req.n = req.k = kBalanceOrder;
  req.topology = topo;
  req.ratio = ratio;
  req.trees = {make_control_tree(topo.clusters[0].cache, topo, coarse, {})};
  if (is_cache_aware(p)) req.trees.push_back(make_control_tree(topo.clusters[1].cache, topo, coarse, {}));
  const WorkPlan plan = make_plan(req);
  auto& ops = balance_operands();
  std::vector<Timed> runs;
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto st = execute_plan(plan, ops.a.view(), ops.b.view(), ops.c.view());
    runs.push_back({std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), std::move(st)});
  }
  std::sort(runs.begin(), runs.end(), [](const Timed& x, const Timed& y) { return x.seconds < y.seconds; });
  return runs[(runs.size() - 1) / 2];
}

// Longest per-thread CPU time: what the wall time would be with one core per worker.
// Diagnostic only; the criteria judge wall time.
double critical_cpu(const ExecutionStats& st) {
  double m = 0.0;
  for (const auto& t : st.threads) m = std::max(m, t.cpu_seconds);
  return m;
}

std::string host_note() {
  return " [host has " + std::to_string(std::thread::hardware_concurrency()) + " CPU(s) for 8 workers]";
}

Outcome balance_sss_vs_cadas() {
  const auto rs = run_balanced(Policy::Sss, 1, 1.0);
  const auto rd = run_balanced(Policy::CaDas, 3, 1.0);
  const double sss = rs.seconds, das = rd.seconds;
  const double ratio = sss / das;
  std::string d = "SSS " + fmt("%.3f", sss) + " s, CA-DAS " + fmt("%.3f", das) + " s, ratio " +
                  fmt("%.2f", ratio) + " (need >= 1.7)" + host_note();
  if (std::thread::hardware_concurrency() < 8)
    d += "; critical-path CPU ratio " + fmt("%.2f", critical_cpu(rs.stats) / critical_cpu(rd.stats));
  return {ratio >= 1.7, d};
}

Outcome balance_cadas_uk_ratio() {
  const auto r = run_balanced(Policy::CaDas, 3, 1.0, 1);
  const double f = static_cast<double>(r.stats.microkernels(CoreClass::Fast));
  const double s = static_cast<double>(r.stats.microkernels(CoreClass::Slow));
  const double ratio = s > 0 ? f / s : INFINITY;
  const std::string d = "FAST " + fmt("%.0f", f) + " / SLOW " + fmt("%.0f", s) + " micro-kernels = " +
                        fmt("%.2f", ratio) + " (need [3,7])" + host_note();
  return {ratio >= 3.0 && ratio <= 7.0, d};
}

Outcome balance_sas_sweep() {
  std::string d = "SAS wall times:";
  std::string cpu = "; critical-path CPU:";
  double best = INFINITY;
  int best_r = 0;
  for (int r = 1; r <= 7; ++r) {
    const auto run = run_balanced(Policy::Sas, 1, r);
    const double t = run.seconds;
    cpu += " R" + std::to_string(r) + "=" + fmt("%.3f", critical_cpu(run.stats));
    d += " R" + std::to_string(r) + "=" + fmt("%.3f", t);
    if (t < best) {
      best = t;
      best_r = r;
    }
  }
  d += "; minimum at R=" + std::to_string(best_r) + " (need 3..6)" + host_note();
  if (std::thread::hardware_concurrency() < 8) d += cpu;
  return {best_r >= 3 && best_r <= 6, d};
}

// ---------------------------------------------------------------------------

Outcome tuner_recovery() {
  Check check;
  SearchSpec spec;
  for (std::size_t m = 8; m <= 200; m += 32) spec.mc_grid.push_back(m);
  for (std::size_t k = 64; k <= 1024; k += 128) spec.kc_grid.push_back(k);
  spec.radius = 2;
  spec.refine_step_m = 8;
  spec.refine_step_k = 8;
  const auto planted = [](std::size_t m, std::size_t k) {
    const double dm = static_cast<double>(m) - 152.0, dk = (static_cast<double>(k) - 952.0) / 8.0;
    return -(dm * dm + dk * dk);
  };

  const auto t0 = std::chrono::steady_clock::now();
  const auto res = tune(spec, planted, a15());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const long dm = std::abs(static_cast<long>(res.best.first) - 152);
  const long dk = std::abs(static_cast<long>(res.best.second) - 952);
  check.expect(dm <= 8 && dk <= 8, "best (" + std::to_string(res.best.first) + "," + std::to_string(res.best.second) +
                                       ") not within one step of (152,952)");
  check.expect(secs < 1.0, "took " + fmt("%.3f", secs) + " s");

  // On the A7-like cluster many grid points overflow L2. Every evaluator call
  // must be a feasible point, and every infeasible point must be logged as filtered.
  std::set<TunePoint> called;
  const auto res7 = tune(
      spec,
      [&](std::size_t m, std::size_t k) {
        called.insert({m, k});
        return planted(m, k);
      },
      a7());
  std::size_t filtered = 0;
  for (const auto& e : res7.log) {
    const CacheConfig cfg{kTuningNc, e.k_c, e.m_c, 4, 4};
    const bool feasible = validate_cache_config(cfg).empty() && cache_fit_check(cfg, a7()).fits();
    if (e.phase == TunePhase::Filtered) {
      ++filtered;
      check.expect(!feasible && !e.score && !called.count({e.m_c, e.k_c}),
                   "filtered point (" + std::to_string(e.m_c) + "," + std::to_string(e.k_c) + ") was evaluated");
    } else {
      check.expect(feasible, "evaluated infeasible (" + std::to_string(e.m_c) + "," + std::to_string(e.k_c) + ")");
    }
  }
  for (const auto& p : called) {
    const CacheConfig cfg{kTuningNc, p.second, p.first, 4, 4};
    check.expect(cache_fit_check(cfg, a7()).fits(), "evaluator saw an infeasible point");
  }
  check.expect(filtered > 0, "A7 search filtered nothing");
  return check.outcome("best (" + std::to_string(res.best.first) + "," + std::to_string(res.best.second) + ") in " +
                       fmt("%.4f", secs) + " s; " + std::to_string(filtered) + " infeasible A7 points never evaluated");
}

// ---------------------------------------------------------------------------

Outcome energy_accounting() {
  Check check;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> watts(0.0, 10.0), period(0.01, 0.5), frac(0.0, 1.0);
  auto rel = [](double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); };

  for (int i = 0; i < 500; ++i) {
    // Constant and linear traces with random periods and windows inside the trace.
    const double p = period(rng);
    const std::size_t n = 2 + rng() % 60;
    std::array<double, 4> c0{}, slope{};
    for (auto& v : c0) v = watts(rng);
    for (auto& v : slope) v = watts(rng) - 5.0;
    PowerTrace constant, linear;
    for (std::size_t s = 0; s < n; ++s) {
      const double t = p * static_cast<double>(s);
      PowerSample cs{t, c0}, ls{t, {}};
      for (std::size_t d = 0; d < 4; ++d) ls.watts[d] = c0[d] + 10.0 + slope[d] * t / (p * n);
      constant.push_back(cs);
      linear.push_back(ls);
    }
    const double span = p * static_cast<double>(n - 1);
    double t0 = frac(rng) * span, t1 = frac(rng) * span;
    if (t0 > t1) std::swap(t0, t1);
    if (t1 - t0 < 1e-6) t1 = std::min(span, t0 + 1e-3);
    if (!(t0 < t1)) continue;

    double want_c = 0.0, want_l = 0.0;
    for (std::size_t d = 0; d < 4; ++d) {
      want_c += c0[d] * (t1 - t0);
      const double a = c0[d] + 10.0, b = slope[d] / (p * n);
      want_l += a * (t1 - t0) + 0.5 * b * (t1 * t1 - t0 * t0);
    }
    check.expect(rel(integrate_energy(constant, t0, t1)->total, want_c) <= 1e-9, "constant trace");
    check.expect(rel(integrate_energy(linear, t0, t1)->total, want_l) <= 1e-9, "linear trace");
  }

  // Four-domain trace: 0.25 s period, 3.5 W over 10 s.
  PowerTrace quarter;
  for (int s = 0; s <= 40; ++s) quarter.push_back({0.25 * s, {1.5, 0.5, 1.0, 0.5}});
  check.expect(rel(integrate_energy(quarter, 0, 10)->total, 35.0) <= 1e-9, "four-domain trace");

  // Constant-power identity on real runs, across policies and sizes.
  RunConfig cfg;
  cfg.fast = a15();
  cfg.slow = a7();
  for (Policy p : {Policy::Sss, Policy::CaDas}) {
    cfg.policy = p;
    cfg.coarse = is_dynamic(p) ? 3 : 1;
    for (double w : {4.0, 3.3, 0.7}) {
      ConstantPowerSampler sampler(w);
      for (const auto& r : run_bench({{96, 96, 96}, {64, 40, 24}}, cfg, {3, 1, std::nullopt}, sampler)) {
        check.expect(r.gflops_per_watt && *r.gflops_per_watt == r.gflops / w, "GFLOPS/W != GFLOPS/W_const");
        check.expect(r.joules && *r.joules == w * r.time_s, "joules != W * t");
      }
    }
  }

  // CSV byte-stability with a fixed seed and mock clock and sampler.
  const auto csv = [&] {
    cfg.policy = Policy::Sas;
    cfg.coarse = 1;
    cfg.ratio = 3;
    ConstantPowerSampler sampler(4.0);
    std::ostringstream os;
    write_csv(os, run_bench({{48, 48, 48}, {64, 40, 24}, {17, 17, 17}}, cfg, {3, 11, 2.0}, sampler));
    return os.str();
  };
  const std::string first = csv(), second = csv();
  check.expect(first == second, "CSV differs between identical runs");
  check.expect(first.rfind(std::string(kCsvHeader) + "\n", 0) == 0, "CSV header");
  return check.outcome("trapezoid exact to 1e-9, constant-power identity exact, CSV byte-stable");
}

// ---------------------------------------------------------------------------

Outcome packing_round_trips() {
  Check check;
  std::mt19937_64 rng(8);
  const std::size_t r = 4;
  for (std::size_t d = 1; d <= 2 * r + 1; ++d)
    for (std::size_t k = 1; k <= 25; ++k) {
      const Matrix a = random_matrix(d, k, rng);
      const auto pa = pack_a(a.view(), r);
      check.expect(pa.buffer.size() == packed_size(d, r, k), "A buffer length");
      check.expect(bitwise_equal(unpack_a(pa), a), "A round trip " + std::to_string(d) + "x" + std::to_string(k));
      // Padding rows of the last A micro-panel.
      const std::size_t last = (d - 1) / r;
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = d - last * r; i < r; ++i)
          check.expect(pa.buffer[last * r * k + p * r + i] == 0.0, "A padding not zero");

      const Matrix b = random_matrix(k, d, rng);
      const auto pb = pack_b(b.view(), r);
      check.expect(pb.buffer.size() == packed_size(d, r, k), "B buffer length");
      check.expect(bitwise_equal(unpack_b(pb), b), "B round trip " + std::to_string(k) + "x" + std::to_string(d));
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = d - last * r; j < r; ++j)
          check.expect(pb.buffer[last * r * k + p * r + j] == 0.0, "B padding not zero");
    }
  return check.outcome("all shapes [1,9] x [1,25] round-trip bit-exactly, padding zero");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", oracle_equivalence},      {"2", partition_laws},     {"3", published_blocking},
      {"4", loop2_prohibition},       {"5a", balance_sss_vs_cadas}, {"5b", balance_cadas_uk_ratio},
      {"5c", balance_sas_sweep},      {"6", tuner_recovery},     {"7", energy_accounting},
      {"8", packing_round_trips}};

  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.empty() &&
        std::none_of(wanted.begin(), wanted.end(), [&](const std::string& w) { return w == id || w == id.substr(0, 1); }))
      continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %-2s %s  %s  [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
