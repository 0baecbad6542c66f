#include "ampgemm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ampgemm/engine.hpp"
#include "ampgemm/matrix.hpp"
#include "ampgemm/reference.hpp"

namespace ampgemm {

RunSetup make_setup(const RunConfig& cfg) {
  RunSetup s;
  if (cfg.policy == Policy::SingleCluster) {
    s.topology.clusters = {cfg.fast};
    s.trees = {make_control_tree(cfg.fast.cache, s.topology, std::nullopt, cfg.fine)};
  } else {
    if (!cfg.slow)
      throw ConfigError("policy " + std::string(to_string(cfg.policy)) + " needs a slow-cluster profile");
    s.topology.clusters = {cfg.fast, *cfg.slow};
    s.trees = {make_control_tree(cfg.fast.cache, s.topology, cfg.coarse, cfg.fine)};
    if (is_cache_aware(cfg.policy))
      s.trees.push_back(make_control_tree(cfg.slow->cache, s.topology, cfg.coarse, cfg.fine));
  }
  if (cfg.degrees)
    for (auto& t : s.trees) t.loop_degrees = *cfg.degrees;
  return s;
}

PlanRequest make_plan_request(const RunConfig& cfg, std::size_t m, std::size_t n, std::size_t k) {
  RunSetup s = make_setup(cfg);
  PlanRequest req;
  req.policy = cfg.policy;
  req.m = m;
  req.n = n;
  req.k = k;
  req.topology = std::move(s.topology);
  req.trees = std::move(s.trees);
  req.ratio = cfg.ratio;
  return req;
}

namespace {

std::size_t parse_count(std::string_view tok, const char* what) {
  std::size_t v = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void fill_random(Matrix& x, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) = dist(rng);
}

struct Operands {
  Matrix a, b, c;
};

Operands random_operands(const ProblemSize& s, unsigned seed) {
  std::mt19937_64 rng(seed);
  Operands o{Matrix(s.m, s.k), Matrix(s.k, s.n), Matrix(s.m, s.n)};
  fill_random(o.a, rng);
  fill_random(o.b, rng);
  fill_random(o.c, rng);
  return o;
}

double flops(std::size_t m, std::size_t n, std::size_t k) {
  return 2.0 * static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(k);
}

std::string coarse_name(const std::optional<LoopId>& c) { return c ? std::to_string(*c) : "none"; }

}  // namespace

std::vector<ProblemSize> parse_sizes(const std::string& list) {
  std::vector<ProblemSize> out;
  for (auto tok : split(list, ',')) {
    if (tok.empty()) throw std::invalid_argument("empty entry in size list '" + list + "'");
    const auto dims = split(tok, 'x');
    if (dims.size() == 1) {
      const auto r = parse_count(tok, "size");
      out.push_back({r, r, r});
    } else if (dims.size() == 3) {
      out.push_back({parse_count(dims[0], "m"), parse_count(dims[1], "n"), parse_count(dims[2], "k")});
    } else {
      throw std::invalid_argument("size '" + std::string(tok) + "' is neither r nor MxNxK");
    }
  }
  return out;
}

std::vector<ProblemSize> parse_size_range(const std::string& range) {
  const auto parts = split(range, ':');
  if (parts.size() != 3) throw std::invalid_argument("size range must be lo:hi:step, got '" + range + "'");
  const auto lo = parse_count(parts[0], "range start");
  const auto hi = parse_count(parts[1], "range end");
  const auto step = parse_count(parts[2], "range step");
  if (step == 0) throw std::invalid_argument("size range step must be >= 1");
  if (lo > hi) throw std::invalid_argument("size range start exceeds its end");
  std::vector<ProblemSize> out;
  for (std::size_t r = lo; r <= hi; r += step) out.push_back({r, r, r});
  return out;
}

void finish_record(BenchRecord& r, const std::optional<EnergyReading>& energy) {
  const double f = flops(r.m, r.n, r.k);
  r.gflops = r.time_s > 0.0 ? f / r.time_s / 1e9 : 0.0;
  r.joules.reset();
  r.gflops_per_watt.reset();
  if (energy && energy->joules > 0.0) {
    r.joules = energy->joules;
    // gflops / mean power, algebraically (f / 1e9) / joules.
    r.gflops_per_watt = r.gflops / energy->mean_watts;
  }
}

std::vector<BenchRecord> run_bench(const std::vector<ProblemSize>& sizes, const RunConfig& cfg,
                                   const BenchOptions& opts, PowerSampler& sampler) {
  if (opts.repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
  if (opts.synthetic_gflops && !(*opts.synthetic_gflops > 0.0))
    throw std::invalid_argument("mock clock rate must be > 0");

  std::vector<BenchRecord> out;
  for (const auto& size : sizes) {
    const WorkPlan plan = make_plan(make_plan_request(cfg, size.m, size.n, size.k));
    Operands ops = random_operands(size, opts.seed);

    execute_plan(plan, ops.a.view(), ops.b.view(), ops.c.view());

    struct Run {
      double seconds;
      std::optional<EnergyReading> energy;
      std::size_t uk_fast, uk_slow;
    };
    std::vector<Run> runs;
    for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
      sampler.start();
      const auto t0 = std::chrono::steady_clock::now();
      const ExecutionStats st = execute_plan(plan, ops.a.view(), ops.b.view(), ops.c.view());
      const double measured = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double secs =
          opts.synthetic_gflops ? flops(size.m, size.n, size.k) / (*opts.synthetic_gflops * 1e9) : measured;
      const auto energy = sampler.stop(secs);
      runs.push_back({secs, energy, st.microkernels(CoreClass::Fast), st.microkernels(CoreClass::Slow)});
    }
    std::stable_sort(runs.begin(), runs.end(), [](const Run& x, const Run& y) { return x.seconds < y.seconds; });
    const Run& med = runs[(runs.size() - 1) / 2];

    BenchRecord r;
    r.policy = cfg.policy;
    r.ratio = cfg.ratio;
    r.coarse = plan.coarse_loop;
    r.fine = plan.fine;
    r.m = size.m;
    r.n = size.n;
    r.k = size.k;
    r.time_s = med.seconds;
    r.uk_fast = med.uk_fast;
    r.uk_slow = med.uk_slow;
    finish_record(r, med.energy);
    out.push_back(r);
  }
  return out;
}

std::string csv_row(const BenchRecord& r) {
  char buf[512];
  char joules[64] = "";
  char gpw[64] = "";
  if (r.joules) std::snprintf(joules, sizeof joules, "%.9e", *r.joules);
  if (r.gflops_per_watt) std::snprintf(gpw, sizeof gpw, "%.9e", *r.gflops_per_watt);
  std::snprintf(buf, sizeof buf, "%s,%g,%s,%s,%zu,%zu,%zu,%.9e,%.9e,%s,%s,%zu,%zu",
                std::string(to_string(r.policy)).c_str(), r.ratio, coarse_name(r.coarse).c_str(),
                to_string(r.fine).c_str(), r.m, r.n, r.k, r.time_s, r.gflops, joules, gpw, r.uk_fast, r.uk_slow);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << csv_row(r) << '\n';
}

std::string to_string(const Combination& c) {
  std::ostringstream os;
  os << to_string(c.policy);
  if (c.policy == Policy::Sas || c.policy == Policy::CaSas) os << " R=" << c.ratio;
  os << " coarse=" << coarse_name(c.coarse) << " fine=" << to_string(c.fine);
  return os.str();
}

std::vector<Combination> default_combinations(double ratio, bool two_clusters) {
  const FineLoops fines[] = {{true, false}, {false, true}, {true, true}};
  std::vector<Combination> out;
  for (const auto& f : fines) out.push_back({Policy::SingleCluster, 1.0, std::nullopt, f});
  if (!two_clusters) return out;
  for (Policy p : {Policy::Sss, Policy::Sas, Policy::CaSas, Policy::Das, Policy::CaDas})
    for (LoopId coarse : {1, 3}) {
      if (is_dynamic(p) && coarse == 1) continue;
      const double r = (p == Policy::Sas || p == Policy::CaSas) ? ratio : 1.0;
      for (const auto& f : fines) out.push_back({p, r, coarse, f});
    }
  return out;
}

std::vector<ValidationRow> validate_combinations(const RunConfig& base, const std::vector<Combination>& combos,
                                                 const std::vector<ProblemSize>& sizes, unsigned seed) {
  std::vector<ValidationRow> out;
  for (const auto& size : sizes) {
    const Operands ops = random_operands(size, seed);
    Matrix want = ops.c;
    reference_gemm(ops.a.view(), ops.b.view(), want.view());

    for (const auto& combo : combos) {
      ValidationRow row;
      row.combo = combo;
      row.size = size;
      row.tolerance = gemm_tolerance(size.k);
      RunConfig cfg = base;
      cfg.policy = combo.policy;
      cfg.ratio = combo.ratio;
      cfg.coarse = combo.coarse;
      cfg.fine = combo.fine;
      try {
        const WorkPlan plan = make_plan(make_plan_request(cfg, size.m, size.n, size.k));
        Matrix got = ops.c;
        execute_plan(plan, ops.a.view(), ops.b.view(), got.view());
        row.max_rel_error = max_relative_error(got.view(), want.view());
        row.ok = row.max_rel_error <= row.tolerance;
      } catch (const Error& e) {
        row.error = e.what();
        row.ok = false;
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string thread_list(const std::vector<std::size_t>& threads) {
  std::vector<std::size_t> t = threads;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::string out;
  for (std::size_t i = 0; i < t.size();) {
    std::size_t j = i;
    while (j + 1 < t.size() && t[j + 1] == t[j] + 1) ++j;
    if (!out.empty()) out += ',';
    out += "Th" + std::to_string(t[i]);
    if (j > i) out += "-Th" + std::to_string(t[j]);
    i = j + 1;
  }
  return out;
}

namespace {

struct Row {
  LoopId loop;
  std::string range;
  std::vector<std::size_t> threads;
};

std::vector<std::size_t> group_threads(const GroupPlan& g) {
  std::vector<std::size_t> t;
  for (std::size_t i = 0; i < g.thread_count; ++i) t.push_back(g.first_thread + i);
  return t;
}

// Extent of the group's work along Loop 1 (columns) and Loop 3 (rows).
Range group_cols(const WorkPlan& p, const GroupPlan& g) {
  return p.coarse_loop && *p.coarse_loop == 1 && !p.dynamic ? g.coarse : Range{0, p.n};
}

}  // namespace

std::string describe_plan(const WorkPlan& p) {
  std::ostringstream os;
  os << "policy " << to_string(p.policy);
  if (p.policy == Policy::Sas || p.policy == Policy::CaSas) os << "  ratio " << p.ratio;
  os << "  coarse " << coarse_name(p.coarse_loop) << "  fine " << to_string(p.fine) << "  m=" << p.m
     << " n=" << p.n << " k=" << p.k << '\n';
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    const auto& grp = p.groups[g];
    const auto& c = p.trees[grp.tree].cache;
    os << "group " << g << " (" << (grp.core_class ? std::string(to_string(*grp.core_class)) : "mixed") << ", "
       << thread_list(group_threads(grp)) << "): n_c=" << c.n_c << " k_c=" << c.k_c << " m_c=" << c.m_c
       << " m_r=" << c.m_r << " n_r=" << c.n_r << '\n';
  }

  std::vector<Row> rows;
  const bool coarse1 = p.coarse_loop && *p.coarse_loop == 1 && p.groups.size() > 1;
  const bool coarse3 = p.coarse_loop && *p.coarse_loop == 3 && p.groups.size() > 1;

  if (coarse1) {
    for (const auto& g : p.groups) rows.push_back({1, to_string(g.coarse), group_threads(g)});
  } else {
    std::vector<std::size_t> all;
    for (const auto& t : p.threads) all.push_back(t.thread);
    rows.push_back({1, to_string(Range{0, p.n}), all});
  }

  {
    std::vector<std::size_t> all;
    for (const auto& t : p.threads) all.push_back(t.thread);
    rows.push_back({2, to_string(Range{0, p.k}) + " sequential", all});
  }

  if (coarse3 && p.dynamic) {
    std::vector<std::size_t> all;
    for (const auto& t : p.threads) all.push_back(t.thread);
    rows.push_back({3, "dynamic (leader-dispatched, chunk = class m_c)", all});
  } else if (coarse3) {
    for (const auto& g : p.groups) rows.push_back({3, to_string(g.coarse), group_threads(g)});
  } else {
    for (const auto& g : p.groups) rows.push_back({3, to_string(Range{0, p.m}), group_threads(g)});
  }

  // Fine loops: each thread's share of the first B_c (Loop 4) or A_c (Loop 5)
  // block, in elements relative to the block start.
  for (LoopId loop : {4, 5}) {
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_range;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (const auto& t : p.threads) {
      const auto& g = p.groups[t.group];
      const auto& c = p.trees[g.tree].cache;
      std::size_t extent;
      std::size_t r;
      if (loop == 4) {
        extent = std::min(c.n_c, group_cols(p, g).size());
        r = c.n_r;
      } else {
        const std::size_t rows_here = coarse3 && !p.dynamic ? g.coarse.size() : p.m;
        extent = std::min(c.m_c, rows_here);
        r = c.m_r;
      }
      const std::size_t tiles = (extent + r - 1) / r;
      const Range share = t.fine_share(loop, tiles);
      const std::pair<std::size_t, std::size_t> key{std::min(extent, share.begin * r),
                                                    std::min(extent, share.end * r)};
      if (!by_range.count(key)) order.push_back(key);
      by_range[key].push_back(t.thread);
    }
    for (const auto& key : order)
      rows.push_back({loop, to_string(Range{key.first, key.second}) + (loop == 4 ? " of B_c" : " of A_c"),
                      by_range[key]});
  }

  os << "loop  range                                           threads\n";
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-5d %-47s %s\n", r.loop, r.range.c_str(), thread_list(r.threads).c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace ampgemm
