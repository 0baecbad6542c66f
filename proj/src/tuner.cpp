#include "ampgemm/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <ostream>
#include <random>
#include <set>

#include <json.hpp>

#include "ampgemm/engine.hpp"
#include "ampgemm/validation.hpp"

namespace ampgemm {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::vector<std::size_t> stepped(std::size_t lo, std::size_t hi, std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

// True if (sa, a) should replace (sb, b) as the incumbent.
bool better(double sa, TunePoint a, double sb, TunePoint b) {
  if (sa != sb) return sa > sb;
  const std::size_t fa = a.first * a.second, fb = b.first * b.second;
  if (fa != fb) return fa < fb;
  return a.first < b.first;
}

class Search {
 public:
  Search(const SearchSpec& spec, const Evaluator& eval, const ClusterSpec& cluster)
      : spec_(spec), eval_(eval), cluster_(cluster) {}

  // Returns true if the point was evaluated now or earlier.
  bool visit(std::size_t m_c, std::size_t k_c, TunePhase phase) {
    const TunePoint p{m_c, k_c};
    if (result_.surface.count(p)) return true;
    if (filtered_.count(p)) return false;
    if (!feasible(m_c, k_c)) {
      filtered_.insert(p);
      result_.log.push_back({m_c, k_c, TunePhase::Filtered, std::nullopt});
      return false;
    }
    std::vector<double> scores;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, spec_.repetitions); ++r) scores.push_back(eval_(m_c, k_c));
    const double score = median(std::move(scores));
    result_.surface.emplace(p, score);
    result_.log.push_back({m_c, k_c, phase, score});
    if (!have_best_ || better(score, p, result_.best_score, result_.best)) {
      have_best_ = true;
      result_.best = p;
      result_.best_score = score;
    }
    return true;
  }

  bool have_best() const { return have_best_; }
  TuneResult& result() { return result_; }

 private:
  bool feasible(std::size_t m_c, std::size_t k_c) const {
    const CacheConfig cfg{kTuningNc, k_c, m_c, cluster_.cache.m_r, cluster_.cache.n_r};
    if (!validate_cache_config(cfg).empty()) return false;
    return cache_fit_check(cfg, cluster_, sizeof(double), spec_.occupancy).fits();
  }

  const SearchSpec& spec_;
  const Evaluator& eval_;
  const ClusterSpec& cluster_;
  TuneResult result_;
  std::set<TunePoint> filtered_;
  bool have_best_ = false;
};

}  // namespace

SearchSpec SearchSpec::defaults() {
  SearchSpec s;
  s.mc_grid = stepped(8, 256, 24);
  s.kc_grid = stepped(64, 1024, 96);
  s.radius = 2;
  s.refine_step_m = 24 / 4;
  s.refine_step_k = 96 / 4;
  return s;
}

std::string_view to_string(TunePhase p) {
  switch (p) {
    case TunePhase::Coarse: return "coarse";
    case TunePhase::Refine: return "refine";
    case TunePhase::Filtered: return "filtered";
  }
  return "?";
}

TuneResult tune(const SearchSpec& spec, const Evaluator& evaluator, const ClusterSpec& cluster) {
  if (spec.mc_grid.empty() || spec.kc_grid.empty()) throw TuneError("search grids must not be empty");
  if (!std::is_sorted(spec.mc_grid.begin(), spec.mc_grid.end()) ||
      !std::is_sorted(spec.kc_grid.begin(), spec.kc_grid.end()))
    throw TuneError("search grids must be sorted ascending");

  Search search(spec, evaluator, cluster);
  for (auto m : spec.mc_grid)
    for (auto k : spec.kc_grid) search.visit(m, k, TunePhase::Coarse);
  if (!search.have_best()) throw TuneError("every grid point was filtered out; nothing to evaluate");

  auto& result = search.result();
  result.coarse_best = result.best;

  const auto [m0, k0] = result.coarse_best;
  const auto r = static_cast<long long>(spec.radius);
  for (long long dm = -r; dm <= r; ++dm) {
    for (long long dk = -r; dk <= r; ++dk) {
      const long long m = static_cast<long long>(m0) + dm * static_cast<long long>(spec.refine_step_m);
      const long long k = static_cast<long long>(k0) + dk * static_cast<long long>(spec.refine_step_k);
      if (m <= 0 || k <= 0) continue;
      search.visit(static_cast<std::size_t>(m), static_cast<std::size_t>(k), TunePhase::Refine);
    }
  }
  return std::move(result);
}

double gemm_gflops(std::size_t r, double seconds) {
  const double rr = static_cast<double>(r);
  return 2.0 * rr * rr * rr / seconds / 1e9;
}

GemmTimer engine_timer(const ClusterSpec& cluster, std::size_t r, unsigned seed) {
  struct Operands {
    Matrix a, b, c;
  };
  auto ops = std::make_shared<Operands>(Operands{Matrix(r, r), Matrix(r, r), Matrix(r, r)});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& x : ops->a.storage()) x = dist(rng);
  for (auto& x : ops->b.storage()) x = dist(rng);

  return [ops, cluster, r](const CacheConfig& cfg) {
    Topology topo;
    topo.clusters.push_back(cluster);
    topo.clusters[0].cache = cfg;
    PlanRequest pr;
    pr.policy = Policy::SingleCluster;
    pr.m = pr.n = pr.k = r;
    pr.topology = topo;
    pr.trees = {make_control_tree(cfg, topo, std::nullopt, FineLoops{true, false})};
    const auto plan = make_plan(pr);
    const auto t0 = std::chrono::steady_clock::now();
    execute_plan(plan, ops->a.view(), ops->b.view(), ops->c.view());
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
}

Evaluator timed_evaluator(GemmTimer timer, std::size_t r, const ClusterSpec& cluster, std::size_t repetitions) {
  return [timer = std::move(timer), r, cluster, repetitions](std::size_t m_c, std::size_t k_c) {
    const CacheConfig cfg{kTuningNc, k_c, m_c, cluster.cache.m_r, cluster.cache.n_r};
    std::vector<double> times;
    for (std::size_t i = 0; i < std::max<std::size_t>(1, repetitions); ++i) times.push_back(timer(cfg));
    return gemm_gflops(r, median(std::move(times)));
  };
}

void write_tune_log(std::ostream& out, const TuneResult& result) {
  for (const auto& e : result.log) {
    nlohmann::json j;
    j["m_c"] = e.m_c;
    j["k_c"] = e.k_c;
    j["score"] = e.score ? nlohmann::json(*e.score) : nlohmann::json(nullptr);
    j["phase"] = to_string(e.phase);
    out << j.dump() << '\n';
  }
}

}  // namespace ampgemm
