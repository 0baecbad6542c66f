#include "ampgemm/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ampgemm/validation.hpp"

namespace ampgemm {

Range even_part(std::size_t extent, std::size_t parts, std::size_t align, std::size_t index) {
  const std::size_t units = extent / align;
  const std::size_t base = units / parts;
  const std::size_t rem = units % parts;
  const auto before = [&](std::size_t i) { return i * base + std::min(i, rem); };
  const std::size_t begin = before(index) * align;
  const std::size_t end = index + 1 == parts ? extent : before(index + 1) * align;
  return {begin, end};
}

std::vector<Range> split_even(std::size_t extent, std::size_t parts, std::size_t align) {
  if (parts == 0 || align == 0) throw std::invalid_argument("split_even: parts and align must be >= 1");
  std::vector<Range> out;
  out.reserve(parts);
  for (std::size_t i = 0; i < parts; ++i) out.push_back(even_part(extent, parts, align, i));
  return out;
}

std::pair<Range, Range> split_ratio(std::size_t extent, double ratio, std::size_t align) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("split_ratio: ratio must be positive");
  if (align == 0) throw std::invalid_argument("split_ratio: align must be >= 1");
  const double target = static_cast<double>(extent) * ratio / (ratio + 1.0);
  const double units = std::round(target / static_cast<double>(align));
  const std::size_t s = std::min(extent, static_cast<std::size_t>(units) * align);
  return {{0, s}, {s, extent}};
}

std::pair<CacheConfig, CacheConfig> harmonize_trees(const CacheConfig& fast, const CacheConfig& slow,
                                                    std::optional<LoopId> coarse_loop,
                                                    std::optional<std::size_t> override_mc_slow,
                                                    const ClusterSpec& slow_cluster) {
  if (!coarse_loop || *coarse_loop != 3) return {fast, slow};

  CacheConfig out = slow;
  out.k_c = fast.k_c;
  out.n_c = fast.n_c;
  out.m_c = override_mc_slow ? *override_mc_slow
                             : max_mc_for_l2(fast.k_c, slow_cluster.l2_bytes, sizeof(double), slow.m_r,
                                             kHarmonizeL2Safety);
  if (out.m_c == 0)
    throw ConfigError("HARMONIZED_MC_ZERO: no slow-cluster m_c fits k_c=" + std::to_string(fast.k_c) +
                      " into " + std::to_string(slow_cluster.l2_bytes) + " bytes of L2");
  if (out.m_c % out.m_r != 0)
    throw ConfigError("MC_NOT_MULTIPLE_OF_MR: harmonized slow m_c=" + std::to_string(out.m_c) +
                      " is not a multiple of m_r=" + std::to_string(out.m_r));
  return {fast, out};
}

ChunkDispatcher::ChunkDispatcher(std::size_t extent, ChunkRule rule) : extent_(extent), rule_(rule) {
  if (rule.fast_mc == 0 || rule.slow_mc == 0) throw std::invalid_argument("ChunkDispatcher: chunk sizes must be >= 1");
}

std::optional<Range> ChunkDispatcher::next_chunk(CoreClass c) {
  std::lock_guard lock(mu_);
  if (next_ >= extent_) return std::nullopt;
  const std::size_t begin = next_;
  next_ = std::min(extent_, begin + rule_.chunk(c));
  return Range{begin, next_};
}

std::size_t ChunkDispatcher::cursor() const {
  std::lock_guard lock(mu_);
  return next_;
}

Range ThreadPlan::fine_share(LoopId loop, std::size_t tiles) const {
  return loop == 4 ? even_part(tiles, ways4, 1, rank4) : even_part(tiles, ways5, 1, rank5);
}

Topology fast_first(const Topology& topo) {
  Topology out = topo;
  std::stable_sort(out.clusters.begin(), out.clusters.end(), [](const ClusterSpec& a, const ClusterSpec& b) {
    return a.core_class == CoreClass::Fast && b.core_class == CoreClass::Slow;
  });
  return out;
}

namespace {

void require_valid(const ControlTree& tree, const Topology& topo, const char* which) {
  const auto report = validate_control_tree(tree, topo);
  if (!report.empty()) throw PlanError(std::string("invalid ") + which + " control tree:\n" + format_report(report));
}

void fill_fine(ThreadPlan& t, const ControlTree& tree, std::size_t group_size) {
  const FineLoops fine = tree.fine();
  if (fine.loop4 && fine.loop5) {
    t.ways4 = std::gcd(group_size, tree.degree(4));
    t.ways5 = group_size / t.ways4;
  } else if (fine.loop5) {
    t.ways5 = group_size;
  } else {
    t.ways4 = group_size;
  }
  t.rank4 = t.rank / t.ways5;
  t.rank5 = t.rank % t.ways5;
}

}  // namespace

WorkPlan make_plan(const PlanRequest& req) {
  check_topology(req.topology);
  const Topology topo = fast_first(req.topology);
  const bool two_clusters = topo.clusters.size() == 2;
  const Policy policy = req.policy;

  const std::size_t want_trees = is_cache_aware(policy) ? 2 : 1;
  if (req.trees.size() != want_trees)
    throw PlanError("policy " + std::string(to_string(policy)) + " needs " + std::to_string(want_trees) +
                    " control tree(s), got " + std::to_string(req.trees.size()));

  const ControlTree& fast_tree = req.trees.front();
  const auto coarse = fast_tree.coarse_loop;

  if (policy == Policy::SingleCluster) {
    if (two_clusters) throw PlanError("policy single runs on exactly one cluster");
  }
  if (is_asymmetric(policy)) {
    if (!two_clusters)
      throw PlanError("policy " + std::string(to_string(policy)) + " needs a fast and a slow cluster");
    if (!coarse) throw PlanError("policy " + std::string(to_string(policy)) + " needs a coarse loop (1 or 3)");
  }
  if (is_dynamic(policy) && coarse && *coarse == 1)
    throw PlanError(
        "DYNAMIC_LOOP1: Loop 1 cannot be distributed dynamically; its stride n_c is too large to "
        "balance the clusters, so dynamic policies split Loop 3 (use --coarse 3)");
  if ((policy == Policy::Sas || policy == Policy::CaSas) && !(req.ratio > 0.0 && std::isfinite(req.ratio)))
    throw PlanError("RATIO_NOT_POSITIVE: the fast:slow ratio must be > 0");

  for (const auto& t : req.trees) require_valid(t, topo, &t == &fast_tree ? "fast" : "slow");

  WorkPlan plan;
  plan.policy = policy;
  plan.m = req.m;
  plan.n = req.n;
  plan.k = req.k;
  plan.coarse_loop = coarse;
  plan.fine = fast_tree.fine();
  plan.ratio = req.ratio;
  plan.dynamic = is_dynamic(policy);
  plan.clusters = topo.clusters;

  if (want_trees == 2) {
    const ControlTree& slow_tree = req.trees[1];
    if (slow_tree.coarse_loop != coarse || slow_tree.fine() != plan.fine)
      throw PlanError("fast and slow control trees must select the same coarse and fine loops");
    // A slow tree already sharing the fast k_c carries its own tuned m_c.
    std::optional<std::size_t> override_mc;
    if (slow_tree.cache.k_c == fast_tree.cache.k_c) override_mc = slow_tree.cache.m_c;
    auto [f, s] = harmonize_trees(fast_tree.cache, slow_tree.cache, coarse, override_mc, topo.clusters[1]);
    ControlTree ft = fast_tree, st = slow_tree;
    ft.cache = f;
    st.cache = s;
    if (plan.shared_b() && f.n_r != s.n_r)
      throw PlanError("a shared B_c (coarse Loop 3) needs the same n_r in both trees");
    plan.trees = {ft, st};
  } else {
    plan.trees = {fast_tree};
  }

  // Groups: one per cluster when a coarse loop is split, otherwise everybody together.
  const bool per_cluster = coarse.has_value() && two_clusters;
  std::size_t next_thread = 0;
  if (per_cluster) {
    for (std::size_t c = 0; c < 2; ++c) {
      GroupPlan g;
      g.first_thread = next_thread;
      g.thread_count = topo.clusters[c].core_count;
      g.tree = want_trees == 2 ? c : 0;
      g.core_class = topo.clusters[c].core_class;
      next_thread += g.thread_count;
      plan.groups.push_back(g);
    }
  } else {
    GroupPlan g;
    g.first_thread = 0;
    g.thread_count = topo.total_cores();
    g.tree = 0;
    if (!two_clusters) g.core_class = topo.clusters[0].core_class;
    plan.groups.push_back(g);
  }

  // Coarse partition.
  const bool on_rows = coarse && *coarse == 3;
  const std::size_t extent = on_rows ? req.m : req.n;
  if (plan.groups.size() == 1) {
    plan.groups[0].coarse = {0, extent};
  } else if (plan.dynamic) {
    plan.chunks = {plan.trees[plan.groups[0].tree].cache.m_c, plan.trees[plan.groups[1].tree].cache.m_c};
  } else {
    const auto& c0 = plan.trees[plan.groups[0].tree].cache;
    const auto& c1 = plan.trees[plan.groups[1].tree].cache;
    const std::size_t align = on_rows ? std::lcm(c0.m_r, c1.m_r) : std::lcm(c0.n_r, c1.n_r);
    if (policy == Policy::Sss) {
      const auto parts = split_even(extent, 2, align);
      plan.groups[0].coarse = parts[0];
      plan.groups[1].coarse = parts[1];
    } else {
      const auto [fast, slow] = split_ratio(extent, req.ratio, align);
      plan.groups[0].coarse = fast;
      plan.groups[1].coarse = slow;
    }
  }

  // Threads, fast cluster first.
  std::size_t tid = 0;
  for (std::size_t c = 0; c < topo.clusters.size(); ++c) {
    for (std::size_t i = 0; i < topo.clusters[c].core_count; ++i, ++tid) {
      ThreadPlan t;
      t.thread = tid;
      t.core_class = topo.clusters[c].core_class;
      t.cluster = c;
      t.slowdown = topo.clusters[c].emulated_slowdown;
      t.group = per_cluster ? c : 0;
      const auto& g = plan.groups[t.group];
      t.rank = tid - g.first_thread;
      t.leader = tid == g.leader();
      fill_fine(t, plan.trees[g.tree], g.thread_count);
      plan.threads.push_back(t);
    }
  }
  return plan;
}

}  // namespace ampgemm
