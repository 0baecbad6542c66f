#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "ampgemm/types.hpp"

namespace ampgemm {

// Splits [0, extent) into `parts` contiguous ranges. Boundaries other than `extent`
// are multiples of `align`; whole align-units are dealt out evenly with the
// remainder going to the lowest-indexed parts, and the ragged tail (extent % align)
// stays with the last part.
std::vector<Range> split_even(std::size_t extent, std::size_t parts, std::size_t align);

// Part `index` of split_even without materializing the list.
Range even_part(std::size_t extent, std::size_t parts, std::size_t align, std::size_t index);

// fast = [0, s), slow = [s, extent) with s = extent * R / (R + 1) rounded to the
// nearest multiple of align and clamped to [0, extent].
std::pair<Range, Range> split_ratio(std::size_t extent, double ratio, std::size_t align);

// Cache-aware dual trees. With coarse Loop 1 the clusters own independent A_c and
// B_c and the configs come back unchanged. With coarse Loop 3 B_c is shared, so
// the slow config adopts the fast k_c (and n_c), and its m_c becomes
// `override_mc_slow` or, when absent, max_mc_for_l2(fast k_c, slow L2, 8, m_r, 0.5).
// Throws ConfigError if the resulting slow m_c is 0 or not a multiple of m_r.
std::pair<CacheConfig, CacheConfig> harmonize_trees(const CacheConfig& fast, const CacheConfig& slow,
                                                    std::optional<LoopId> coarse_loop,
                                                    std::optional<std::size_t> override_mc_slow,
                                                    const ClusterSpec& slow_cluster);

inline constexpr double kHarmonizeL2Safety = 0.5;

// Dynamic chunk size per class: the class's m_c.
struct ChunkRule {
  std::size_t fast_mc = 0;
  std::size_t slow_mc = 0;

  std::size_t chunk(CoreClass c) const { return c == CoreClass::Fast ? fast_mc : slow_mc; }
};

// Shared Loop-3 cursor. next_chunk is the only mutating operation and is
// serialized by a mutex; the cursor never moves backwards or past extent.
class ChunkDispatcher {
 public:
  ChunkDispatcher(std::size_t extent, ChunkRule rule);

  ChunkDispatcher(const ChunkDispatcher&) = delete;
  ChunkDispatcher& operator=(const ChunkDispatcher&) = delete;

  std::optional<Range> next_chunk(CoreClass c);

  std::size_t extent() const { return extent_; }
  std::size_t cursor() const;

 private:
  mutable std::mutex mu_;
  std::size_t extent_;
  std::size_t next_ = 0;
  ChunkRule rule_;
};

// A set of threads sharing one A_c buffer (a cluster, or every thread when no
// coarse loop is split).
struct GroupPlan {
  std::size_t first_thread = 0;
  std::size_t thread_count = 0;
  std::size_t tree = 0;      // index into WorkPlan::trees
  Range coarse;              // columns (coarse Loop 1) or rows (coarse Loop 3) for static plans
  std::optional<CoreClass> core_class;  // absent when the group mixes classes

  std::size_t leader() const { return first_thread; }
};

struct ThreadPlan {
  std::size_t thread = 0;
  CoreClass core_class = CoreClass::Fast;
  std::size_t cluster = 0;  // index in the fast-first cluster order
  std::size_t group = 0;
  std::size_t rank = 0;     // position inside the group
  double slowdown = 1.0;
  std::size_t ways4 = 1, ways5 = 1;
  std::size_t rank4 = 0, rank5 = 0;
  bool leader = false;

  // Share of `tiles` micro-tiles owned by this thread along Loop 4 or Loop 5.
  Range fine_share(LoopId loop, std::size_t tiles) const;
};

struct PlanRequest {
  Policy policy = Policy::Sss;
  std::size_t m = 0, n = 0, k = 0;
  Topology topology;
  // One tree, or {fast, slow} for the cache-aware policies.
  std::vector<ControlTree> trees;
  double ratio = 1.0;
};

struct WorkPlan {
  Policy policy = Policy::Sss;
  std::size_t m = 0, n = 0, k = 0;
  std::optional<LoopId> coarse_loop;
  FineLoops fine;
  double ratio = 1.0;
  bool dynamic = false;
  ChunkRule chunks;  // meaningful when dynamic

  std::vector<ControlTree> trees;  // effective (harmonized) trees
  std::vector<ClusterSpec> clusters;  // fast first
  std::vector<GroupPlan> groups;
  std::vector<ThreadPlan> threads;

  // B_c shared by all threads (coarse Loop 3); otherwise one B_c per group.
  bool shared_b() const { return coarse_loop && *coarse_loop == 3; }
  const ControlTree& tree_of(const ThreadPlan& t) const { return trees[groups[t.group].tree]; }
};

// Topology with the fast cluster first.
Topology fast_first(const Topology& topo);

// Throws PlanError (or ConfigError for invalid configurations).
WorkPlan make_plan(const PlanRequest& req);

}  // namespace ampgemm
