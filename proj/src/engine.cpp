#include "ampgemm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <thread>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#include <time.h>
#endif

#include "ampgemm/microkernel.hpp"
#include "ampgemm/packing.hpp"

namespace ampgemm {

namespace {

using Clock = std::chrono::steady_clock;

double thread_cpu_now() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-group slot through which a leader publishes its Loop-3 chunk.
struct alignas(64) ChunkSlot {
  std::optional<Range> chunk;
};

struct alignas(64) GroupCounters {
  std::atomic<std::size_t> packed_a{0};
  std::atomic<std::size_t> packed_b{0};
};

struct Shared {
  const WorkPlan& plan;
  ConstMatrixView a;
  ConstMatrixView b;
  MatrixView c;

  std::vector<std::vector<double>> a_buffers;  // one per group
  std::vector<std::vector<double>> b_buffers;  // one shared, or one per group
  GroupBarrier global;
  std::vector<std::unique_ptr<GroupBarrier>> group_barriers;
  std::deque<ChunkDispatcher> dispatchers;  // one per (j_c, p_c) block when dynamic
  std::vector<ChunkSlot> slots;
  std::deque<GroupCounters> counters;

  bool track = false;
  std::unique_ptr<std::atomic<std::size_t>[]> visits;
  std::unique_ptr<std::atomic<bool>[]> busy;
  std::atomic<std::size_t> concurrent_writes{0};

  Shared(const WorkPlan& p, ConstMatrixView a_, ConstMatrixView b_, MatrixView c_)
      : plan(p), a(a_), b(b_), c(c_), global(p.threads.size()) {}
};

const CacheConfig& outer_config(const WorkPlan& plan, const ThreadPlan& tp) {
  return plan.shared_b() ? plan.trees[0].cache : plan.tree_of(tp).cache;
}

std::size_t block_count(const WorkPlan& plan) {
  const auto& cfg = plan.trees[0].cache;
  return ceil_div(plan.n, cfg.n_c) * ceil_div(plan.k, cfg.k_c);
}

void track_begin(Shared& s, const MicroTileView& tile, std::size_t i0, std::size_t j0) {
  for (std::size_t j = 0; j < tile.valid_cols; ++j)
    for (std::size_t i = 0; i < tile.valid_rows; ++i) {
      const std::size_t e = (i0 + i) + (j0 + j) * s.plan.m;
      if (s.busy[e].exchange(true)) s.concurrent_writes.fetch_add(1);
      s.visits[e].fetch_add(1, std::memory_order_relaxed);
    }
}

void track_end(Shared& s, const MicroTileView& tile, std::size_t i0, std::size_t j0) {
  for (std::size_t j = 0; j < tile.valid_cols; ++j)
    for (std::size_t i = 0; i < tile.valid_rows; ++i) s.busy[(i0 + i) + (j0 + j) * s.plan.m].store(false);
}

void run_thread(Shared& s, const ThreadPlan& tp, ThreadStats& st) {
  const WorkPlan& plan = s.plan;
  const GroupPlan& group = plan.groups[tp.group];
  const CacheConfig& cfg = plan.tree_of(tp).cache;
  const CacheConfig& outer = outer_config(plan, tp);
  const KernelShape shape{cfg.m_r, cfg.n_r};
  const MicroKernelFn kernel = select_microkernel(shape);

  GroupBarrier& gb = *s.group_barriers[tp.group];
  const bool shared_b = plan.shared_b();
  GroupBarrier& bb = shared_b ? s.global : gb;
  const std::size_t b_members = shared_b ? plan.threads.size() : group.thread_count;
  const std::size_t b_rank = shared_b ? tp.thread : tp.rank;
  std::vector<double>& a_buf = s.a_buffers[tp.group];
  std::vector<double>& b_buf = s.b_buffers[shared_b ? 0 : tp.group];
  GroupCounters& counters = s.counters[tp.group];

  const Range cols = shared_b ? Range{0, plan.n} : group.coarse;
  const Range rows = shared_b ? group.coarse : Range{0, plan.m};

  std::size_t block = 0;
  for (std::size_t jc = cols.begin; jc < cols.end; jc += outer.n_c) {
    const std::size_t nc_eff = std::min(outer.n_c, cols.end - jc);
    const std::size_t b_panels = ceil_div(nc_eff, cfg.n_r);

    for (std::size_t pc = 0; pc < plan.k; pc += outer.k_c, ++block) {
      const std::size_t kc_eff = std::min(outer.k_c, plan.k - pc);

      auto t0 = Clock::now();
      const Range mine_b = even_part(b_panels, b_members, 1, b_rank);
      pack_b_panels(s.b.block(pc, jc, kc_eff, nc_eff), cfg.n_r, mine_b.begin, mine_b.end, b_buf);
      counters.packed_b.fetch_add(mine_b.size() * cfg.n_r * kc_eff * sizeof(double), std::memory_order_relaxed);
      st.busy_seconds += seconds_since(t0);
      bb.sync();

      std::size_t next_row = rows.begin;
      for (;;) {
        std::optional<Range> chunk;
        if (plan.dynamic) {
          if (tp.leader) s.slots[tp.group].chunk = s.dispatchers[block].next_chunk(tp.core_class);
          gb.sync();
          chunk = s.slots[tp.group].chunk;
        } else {
          if (next_row < rows.end) {
            chunk = Range{next_row, std::min(next_row + cfg.m_c, rows.end)};
            next_row = chunk->end;
          }
          gb.sync();
        }
        if (!chunk) break;

        const std::size_t ic = chunk->begin;
        const std::size_t mc_eff = chunk->size();
        const std::size_t a_panels = ceil_div(mc_eff, cfg.m_r);

        t0 = Clock::now();
        const Range mine_a = even_part(a_panels, group.thread_count, 1, tp.rank);
        pack_a_panels(s.a.block(ic, pc, mc_eff, kc_eff), cfg.m_r, mine_a.begin, mine_a.end, a_buf);
        counters.packed_a.fetch_add(mine_a.size() * cfg.m_r * kc_eff * sizeof(double), std::memory_order_relaxed);
        st.busy_seconds += seconds_since(t0);
        gb.sync();

        // Macro-kernel: Loop 4 over n_r columns, Loop 5 over m_r rows.
        t0 = Clock::now();
        const Range jr = tp.fine_share(4, b_panels);
        const Range ir = tp.fine_share(5, a_panels);
        for (std::size_t jt = jr.begin; jt < jr.end; ++jt) {
          const double* b_panel = b_buf.data() + jt * cfg.n_r * kc_eff;
          const std::size_t j0 = jc + jt * cfg.n_r;
          const std::size_t cols_here = std::min(cfg.n_r, nc_eff - jt * cfg.n_r);
          for (std::size_t it = ir.begin; it < ir.end; ++it) {
            const std::size_t i0 = ic + it * cfg.m_r;
            const MicroTileView tile{&s.c(i0, j0), std::min(cfg.m_r, mc_eff - it * cfg.m_r), cols_here, s.c.ld};
            if (s.track) track_begin(s, tile, i0, j0);
            kernel(a_buf.data() + it * cfg.m_r * kc_eff, b_panel, tile, kc_eff, shape, tp.slowdown);
            if (s.track) track_end(s, tile, i0, j0);
            ++st.microkernels;
          }
        }
        st.busy_seconds += seconds_since(t0);
      }

      // Group-private B_c is already free once the whole group left Loop 3.
      if (shared_b) bb.sync();
    }
  }
}

}  // namespace

GroupBarrier::GroupBarrier(std::size_t members) : members_(members) {
  if (members > 1) barrier_ = std::make_unique<std::barrier<OnPhase>>(static_cast<std::ptrdiff_t>(members), OnPhase{&phases_});
}

void GroupBarrier::sync() {
  if (barrier_) barrier_->arrive_and_wait();
}

std::size_t ExecutionStats::microkernels(CoreClass c) const {
  std::size_t total = 0;
  for (const auto& t : threads)
    if (t.core_class == c) total += t.microkernels;
  return total;
}

std::size_t ExecutionStats::total_microkernels() const {
  std::size_t total = 0;
  for (const auto& t : threads) total += t.microkernels;
  return total;
}

void default_affinity(const ThreadPlan& t, std::size_t total_threads) {
#ifdef __linux__
  const unsigned cpus = std::thread::hardware_concurrency();
  if (cpus == 0 || cpus < total_threads) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(static_cast<int>(t.thread), &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
#else
  (void)t;
  (void)total_threads;
#endif
}

void check_conformance(ConstMatrixView a, ConstMatrixView b, ConstMatrixView c) {
  if (a.rows != c.rows || b.cols != c.cols || a.cols != b.rows)
    throw ConformanceError("operands do not conform: A is " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                           ", B is " + std::to_string(b.rows) + "x" + std::to_string(b.cols) + ", C is " +
                           std::to_string(c.rows) + "x" + std::to_string(c.cols));
  const auto ld_ok = [](auto v) { return v.ld >= v.rows || v.cols == 0; };
  if (!ld_ok(a) || !ld_ok(b) || !ld_ok(c)) throw ConformanceError("leading dimension smaller than row count");
}

ExecutionStats execute_plan(const WorkPlan& plan, ConstMatrixView a, ConstMatrixView b, MatrixView c,
                            const EngineOptions& opts) {
  check_conformance(a, b, c);
  if (a.rows != plan.m || b.cols != plan.n || a.cols != plan.k)
    throw ConformanceError("operand shapes differ from the plan's m, n, k");

  ExecutionStats stats;
  for (const auto& t : plan.threads) stats.threads.push_back({t.thread, t.core_class, t.cluster, 0, 0.0});
  stats.groups.resize(plan.groups.size());
  if (plan.m == 0 || plan.n == 0 || plan.k == 0) return stats;

  Shared s(plan, a, b, c);
  for (const auto& g : plan.groups) {
    const auto& cfg = plan.trees[g.tree].cache;
    s.a_buffers.emplace_back(packed_size(cfg.m_c, cfg.m_r, cfg.k_c));
    if (!plan.shared_b()) s.b_buffers.emplace_back(packed_size(cfg.n_c, cfg.n_r, cfg.k_c));
    s.group_barriers.push_back(std::make_unique<GroupBarrier>(g.thread_count));
    s.counters.emplace_back();
  }
  if (plan.shared_b()) {
    const auto& cfg = plan.trees[0].cache;
    s.b_buffers.emplace_back(packed_size(cfg.n_c, cfg.n_r, cfg.k_c));
  }
  s.slots.resize(plan.groups.size());
  if (plan.dynamic) {
    const std::size_t blocks = block_count(plan);
    for (std::size_t i = 0; i < blocks; ++i) s.dispatchers.emplace_back(plan.m, plan.chunks);
  }
  if (opts.track_tiles) {
    const std::size_t elems = plan.m * plan.n;
    s.track = true;
    s.visits = std::make_unique<std::atomic<std::size_t>[]>(elems);
    s.busy = std::make_unique<std::atomic<bool>[]>(elems);
    for (std::size_t e = 0; e < elems; ++e) {
      s.visits[e].store(0);
      s.busy[e].store(false);
    }
  }

  const auto t0 = Clock::now();
  auto timed = [&](std::size_t i) {
    const double c0 = thread_cpu_now();
    run_thread(s, plan.threads[i], stats.threads[i]);
    stats.threads[i].cpu_seconds = thread_cpu_now() - c0;
  };
  if (plan.threads.size() == 1) {
    timed(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(plan.threads.size());
    for (std::size_t i = 0; i < plan.threads.size(); ++i) {
      workers.emplace_back([&, i] {
        if (opts.affinity) opts.affinity(plan.threads[i], plan.threads.size());
        timed(i);
      });
    }
  }
  stats.wall_seconds = seconds_since(t0);

  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    stats.groups[g].packed_a_bytes = s.counters[g].packed_a.load();
    stats.groups[g].packed_b_bytes = s.counters[g].packed_b.load();
    stats.groups[g].barrier_phases = s.group_barriers[g]->phases();
  }
  stats.global_barrier_phases = s.global.phases();
  if (s.track) {
    stats.element_visits.resize(plan.m * plan.n);
    for (std::size_t e = 0; e < stats.element_visits.size(); ++e) stats.element_visits[e] = s.visits[e].load();
    stats.concurrent_writes = s.concurrent_writes.load();
  }
  return stats;
}

ExecutionStats gemm_parallel(const GemmRequest& req, const EngineOptions& opts) {
  check_conformance(req.a, req.b, req.c);
  PlanRequest pr;
  pr.policy = req.policy;
  pr.m = req.c.rows;
  pr.n = req.c.cols;
  pr.k = req.a.cols;
  pr.topology = req.topology;
  pr.trees = req.trees;
  pr.ratio = req.ratio;
  return execute_plan(make_plan(pr), req.a, req.b, req.c, opts);
}

ExecutionStats gemm_sequential(ConstMatrixView a, ConstMatrixView b, MatrixView c, const CacheConfig& cfg) {
  check_conformance(a, b, c);
  Topology topo;
  ClusterSpec cluster;
  cluster.core_count = 1;
  cluster.cache = cfg;
  topo.clusters.push_back(cluster);

  PlanRequest pr;
  pr.policy = Policy::SingleCluster;
  pr.m = c.rows;
  pr.n = c.cols;
  pr.k = a.cols;
  pr.topology = topo;
  pr.trees = {make_control_tree(cfg, topo, std::nullopt, FineLoops{})};
  return execute_plan(make_plan(pr), a, b, c, {});
}

}  // namespace ampgemm
