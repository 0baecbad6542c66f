#pragma once

#include <atomic>
#include <barrier>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "ampgemm/matrix.hpp"
#include "ampgemm/scheduler.hpp"
#include "ampgemm/types.hpp"

namespace ampgemm {

struct GemmRequest {
  ConstMatrixView a;  // m x k
  ConstMatrixView b;  // k x n
  MatrixView c;       // m x n, updated as C += A * B
  Topology topology;
  Policy policy = Policy::Sss;
  std::vector<ControlTree> trees;
  double ratio = 1.0;
};

struct ThreadStats {
  std::size_t thread = 0;
  CoreClass core_class = CoreClass::Fast;
  std::size_t cluster = 0;
  std::size_t microkernels = 0;
  double busy_seconds = 0.0;  // packing + macro-kernel, barrier waits excluded
  double cpu_seconds = 0.0;   // thread CPU clock over the whole run
};

struct GroupStats {
  std::size_t packed_a_bytes = 0;
  std::size_t packed_b_bytes = 0;
  std::size_t barrier_phases = 0;
};

struct ExecutionStats {
  std::vector<ThreadStats> threads;
  std::vector<GroupStats> groups;
  std::size_t global_barrier_phases = 0;
  double wall_seconds = 0.0;

  // Filled when EngineOptions::track_tiles is set: micro-kernel visits per element
  // of C (column-major, m x n) and the number of detected overlapping writers.
  std::vector<std::size_t> element_visits;
  std::size_t concurrent_writes = 0;

  std::size_t microkernels(CoreClass c) const;
  std::size_t total_microkernels() const;
};

// Binds a worker to a core. The default pins thread t to CPU t when the host has
// at least as many CPUs as workers and leaves threads unbound otherwise.
using AffinityHook = std::function<void(const ThreadPlan&, std::size_t total_threads)>;
void default_affinity(const ThreadPlan& t, std::size_t total_threads);

struct EngineOptions {
  AffinityHook affinity = default_affinity;
  bool track_tiles = false;
};

// Barrier for the threads of one group, counting completed phases. A group of one
// thread never blocks.
class GroupBarrier {
 public:
  explicit GroupBarrier(std::size_t members);

  void sync();
  std::size_t members() const { return members_; }
  std::size_t phases() const { return phases_.load(std::memory_order_relaxed); }

 private:
  struct OnPhase {
    std::atomic<std::size_t>* phases;
    void operator()() noexcept { phases->fetch_add(1, std::memory_order_relaxed); }
  };

  std::size_t members_;
  std::atomic<std::size_t> phases_{0};
  std::unique_ptr<std::barrier<OnPhase>> barrier_;
};

// Single-threaded five-loop GEMM: j_c -> p_c -> i_c -> j_r -> i_r.
ExecutionStats gemm_sequential(ConstMatrixView a, ConstMatrixView b, MatrixView c, const CacheConfig& cfg);

// Builds the plan for the request and runs it.
ExecutionStats gemm_parallel(const GemmRequest& req, const EngineOptions& opts = {});

// Runs an existing plan; its m, n, k must match the operands.
ExecutionStats execute_plan(const WorkPlan& plan, ConstMatrixView a, ConstMatrixView b, MatrixView c,
                            const EngineOptions& opts = {});

// Throws ConformanceError unless A is m x k, B is k x n and C is m x n.
void check_conformance(ConstMatrixView a, ConstMatrixView b, ConstMatrixView c);

}  // namespace ampgemm
