#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ampgemm/energy.hpp"
#include "ampgemm/scheduler.hpp"
#include "ampgemm/types.hpp"

namespace ampgemm {

// Everything needed to turn a problem size into a plan: policy knobs plus the
// cluster descriptions loaded from machine profiles.
struct RunConfig {
  Policy policy = Policy::Sss;
  double ratio = 1.0;
  std::optional<LoopId> coarse = 1;
  FineLoops fine;
  ClusterSpec fast;
  std::optional<ClusterSpec> slow;
  // Explicit per-loop degrees replacing the ones derived from the topology.
  std::optional<std::array<std::size_t, 5>> degrees;
};

struct RunSetup {
  Topology topology;
  std::vector<ControlTree> trees;
};

// Policy single keeps only the fast cluster and drops the coarse loop.
RunSetup make_setup(const RunConfig& cfg);
PlanRequest make_plan_request(const RunConfig& cfg, std::size_t m, std::size_t n, std::size_t k);

struct ProblemSize {
  std::size_t m = 0, n = 0, k = 0;
  friend bool operator==(const ProblemSize&, const ProblemSize&) = default;
};

// "96,128" (square) or "64x32x16" entries; "lo:hi:step" for ranges.
std::vector<ProblemSize> parse_sizes(const std::string& list);
std::vector<ProblemSize> parse_size_range(const std::string& range);

struct BenchOptions {
  std::size_t repetitions = 3;
  unsigned seed = 1;
  // When set, timings are synthesized as 2mnk / (rate * 1e9) instead of measured.
  std::optional<double> synthetic_gflops;
};

struct BenchRecord {
  Policy policy = Policy::Sss;
  double ratio = 1.0;
  std::optional<LoopId> coarse;
  FineLoops fine;
  std::size_t m = 0, n = 0, k = 0;
  double time_s = 0.0;
  double gflops = 0.0;
  std::optional<double> joules;
  std::optional<double> gflops_per_watt;
  std::size_t uk_fast = 0;
  std::size_t uk_slow = 0;
};

// Per size: one warm-up run, then `repetitions` timed runs with the sampler
// started and stopped around each. The run at the lower median time is reported.
std::vector<BenchRecord> run_bench(const std::vector<ProblemSize>& sizes, const RunConfig& cfg,
                                   const BenchOptions& opts, PowerSampler& sampler);

// Fills the derived columns from flops, time and energy.
void finish_record(BenchRecord& r, const std::optional<EnergyReading>& energy);

inline constexpr const char* kCsvHeader =
    "policy,ratio,coarse,fine,m,n,k,time_s,gflops,joules,gflops_per_watt,uk_fast,uk_slow";
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::string csv_row(const BenchRecord& r);

struct Combination {
  Policy policy = Policy::Sss;
  double ratio = 1.0;
  std::optional<LoopId> coarse;
  FineLoops fine;
};

std::string to_string(const Combination& c);

// Every legal policy x coarse x fine combination (dynamic policies only on Loop 3).
std::vector<Combination> default_combinations(double ratio, bool two_clusters);

struct ValidationRow {
  Combination combo;
  ProblemSize size;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool ok = false;
  std::string error;  // set when the plan was rejected
};

// Runs each combination at each size against the naive triple loop.
std::vector<ValidationRow> validate_combinations(const RunConfig& base, const std::vector<Combination>& combos,
                                                 const std::vector<ProblemSize>& sizes, unsigned seed);

// Iteration-space partition per loop and thread, one row per (loop, range, threads).
std::string describe_plan(const WorkPlan& plan);

// "Th0-Th3", "Th5", or comma-separated runs.
std::string thread_list(const std::vector<std::size_t>& threads);

}  // namespace ampgemm
