#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ampgemm/types.hpp"

namespace ampgemm {

// Two-phase (m_c, k_c) search: a full coarse grid, then a square neighbourhood of
// half-width `radius` refinement steps around the coarse winner.
struct SearchSpec {
  std::vector<std::size_t> mc_grid;  // ascending multiples of m_r
  std::vector<std::size_t> kc_grid;  // ascending
  std::size_t radius = 2;
  std::size_t refine_step_m = 8;
  std::size_t refine_step_k = 8;
  std::size_t repetitions = 1;  // evaluator calls per point; the median score is kept
  std::size_t problem_size = 1024;
  double occupancy = 1.0;  // cache_fit_check occupancy used for pre-filtering

  // Grid defaults: m_c in {8..256 step 24}, k_c in {64..1024 step 96}, radius 2,
  // refinement step a quarter of the coarse step.
  static SearchSpec defaults();
};

using TunePoint = std::pair<std::size_t, std::size_t>;  // (m_c, k_c)

enum class TunePhase { Coarse, Refine, Filtered };
std::string_view to_string(TunePhase p);

struct TuneLogEntry {
  std::size_t m_c = 0;
  std::size_t k_c = 0;
  TunePhase phase = TunePhase::Coarse;
  std::optional<double> score;  // absent for filtered points
};

struct TuneResult {
  TunePoint best{0, 0};
  double best_score = 0.0;
  std::map<TunePoint, double> surface;  // every evaluated point
  std::vector<TuneLogEntry> log;        // in evaluation order, filtered points included
  TunePoint coarse_best{0, 0};
};

// Higher is better (GFLOPS, or a negated cost).
using Evaluator = std::function<double(std::size_t m_c, std::size_t k_c)>;

class TuneError : public Error {
 public:
  using Error::Error;
};

// Points failing cache_fit_check on `cluster` (n_c fixed at 4096, the cluster's
// m_r/n_r) or whose m_c is not a multiple of m_r are logged as filtered and never
// evaluated. Ties go to the smaller A_c footprint, then the smaller m_c.
// Throws TuneError if every point is filtered.
TuneResult tune(const SearchSpec& spec, const Evaluator& evaluator, const ClusterSpec& cluster);

inline constexpr std::size_t kTuningNc = 4096;

// 2 * r^3 / seconds / 1e9
double gemm_gflops(std::size_t r, double seconds);

// Times one square GEMM of order r with the candidate blocking and returns seconds.
using GemmTimer = std::function<double(const CacheConfig& cfg)>;

// Timer that runs the engine on `cluster` alone (policy single, Loop-4 split).
GemmTimer engine_timer(const ClusterSpec& cluster, std::size_t r, unsigned seed = 1);

// Evaluator returning GFLOPS from the median of `repetitions` timings.
Evaluator timed_evaluator(GemmTimer timer, std::size_t r, const ClusterSpec& cluster, std::size_t repetitions);

// One JSON object per line: {"m_c":..,"k_c":..,"score":..,"phase":".."}.
void write_tune_log(std::ostream& out, const TuneResult& result);

}  // namespace ampgemm
