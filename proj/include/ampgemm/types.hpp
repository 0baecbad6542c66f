#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ampgemm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid blocking parameters, topology or machine profile.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operand shapes do not conform (A is m x k, B is k x n, C is m x n).
class ConformanceError : public Error {
 public:
  using Error::Error;
};

// A work plan cannot be built for the requested policy/tree/topology combination.
class PlanError : public Error {
 public:
  using Error::Error;
};

// Blocking parameters for one core class, all counted in elements.
struct CacheConfig {
  std::size_t n_c = 4096;
  std::size_t k_c = 256;
  std::size_t m_c = 64;
  std::size_t m_r = 4;
  std::size_t n_r = 4;

  friend bool operator==(const CacheConfig&, const CacheConfig&) = default;
};

enum class CoreClass { Fast, Slow };

std::string_view to_string(CoreClass c);
CoreClass parse_core_class(std::string_view s);

struct ClusterSpec {
  CoreClass core_class = CoreClass::Fast;
  std::size_t core_count = 1;
  std::size_t l1d_bytes = 32 * 1024;
  std::size_t l2_bytes = 2 * 1024 * 1024;
  CacheConfig cache;
  // 1.0 means no emulation. Values above 1 busy-pad every micro-kernel call.
  double emulated_slowdown = 1.0;

  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

// At most two clusters; when two are present their classes differ.
struct Topology {
  std::vector<ClusterSpec> clusters;

  std::size_t total_cores() const;
  const ClusterSpec* find(CoreClass c) const;
};

// Throws ConfigError when the topology shape is not supported.
void check_topology(const Topology& topo);

// Loop identifiers follow the five-loop nest: 1 = j_c (n_c), 2 = p_c (k_c),
// 3 = i_c (m_c), 4 = j_r (n_r), 5 = i_r (m_r).
using LoopId = int;

// Subset of {4, 5} selecting the intra-cluster loops.
struct FineLoops {
  bool loop4 = true;
  bool loop5 = false;

  bool empty() const { return !loop4 && !loop5; }
  friend bool operator==(const FineLoops&, const FineLoops&) = default;
};

std::string to_string(FineLoops f);
// Accepts "4", "5", "45" (or "4,5").
FineLoops parse_fine_loops(std::string_view s);

struct ControlTree {
  CacheConfig cache;
  // loop_degrees[l - 1] is the parallel degree of Loop l.
  std::array<std::size_t, 5> loop_degrees{1, 1, 1, 1, 1};
  // 1, 3 or none. Any other value is representable so it can be reported.
  std::optional<LoopId> coarse_loop;
  // Loop ids of the fine split. Valid trees only use 4 and 5.
  std::vector<LoopId> fine_loops{4};

  std::size_t degree(LoopId loop) const { return loop_degrees.at(static_cast<std::size_t>(loop - 1)); }
  std::size_t& degree(LoopId loop) { return loop_degrees.at(static_cast<std::size_t>(loop - 1)); }
  std::size_t degree_product() const;
  FineLoops fine() const;

  friend bool operator==(const ControlTree&, const ControlTree&) = default;
};

// Builds a tree whose degrees match the topology: coarse degree = cluster count,
// fine degrees split each cluster's cores.
ControlTree make_control_tree(const CacheConfig& cache, const Topology& topo,
                              std::optional<LoopId> coarse_loop, FineLoops fine);

enum class Policy { SingleCluster, Sss, Sas, CaSas, Das, CaDas };

std::string_view to_string(Policy p);
Policy parse_policy(std::string_view s);
bool is_cache_aware(Policy p);
bool is_dynamic(Policy p);
bool is_asymmetric(Policy p);

// Half-open index range [begin, end).
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const Range&, const Range&) = default;
};

std::string to_string(const Range& r);

}  // namespace ampgemm
