#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ampgemm/types.hpp"

namespace ampgemm {

enum class ViolationCode {
  Loop2Race,            // Loop 2 parallelized: concurrent updates of the same C
  BadCoarseLoop,        // coarse loop outside {1, 3, none}
  BadFineLoop,          // fine loop outside {4, 5}
  DegreeProductMismatch,
  McNotMultipleOfMr,
  NcNotMultipleOfNr,
  NonPositiveParameter,
  ZeroDegree,
  DegreeOnIdleLoop,     // degree > 1 on a loop that is neither coarse nor fine
  CoarseDegreeMismatch, // coarse degree differs from the cluster count
  UnsupportedKernelShape,
};

std::string_view to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

bool has_violation(const ValidationReport& report, ViolationCode code);
std::string format_report(const ValidationReport& report);

// Largest m_r / n_r the shipped micro-kernels support.
inline constexpr std::size_t kMaxRegisterBlock = 16;

ValidationReport validate_cache_config(const CacheConfig& cfg);
ValidationReport validate_control_tree(const ControlTree& tree, const Topology& topo);

struct CacheFitReport {
  std::size_t br_bytes = 0;  // k_c x n_r micro-panel of B, L1-resident
  std::size_t ac_bytes = 0;  // m_c x k_c macro-panel of A, L2-resident
  bool br_fits = false;
  bool ac_fits = false;

  bool fits() const { return br_fits && ac_fits; }
};

CacheFitReport cache_fit_check(const CacheConfig& cfg, const ClusterSpec& cluster,
                               std::size_t elem_bytes = sizeof(double), double occupancy = 1.0);

// Largest multiple of m_r with m_c * k_c * elem_bytes <= safety * l2_bytes; 0 when none fits.
std::size_t max_mc_for_l2(std::size_t k_c, std::size_t l2_bytes, std::size_t elem_bytes,
                          std::size_t m_r, double safety);

}  // namespace ampgemm
