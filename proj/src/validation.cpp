#include "ampgemm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ampgemm {

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::Loop2Race: return "LOOP2_RACE";
    case ViolationCode::BadCoarseLoop: return "BAD_COARSE_LOOP";
    case ViolationCode::BadFineLoop: return "BAD_FINE_LOOP";
    case ViolationCode::DegreeProductMismatch: return "DEGREE_PRODUCT_MISMATCH";
    case ViolationCode::McNotMultipleOfMr: return "MC_NOT_MULTIPLE_OF_MR";
    case ViolationCode::NcNotMultipleOfNr: return "NC_NOT_MULTIPLE_OF_NR";
    case ViolationCode::NonPositiveParameter: return "NONPOSITIVE_PARAMETER";
    case ViolationCode::ZeroDegree: return "ZERO_DEGREE";
    case ViolationCode::DegreeOnIdleLoop: return "DEGREE_ON_IDLE_LOOP";
    case ViolationCode::CoarseDegreeMismatch: return "COARSE_DEGREE_MISMATCH";
    case ViolationCode::UnsupportedKernelShape: return "UNSUPPORTED_KERNEL_SHAPE";
  }
  return "UNKNOWN";
}

bool has_violation(const ValidationReport& report, ViolationCode code) {
  return std::any_of(report.begin(), report.end(),
                     [code](const Violation& v) { return v.code == code; });
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream os;
  for (const auto& v : report) os << to_string(v.code) << ": " << v.message << '\n';
  return os.str();
}

ValidationReport validate_cache_config(const CacheConfig& cfg) {
  ValidationReport out;
  const auto add = [&](ViolationCode c, std::string msg) { out.push_back({c, std::move(msg)}); };
  if (cfg.n_c == 0 || cfg.k_c == 0 || cfg.m_c == 0 || cfg.m_r == 0 || cfg.n_r == 0) {
    add(ViolationCode::NonPositiveParameter, "n_c, k_c, m_c, m_r and n_r must all be >= 1");
    return out;
  }
  if (cfg.m_c % cfg.m_r != 0)
    add(ViolationCode::McNotMultipleOfMr, "m_c=" + std::to_string(cfg.m_c) +
                                              " is not a multiple of m_r=" + std::to_string(cfg.m_r));
  if (cfg.n_c % cfg.n_r != 0)
    add(ViolationCode::NcNotMultipleOfNr, "n_c=" + std::to_string(cfg.n_c) +
                                              " is not a multiple of n_r=" + std::to_string(cfg.n_r));
  if (cfg.m_r > kMaxRegisterBlock || cfg.n_r > kMaxRegisterBlock)
    add(ViolationCode::UnsupportedKernelShape,
        "m_r and n_r must not exceed " + std::to_string(kMaxRegisterBlock));
  return out;
}

ValidationReport validate_control_tree(const ControlTree& tree, const Topology& topo) {
  ValidationReport out = validate_cache_config(tree.cache);
  const auto add = [&](ViolationCode c, std::string msg) { out.push_back({c, std::move(msg)}); };

  for (LoopId l = 1; l <= 5; ++l)
    if (tree.degree(l) == 0) add(ViolationCode::ZeroDegree, "Loop " + std::to_string(l) + " has degree 0");

  if (tree.degree(2) > 1)
    add(ViolationCode::Loop2Race,
        "Loop 2 (p_c) has degree " + std::to_string(tree.degree(2)) +
            "; parallelizing it makes several threads update the same block of C concurrently");

  const bool coarse_ok = !tree.coarse_loop || *tree.coarse_loop == 1 || *tree.coarse_loop == 3;
  if (!coarse_ok)
    add(ViolationCode::BadCoarseLoop,
        "coarse loop " + std::to_string(*tree.coarse_loop) + " is not one of {1, 3, none}");

  for (auto l : tree.fine_loops)
    if (l != 4 && l != 5)
      add(ViolationCode::BadFineLoop, "fine loop " + std::to_string(l) + " is not one of {4, 5}");

  for (LoopId l : {1, 3, 4, 5}) {
    if (tree.degree(l) <= 1) continue;
    const bool coarse = tree.coarse_loop && *tree.coarse_loop == l;
    const bool fine = std::find(tree.fine_loops.begin(), tree.fine_loops.end(), l) != tree.fine_loops.end();
    if (!coarse && !fine)
      add(ViolationCode::DegreeOnIdleLoop,
          "Loop " + std::to_string(l) + " has degree " + std::to_string(tree.degree(l)) +
              " but is neither the coarse loop nor a fine loop");
  }

  if (coarse_ok && tree.coarse_loop && tree.degree(*tree.coarse_loop) != topo.clusters.size())
    add(ViolationCode::CoarseDegreeMismatch,
        "coarse Loop " + std::to_string(*tree.coarse_loop) + " has degree " +
            std::to_string(tree.degree(*tree.coarse_loop)) + " but the topology has " +
            std::to_string(topo.clusters.size()) + " cluster(s)");

  if (tree.degree_product() != topo.total_cores())
    add(ViolationCode::DegreeProductMismatch,
        "product of loop degrees is " + std::to_string(tree.degree_product()) + " but the topology has " +
            std::to_string(topo.total_cores()) + " thread(s)");
  return out;
}

CacheFitReport cache_fit_check(const CacheConfig& cfg, const ClusterSpec& cluster,
                               std::size_t elem_bytes, double occupancy) {
  CacheFitReport r;
  r.br_bytes = cfg.k_c * cfg.n_r * elem_bytes;
  r.ac_bytes = cfg.m_c * cfg.k_c * elem_bytes;
  r.br_fits = static_cast<double>(r.br_bytes) <= occupancy * static_cast<double>(cluster.l1d_bytes);
  r.ac_fits = static_cast<double>(r.ac_bytes) <= occupancy * static_cast<double>(cluster.l2_bytes);
  return r;
}

std::size_t max_mc_for_l2(std::size_t k_c, std::size_t l2_bytes, std::size_t elem_bytes,
                          std::size_t m_r, double safety) {
  if (k_c == 0 || elem_bytes == 0 || m_r == 0) return 0;
  const double bound = safety * static_cast<double>(l2_bytes) / static_cast<double>(k_c * elem_bytes);
  if (!(bound >= 0.0)) return 0;
  const auto rows = static_cast<std::size_t>(std::floor(bound));
  return rows / m_r * m_r;
}

}  // namespace ampgemm
