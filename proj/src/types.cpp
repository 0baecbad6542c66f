#include "ampgemm/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ampgemm {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

std::string_view to_string(CoreClass c) { return c == CoreClass::Fast ? "fast" : "slow"; }

CoreClass parse_core_class(std::string_view s) {
  const auto v = lower(s);
  if (v == "fast" || v == "big") return CoreClass::Fast;
  if (v == "slow" || v == "little") return CoreClass::Slow;
  throw ConfigError("unknown core class '" + std::string(s) + "' (expected fast or slow)");
}

std::size_t Topology::total_cores() const {
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.core_count;
  return total;
}

const ClusterSpec* Topology::find(CoreClass c) const {
  for (const auto& cl : clusters)
    if (cl.core_class == c) return &cl;
  return nullptr;
}

void check_topology(const Topology& topo) {
  if (topo.clusters.empty() || topo.clusters.size() > 2)
    throw ConfigError("TOPOLOGY_SHAPE: expected one or two clusters, got " +
                      std::to_string(topo.clusters.size()));
  if (topo.clusters.size() == 2 && topo.clusters[0].core_class == topo.clusters[1].core_class)
    throw ConfigError("TOPOLOGY_SHAPE: the two clusters must have different core classes");
  for (const auto& c : topo.clusters) {
    if (c.core_count == 0) throw ConfigError("TOPOLOGY_SHAPE: cluster with zero cores");
    if (c.l1d_bytes == 0 || c.l2_bytes == 0)
      throw ConfigError("CACHE_SIZE: l1d_bytes and l2_bytes must be positive");
    if (!(c.emulated_slowdown >= 1.0) || !std::isfinite(c.emulated_slowdown))
      throw ConfigError("EMULATED_SLOWDOWN: must be a finite value >= 1.0");
  }
}

std::string to_string(FineLoops f) {
  if (f.loop4 && f.loop5) return "45";
  if (f.loop5) return "5";
  if (f.loop4) return "4";
  return "none";
}

FineLoops parse_fine_loops(std::string_view s) {
  const auto v = lower(s);
  if (v == "4") return {true, false};
  if (v == "5") return {false, true};
  if (v == "45" || v == "4,5" || v == "54") return {true, true};
  throw ConfigError("unknown fine loop set '" + std::string(s) + "' (expected 4, 5 or 45)");
}

std::size_t ControlTree::degree_product() const {
  std::size_t p = 1;
  for (auto d : loop_degrees) p *= d;
  return p;
}

FineLoops ControlTree::fine() const {
  FineLoops f{false, false};
  for (auto l : fine_loops) {
    if (l == 4) f.loop4 = true;
    if (l == 5) f.loop5 = true;
  }
  return f;
}

ControlTree make_control_tree(const CacheConfig& cache, const Topology& topo,
                              std::optional<LoopId> coarse_loop, FineLoops fine) {
  ControlTree t;
  t.cache = cache;
  t.coarse_loop = coarse_loop;
  t.fine_loops.clear();
  if (fine.loop4) t.fine_loops.push_back(4);
  if (fine.loop5) t.fine_loops.push_back(5);

  const std::size_t total = topo.total_cores();
  std::size_t coarse_degree = 1;
  if (coarse_loop && (*coarse_loop == 1 || *coarse_loop == 3)) {
    coarse_degree = std::max<std::size_t>(1, topo.clusters.size());
    t.degree(*coarse_loop) = coarse_degree;
  }
  const std::size_t per_group = std::max<std::size_t>(1, total / coarse_degree);
  if (fine.loop4 && fine.loop5) {
    // Most square factorization with the Loop-4 factor not larger than the Loop-5 one.
    std::size_t d4 = 1;
    for (std::size_t d = 1; d * d <= per_group; ++d)
      if (per_group % d == 0) d4 = d;
    t.degree(4) = d4;
    t.degree(5) = per_group / d4;
  } else if (fine.loop5) {
    t.degree(5) = per_group;
  } else if (fine.loop4) {
    t.degree(4) = per_group;
  }
  return t;
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::SingleCluster: return "single";
    case Policy::Sss: return "sss";
    case Policy::Sas: return "sas";
    case Policy::CaSas: return "ca-sas";
    case Policy::Das: return "das";
    case Policy::CaDas: return "ca-das";
  }
  return "?";
}

Policy parse_policy(std::string_view s) {
  auto v = lower(s);
  std::replace(v.begin(), v.end(), '_', '-');
  if (v == "single" || v == "single-cluster") return Policy::SingleCluster;
  if (v == "sss") return Policy::Sss;
  if (v == "sas") return Policy::Sas;
  if (v == "ca-sas") return Policy::CaSas;
  if (v == "das") return Policy::Das;
  if (v == "ca-das") return Policy::CaDas;
  throw ConfigError("unknown policy '" + std::string(s) + "'");
}

bool is_cache_aware(Policy p) { return p == Policy::CaSas || p == Policy::CaDas; }
bool is_dynamic(Policy p) { return p == Policy::Das || p == Policy::CaDas; }
bool is_asymmetric(Policy p) { return p != Policy::SingleCluster && p != Policy::Sss; }

std::string to_string(const Range& r) {
  return "[" + std::to_string(r.begin) + "," + std::to_string(r.end) + ")";
}

}  // namespace ampgemm
