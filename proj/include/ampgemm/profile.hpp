#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ampgemm/types.hpp"

namespace ampgemm {

// Machine profiles are plain key = value text. Each "[cluster]" section describes
// one cluster; keys before the first section header belong to an implicit cluster.
//
//   # Cortex-A15 cluster
//   [cluster]
//   class = fast
//   core_count = 4
//   l1d_bytes = 32768
//   l2_bytes = 2097152
//   n_c = 4096
//   k_c = 952
//   m_c = 152
//   m_r = 4
//   n_r = 4
//   emulated_slowdown = 1.0
//
// Parsing throws ConfigError naming the offending line. Blocking parameters are
// checked with validate_cache_config and the topology with check_topology.
Topology parse_profile(std::istream& in, const std::string& source_name = "<profile>");
Topology load_profile(const std::filesystem::path& path);

void write_profile(std::ostream& out, const Topology& topo, const std::string& comment = {});
void save_profile(const std::filesystem::path& path, const Topology& topo, const std::string& comment = {});

// Loads a profile that must describe exactly one cluster.
ClusterSpec load_cluster(const std::filesystem::path& path);

}  // namespace ampgemm
