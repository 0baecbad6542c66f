#include "ampgemm/profile.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ampgemm/validation.hpp"

namespace ampgemm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(const std::string& value, const std::string& where) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError(where + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& value, const std::string& where) {
  std::istringstream is(value);
  double out = 0;
  if (!(is >> out) || !is.eof()) throw ConfigError(where + ": expected a number, got '" + value + "'");
  return out;
}

void assign(ClusterSpec& c, const std::string& key, const std::string& value, const std::string& where) {
  if (key == "class") c.core_class = parse_core_class(value);
  else if (key == "core_count") c.core_count = parse_count(value, where);
  else if (key == "l1d_bytes") c.l1d_bytes = parse_count(value, where);
  else if (key == "l2_bytes") c.l2_bytes = parse_count(value, where);
  else if (key == "n_c") c.cache.n_c = parse_count(value, where);
  else if (key == "k_c") c.cache.k_c = parse_count(value, where);
  else if (key == "m_c") c.cache.m_c = parse_count(value, where);
  else if (key == "m_r") c.cache.m_r = parse_count(value, where);
  else if (key == "n_r") c.cache.n_r = parse_count(value, where);
  else if (key == "emulated_slowdown") c.emulated_slowdown = parse_real(value, where);
  else throw ConfigError(where + ": unknown key '" + key + "'");
}

}  // namespace

Topology parse_profile(std::istream& in, const std::string& source_name) {
  Topology topo;
  bool open = false;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    const auto text = trim(std::string_view(line).substr(0, hash));
    if (text.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(lineno);
    if (text == "[cluster]") {
      topo.clusters.emplace_back();
      open = true;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    if (!open) {
      topo.clusters.emplace_back();
      open = true;
    }
    assign(topo.clusters.back(), trim(std::string_view(text).substr(0, eq)),
           trim(std::string_view(text).substr(eq + 1)), where);
  }

  check_topology(topo);
  for (const auto& c : topo.clusters) {
    const auto report = validate_cache_config(c.cache);
    if (!report.empty()) throw ConfigError(source_name + ": " + format_report(report));
  }
  return topo;
}

Topology load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile '" + path.string() + "'");
  return parse_profile(in, path.string());
}

void write_profile(std::ostream& out, const Topology& topo, const std::string& comment) {
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  for (std::size_t i = 0; i < topo.clusters.size(); ++i) {
    const auto& c = topo.clusters[i];
    if (i) out << '\n';
    out << "[cluster]\n"
        << "class = " << to_string(c.core_class) << '\n'
        << "core_count = " << c.core_count << '\n'
        << "l1d_bytes = " << c.l1d_bytes << '\n'
        << "l2_bytes = " << c.l2_bytes << '\n'
        << "n_c = " << c.cache.n_c << '\n'
        << "k_c = " << c.cache.k_c << '\n'
        << "m_c = " << c.cache.m_c << '\n'
        << "m_r = " << c.cache.m_r << '\n'
        << "n_r = " << c.cache.n_r << '\n'
        << "emulated_slowdown = " << std::setprecision(17) << c.emulated_slowdown << '\n';
  }
}

void save_profile(const std::filesystem::path& path, const Topology& topo, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write profile '" + path.string() + "'");
  write_profile(out, topo, comment);
}

ClusterSpec load_cluster(const std::filesystem::path& path) {
  auto topo = load_profile(path);
  if (topo.clusters.size() != 1)
    throw ConfigError("'" + path.string() + "' must describe exactly one cluster");
  return topo.clusters.front();
}

}  // namespace ampgemm
