#include "ampgemm/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ampgemm {

std::string_view to_string(PowerDomain d) {
  switch (d) {
    case PowerDomain::FastCluster: return "fast-cluster";
    case PowerDomain::SlowCluster: return "slow-cluster";
    case PowerDomain::Dram: return "dram";
    case PowerDomain::Other: return "other";
  }
  return "?";
}

PowerTrace parse_power_trace(std::istream& in) {
  PowerTrace trace;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    std::istringstream is(line);
    PowerSample s;
    is >> s.timestamp;
    for (auto& w : s.watts) is >> w;
    std::string extra;
    if (is.fail() || (is >> extra))
      throw std::runtime_error("power trace line " + std::to_string(lineno) +
                               ": expected '<t> <fast_W> <slow_W> <dram_W> <other_W>'");
    if (std::any_of(s.watts.begin(), s.watts.end(), [](double w) { return w < 0.0; }))
      throw std::runtime_error("power trace line " + std::to_string(lineno) + ": negative power");
    if (!trace.empty() && !(s.timestamp > trace.back().timestamp))
      throw std::runtime_error("power trace line " + std::to_string(lineno) + ": timestamps must strictly increase");
    trace.push_back(s);
  }
  return trace;
}

PowerTrace load_power_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open power trace '" + path.string() + "'");
  return parse_power_trace(in);
}

void write_power_trace(std::ostream& out, const PowerTrace& trace) {
  out << std::setprecision(17);
  for (const auto& s : trace)
    out << s.timestamp << ' ' << s.watts[0] << ' ' << s.watts[1] << ' ' << s.watts[2] << ' ' << s.watts[3] << '\n';
}

namespace {

// Power of domain d at time t, linear between samples and held at the edges.
double power_at(const PowerTrace& tr, std::size_t d, double t) {
  if (t <= tr.front().timestamp) return tr.front().watts[d];
  if (t >= tr.back().timestamp) return tr.back().watts[d];
  const auto it = std::upper_bound(tr.begin(), tr.end(), t,
                                   [](double v, const PowerSample& s) { return v < s.timestamp; });
  const PowerSample& hi = *it;
  const PowerSample& lo = *(it - 1);
  const double f = (t - lo.timestamp) / (hi.timestamp - lo.timestamp);
  return lo.watts[d] + f * (hi.watts[d] - lo.watts[d]);
}

}  // namespace

std::optional<EnergyReport> integrate_energy(const PowerTrace& trace, double t0, double t1) {
  if (!(t0 < t1)) throw std::invalid_argument("integrate_energy: empty or reversed window");
  if (trace.empty()) return std::nullopt;

  if (trace.size() > 1) {
    const double head = trace[1].timestamp - trace[0].timestamp;
    const double tail = trace.back().timestamp - trace[trace.size() - 2].timestamp;
    // Small slack for windows computed in floating point.
    const double slack = 1e-9 * std::max(1.0, std::abs(t1));
    if (t0 < trace.front().timestamp - head - slack || t1 > trace.back().timestamp + tail + slack)
      throw std::invalid_argument("integrate_energy: window extends more than one sample period past the trace");
  }

  // Breakpoints: window edges plus every sample strictly inside.
  std::vector<double> ts{t0};
  for (const auto& s : trace)
    if (s.timestamp > t0 && s.timestamp < t1) ts.push_back(s.timestamp);
  ts.push_back(t1);

  EnergyReport r;
  for (std::size_t d = 0; d < kPowerDomains; ++d) {
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      e += 0.5 * (power_at(trace, d, ts[i]) + power_at(trace, d, ts[i + 1])) * (ts[i + 1] - ts[i]);
    r.joules[d] = e;
    r.total += e;
  }
  return r;
}

ConstantPowerSampler::ConstantPowerSampler(double watts) : watts_(watts) {
  if (!(watts >= 0.0)) throw std::invalid_argument("constant power must be >= 0");
}

std::optional<EnergyReading> ConstantPowerSampler::stop(double elapsed_seconds) {
  return EnergyReading{watts_ * elapsed_seconds, watts_};
}

ReplayPowerSampler::ReplayPowerSampler(PowerTrace trace) : trace_(std::move(trace)) {}

std::optional<EnergyReading> ReplayPowerSampler::stop(double elapsed_seconds) {
  if (trace_.empty() || !(elapsed_seconds > 0.0)) return std::nullopt;
  const double t0 = trace_.front().timestamp;
  std::optional<EnergyReport> report;
  try {
    report = integrate_energy(trace_, t0, t0 + elapsed_seconds);
  } catch (const std::invalid_argument&) {
    // Region longer than the recording.
    return std::nullopt;
  }
  if (!report) return std::nullopt;
  return EnergyReading{report->total, report->total / elapsed_seconds};
}

}  // namespace ampgemm
