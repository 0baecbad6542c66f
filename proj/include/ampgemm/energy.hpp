#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace ampgemm {

// Canonical power domains, in trace-file column order.
enum class PowerDomain : std::size_t { FastCluster = 0, SlowCluster = 1, Dram = 2, Other = 3 };
inline constexpr std::size_t kPowerDomains = 4;
std::string_view to_string(PowerDomain d);

struct PowerSample {
  double timestamp = 0.0;  // seconds, strictly increasing within a trace
  std::array<double, kPowerDomains> watts{};

  double total() const { return watts[0] + watts[1] + watts[2] + watts[3]; }
};

using PowerTrace = std::vector<PowerSample>;

// Nominal sensor period of the reference platform.
inline constexpr double kNominalSamplePeriod = 0.25;

// Text format, one sample per line: "<t> <fast_W> <slow_W> <dram_W> <other_W>".
// Blank lines and '#' comments are skipped. Throws std::runtime_error on malformed
// lines, negative watts or non-increasing timestamps.
PowerTrace parse_power_trace(std::istream& in);
PowerTrace load_power_trace(const std::filesystem::path& path);
void write_power_trace(std::ostream& out, const PowerTrace& trace);

struct EnergyReport {
  std::array<double, kPowerDomains> joules{};
  double total = 0.0;  // sum over all domains, idle cluster included
};

// Trapezoidal integral of the piecewise-linear power curve over [t0, t1]. Outside
// the trace the edge sample is held for at most one sample period; a window
// reaching further throws std::invalid_argument, as does t0 >= t1.
// Returns nullopt for an empty trace.
std::optional<EnergyReport> integrate_energy(const PowerTrace& trace, double t0, double t1);

struct EnergyReading {
  double joules = 0.0;
  double mean_watts = 0.0;
};

// Measures energy around a timed region. stop() receives the region's duration.
class PowerSampler {
 public:
  virtual ~PowerSampler() = default;
  virtual void start() {}
  virtual std::optional<EnergyReading> stop(double elapsed_seconds) = 0;
};

class NullSampler final : public PowerSampler {
 public:
  std::optional<EnergyReading> stop(double) override { return std::nullopt; }
};

// Synthesized constant draw.
class ConstantPowerSampler final : public PowerSampler {
 public:
  explicit ConstantPowerSampler(double watts);
  std::optional<EnergyReading> stop(double elapsed_seconds) override;

 private:
  double watts_;
};

// Pre-recorded trace. Each timed region is aligned with the trace start, i.e. a
// region of d seconds integrates [t_first, t_first + d].
class ReplayPowerSampler final : public PowerSampler {
 public:
  explicit ReplayPowerSampler(PowerTrace trace);
  std::optional<EnergyReading> stop(double elapsed_seconds) override;

 private:
  PowerTrace trace_;
};

}  // namespace ampgemm
