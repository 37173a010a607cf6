#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wearsim/device/config.hpp"
#include "wearsim/host/simulation.hpp"

namespace wearsim::host {

struct CompareOptions {
  double duration_s = 5.0;
  double warmup_s = 1.5;  // excluded from the averages; covers the edge window fill
  std::uint64_t seed = 1;
  double link_bps = 330000.0;
};

struct CompareRow {
  device::DeviceMode mode = device::DeviceMode::STREAMING;
  int fs = 0;
  int channels = 0;
  double offered_bps = 0.0;
  double delivered_bps = 0.0;
  std::size_t drops = 0;
  double total_mw = 0.0;
  double uj_per_sample = 0.0;
  bool feasible = true;  // offered load fits under the link cap
};

/// Streaming and edge rows for each rate, each measured over a short
/// simulated run after warm-up.
std::vector<CompareRow> compare_modes(const std::vector<int>& fs_list, int channels, const CompareOptions& opts = {});
CompareRow measure_mode(device::DeviceMode mode, const device::DeviceConfig& cfg, const CompareOptions& opts = {});

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);
void print_compare_table(std::ostream& os, const std::vector<CompareRow>& rows);

/// Per-domain energy and average power, overall and per device mode.
void write_power_report(std::ostream& os, const SimulationResult& r);
/// Offered and delivered throughput of the run's configuration.
void write_bandwidth_report(std::ostream& os, const Scenario& sc, const SimulationResult& r);

}  // namespace wearsim::host
