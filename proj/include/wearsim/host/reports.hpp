#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wearsim/host/simulation.hpp"

namespace wearsim::host {

/// Plain-text run summary: states, commands, link and energy totals,
/// warnings, and the outcome of each requested analysis.
void write_summary(std::ostream& os, const Scenario& sc, const SimulationResult& r);

/// Write every report listed in the scenario (except the device trace,
/// which is streamed during the run). Relative paths resolve against
/// `out_dir`. Returns the files written.
std::vector<std::filesystem::path> write_reports(const Scenario& sc, const SimulationResult& r,
                                                 const std::filesystem::path& out_dir);

}  // namespace wearsim::host
