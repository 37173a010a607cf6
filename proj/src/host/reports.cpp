#include "wearsim/host/reports.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "wearsim/dsp/export.hpp"
#include "wearsim/host/analysis.hpp"
#include "wearsim/host/compare.hpp"

namespace wearsim::host {

namespace {

std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw ParameterError("cannot write " + p.string());
  return os;
}

}  // namespace

void write_summary(std::ostream& os, const Scenario& sc, const SimulationResult& r) {
  os << "scenario " << sc.name << " seed " << sc.seed << " duration " << sc.duration_s << " s\n";
  for (const auto& s : r.log.states) {
    os << "  state  " << std::fixed << std::setprecision(3) << s.time.seconds() << " s  " << device::to_string(s.mode)
       << "  (" << s.cause << ")\n";
  }
  for (const auto& c : r.log.commands) {
    os << "  cmd    " << c.sent.seconds() << " s  #" << c.id << ' ' << c.text << "  -> "
       << (!c.answered ? "no answer" : c.accepted ? "ACK" : "NACK: " + c.reason) << '\n';
  }
  os << std::defaultfloat << std::setprecision(6);
  os << "link: emitted " << r.link.emitted << ", delivered " << r.link.delivered << ", dropped " << r.link.dropped
     << ", buffered " << r.link.buffered << ", host-detected losses " << r.log.lost_packets() << '\n';
  os << "edge hops: " << r.hops << " computed, " << r.skipped_hops << " skipped\n";
  os << "energy: " << r.ledger.total_uj() / 1000.0 << " mJ, average " << r.ledger.average_power_mw() << " mW\n";
  for (const auto& [mode, t] : r.by_mode) {
    if (t.seconds > 0) {
      os << "  " << device::to_string(mode) << ": " << t.seconds << " s at " << device::sum(t.energy_uj) / t.seconds / 1000.0
         << " mW\n";
    }
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
}

std::vector<std::filesystem::path> write_reports(const Scenario& sc, const SimulationResult& r,
                                                 const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  for (const auto& [kind, rel] : sc.reports) {
    if (kind == "trace") continue;
    std::filesystem::path path(rel);
    if (path.is_relative()) path = out_dir / path;
    if (kind == "log") {
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      save_session(path, r.log);
    } else if (kind == "packets") {
      auto os = open_out(path, true);
      link::write_packet_log(os, r.packets);
    } else if (kind == "psd" || kind == "spectrogram") {
      const ChannelSeries x = eeg_series(r.log, 0);
      const Eigen::Index n = dsp::next_power_of_two(static_cast<Eigen::Index>(std::llround(x.fs)));
      auto os = open_out(path);
      if (kind == "psd") {
        dsp::write_psd_csv(os, dsp::psd(x.values, x.fs, n, n / 2));
      } else {
        dsp::write_spectrogram_csv(os, dsp::spectrogram(x.values, x.fs, n, 3 * n / 4));
      }
    } else if (kind == "alpha") {
      auto os = open_out(path);
      write_alpha_report(os, analyze_alpha(r.log));
    } else if (kind == "ssvep") {
      auto os = open_out(path);
      write_ssvep_report(os, classify_trials(r.log));
    } else if (kind == "ppg") {
      auto os = open_out(path);
      write_ppg_report(os, analyze_ppg(r.log));
    } else if (kind == "power") {
      auto os = open_out(path);
      write_power_report(os, r);
    } else if (kind == "bandwidth") {
      auto os = open_out(path);
      write_bandwidth_report(os, sc, r);
    } else if (kind == "summary") {
      auto os = open_out(path);
      write_summary(os, sc, r);
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace wearsim::host
