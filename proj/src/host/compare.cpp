#include "wearsim/host/compare.hpp"

#include <iomanip>
#include <ostream>

#include "wearsim/device/energy.hpp"
#include "wearsim/link/bandwidth.hpp"

namespace wearsim::host {

CompareRow measure_mode(device::DeviceMode mode, const device::DeviceConfig& cfg, const CompareOptions& opts) {
  require(mode == device::DeviceMode::STREAMING || mode == device::DeviceMode::EDGE_COMPUTE,
          "only measurement modes can be compared");
  require(opts.duration_s > opts.warmup_s && opts.warmup_s >= 0.0, "duration must exceed warm-up");
  Scenario sc;
  sc.name = "compare";
  sc.seed = opts.seed;
  sc.duration_s = opts.duration_s;
  sc.device = cfg;
  sc.channel.max_payload_throughput = opts.link_bps;
  device::HostCommand start;
  start.kind = device::CommandKind::START;
  start.mode = mode;
  start.id = 1;
  sc.commands.push_back({SimTime{}, start, 0});

  SimulationOptions sim_opts;
  sim_opts.log_samples = false;
  Simulation sim(sc, SourceSet{}, sim_opts);
  sim.run_until(SimTime::from_seconds(opts.warmup_s));
  const double e0 = sim.ledger().total_uj();
  const link::LinkStats s0 = sim.link_stats();
  sim.run();
  const double e1 = sim.ledger().total_uj();
  const link::LinkStats s1 = sim.link_stats();
  const double span = opts.duration_s - opts.warmup_s;

  CompareRow row;
  row.mode = mode;
  row.fs = cfg.fs;
  row.channels = cfg.eeg_channels;
  row.offered_bps = mode == device::DeviceMode::STREAMING ? link::streaming_throughput(cfg) : link::edge_throughput(cfg);
  row.delivered_bps = (s1.delivered_bits - s0.delivered_bits) / span;
  row.drops = s1.dropped - s0.dropped;
  row.total_mw = (e1 - e0) / span / 1000.0;
  row.uj_per_sample = device::energy_per_sample_uj(row.total_mw, cfg.fs, cfg.eeg_channels);
  row.feasible = row.offered_bps <= opts.link_bps;
  return row;
}

std::vector<CompareRow> compare_modes(const std::vector<int>& fs_list, int channels, const CompareOptions& opts) {
  std::vector<CompareRow> rows;
  for (int fs : fs_list) {
    device::DeviceConfig cfg;
    cfg.fs = fs;
    cfg.eeg_channels = channels;
    cfg.validate();
    rows.push_back(measure_mode(device::DeviceMode::STREAMING, cfg, opts));
    rows.push_back(measure_mode(device::DeviceMode::EDGE_COMPUTE, cfg, opts));
  }
  return rows;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << std::setprecision(10) << "mode,fs,channels,offered_bps,delivered_bps,drops,total_mw,uj_per_sample,feasible\n";
  for (const auto& r : rows) {
    os << device::to_string(r.mode) << ',' << r.fs << ',' << r.channels << ',' << r.offered_bps << ','
       << r.delivered_bps << ',' << r.drops << ',' << r.total_mw << ',' << r.uj_per_sample << ','
       << (r.feasible ? "yes" : "no") << '\n';
  }
}

void print_compare_table(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << std::left << std::setw(14) << "mode" << std::right << std::setw(7) << "fs" << std::setw(4) << "ch"
     << std::setw(12) << "offered" << std::setw(12) << "delivered" << std::setw(8) << "drops" << std::setw(10) << "mW"
     << std::setw(12) << "uJ/sample" << "  note\n";
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << device::to_string(r.mode) << std::right << std::setw(7) << r.fs << std::setw(4)
       << r.channels << std::setw(12) << std::setprecision(0) << r.offered_bps << std::setw(12) << r.delivered_bps
       << std::setw(8) << r.drops << std::setw(10) << std::setprecision(2) << r.total_mw << std::setw(12)
       << std::setprecision(3) << r.uj_per_sample << "  " << (r.feasible ? "" : "infeasible: above link cap") << '\n';
  }
  os << std::defaultfloat << "flops convention: " << device::ClusterCostModel::flops_convention() << '\n';
}

void write_power_report(std::ostream& os, const SimulationResult& r) {
  os << std::setprecision(10) << "scope,domain,seconds,energy_uj,avg_mw\n";
  const double total_s = r.ledger.elapsed_s;
  for (device::Domain d : device::kAllDomains) {
    const double e = device::at(r.ledger.energy_uj, d);
    os << "total," << device::to_string(d) << ',' << total_s << ',' << e << ',' << (total_s > 0 ? e / total_s / 1000.0 : 0.0)
       << '\n';
  }
  os << "total,ALL," << total_s << ',' << r.ledger.total_uj() << ',' << r.ledger.average_power_mw() << '\n';
  for (const auto& [mode, totals] : r.by_mode) {
    const double s = totals.seconds;
    for (device::Domain d : device::kAllDomains) {
      const double e = device::at(totals.energy_uj, d);
      os << device::to_string(mode) << ',' << device::to_string(d) << ',' << s << ',' << e << ','
         << (s > 0 ? e / s / 1000.0 : 0.0) << '\n';
    }
    const double e = device::sum(totals.energy_uj);
    os << device::to_string(mode) << ",ALL," << s << ',' << e << ',' << (s > 0 ? e / s / 1000.0 : 0.0) << '\n';
  }
}

void write_bandwidth_report(std::ostream& os, const Scenario& sc, const SimulationResult& r) {
  const double stream = link::streaming_throughput(sc.device);
  const double edge = link::edge_throughput(sc.device);
  os << std::setprecision(10) << "metric,value\n";
  os << "streaming_bps," << stream << '\n' << "edge_bps," << edge << '\n';
  os << "reduction,";
  if (stream > 0.0) os << link::reduction_ratio(stream, edge);
  os << '\n' << "link_cap_bps," << sc.channel.max_payload_throughput << '\n';
  os << "emitted_packets," << r.link.emitted << '\n' << "delivered_packets," << r.link.delivered << '\n';
  os << "dropped_packets," << r.link.dropped << '\n' << "buffered_packets," << r.link.buffered << '\n';
  os << "delivered_bps," << (sc.duration_s > 0 ? r.link.delivered_bits / sc.duration_s : 0.0) << '\n';
  os << "host_detected_losses," << r.log.lost_packets() << '\n';
}

}  // namespace wearsim::host
