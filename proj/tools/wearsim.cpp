// wearsim: run scenarios, compare operating modes, analyse session logs,
// serve live telemetry and dump packet captures.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "wearsim/dsp/export.hpp"
#include "wearsim/host/analysis.hpp"
#include "wearsim/host/compare.hpp"
#include "wearsim/host/reports.hpp"
#include "wearsim/host/telemetry.hpp"
#include "wearsim/link/packet_log.hpp"

using namespace wearsim;

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

int cmd_run(const std::string& path, const std::string& out_dir, const std::string& trace_path, bool quiet) {
  host::Scenario sc = host::load_scenario(path);
  std::string trace_file = trace_path;
  if (trace_file.empty() && sc.reports.count("trace")) {
    trace_file = (std::filesystem::path(out_dir) / sc.reports.at("trace")).string();
  }
  std::ofstream trace;
  host::SimulationOptions opts;
  if (!trace_file.empty()) {
    if (auto parent = std::filesystem::path(trace_file).parent_path(); !parent.empty()) {
      std::filesystem::create_directories(parent);
    }
    trace.open(trace_file);
    if (!trace) throw ParameterError("cannot write " + trace_file);
    opts.device_trace = &trace;
  }
  opts.record_packets = sc.reports.count("packets") > 0;
  const host::SimulationResult r = host::run_scenario(sc, opts);
  const auto written = host::write_reports(sc, r, out_dir);
  if (!quiet) {
    host::write_summary(std::cout, sc, r);
    if (sc.reports.count("alpha")) {
      const auto a = host::analyze_alpha(r.log);
      std::cout << "alpha band power ratio (closed/open): " << a.ratio << '\n';
    }
    if (sc.reports.count("ssvep")) {
      const auto s = host::classify_trials(r.log);
      std::cout << "ssvep: " << s.correct() << "/" << s.trials.size() << " trials correct (" << s.source << " bins)\n";
    }
    if (sc.reports.count("ppg")) {
      const auto p = host::analyze_ppg(r.log);
      std::cout << "ppg: " << p.beats_s.size() << " beats, mean interval " << p.mean_interval_s << " s\n";
    }
    for (const auto& w : written) std::cout << "wrote " << w.string() << '\n';
    if (!trace_file.empty()) std::cout << "wrote " << trace_file << '\n';
  }
  return 0;
}

int cmd_compare(const std::vector<int>& rates, int channels, double duration, const std::string& csv) {
  host::CompareOptions opts;
  opts.duration_s = duration;
  const auto rows = host::compare_modes(rates, channels, opts);
  host::print_compare_table(std::cout, rows);
  if (!csv.empty()) {
    std::ofstream os(csv);
    if (!os) throw ParameterError("cannot write " + csv);
    host::write_compare_csv(os, rows);
  }
  return 0;
}

int cmd_analyze(const std::string& path, int channel, const std::string& psd_out, const std::string& spec_out) {
  const host::SessionLog log = host::load_session(path);
  std::cout << "session " << log.scenario << ": " << log.samples.size() << " sample records, " << log.bins.size()
            << " bin records, " << log.lost_packets() << " packets lost\n";
  bool has_alpha = false;
  bool has_trials = false;
  for (const auto& m : log.marks) {
    if (m.label == "eyes_closed") has_alpha = true;
    if (!m.label.empty() && std::isdigit(static_cast<unsigned char>(m.label[0]))) has_trials = true;
  }
  const bool has_eeg = !log.samples.empty() && !log.samples.front().eeg.empty();
  const bool has_ppg = !log.samples.empty() && !log.samples.front().ppg.empty();
  if (has_alpha && has_eeg) {
    const auto a = host::analyze_alpha(log, channel);
    host::write_alpha_report(std::cout, a);
  }
  if (has_trials && (has_eeg || !log.bins.empty())) {
    host::write_ssvep_report(std::cout, host::classify_trials(log));
  }
  if (has_ppg) {
    const auto p = host::analyze_ppg(log);
    std::cout << "ppg beats " << p.beats_s.size() << ", mean interval " << p.mean_interval_s << " s, "
              << p.heart_rate_bpm << " bpm\n";
  }
  if (has_eeg && (!psd_out.empty() || !spec_out.empty())) {
    const auto x = host::eeg_series(log, channel);
    const Eigen::Index n = dsp::next_power_of_two(static_cast<Eigen::Index>(std::llround(x.fs)));
    if (!psd_out.empty()) {
      std::ofstream os(psd_out);
      dsp::write_psd_csv(os, dsp::psd(x.values, x.fs, n, n / 2));
    }
    if (!spec_out.empty()) {
      std::ofstream os(spec_out);
      dsp::write_spectrogram_csv(os, dsp::spectrogram(x.values, x.fs, n, 3 * n / 4));
    }
  }
  return 0;
}

int cmd_serve(int port, const std::string& scenario_path, double speed, double duration) {
  host::Scenario sc;
  if (!scenario_path.empty()) {
    sc = host::load_scenario(scenario_path);
  } else {
    sc.name = "live";
    sc.duration_s = duration;
    sc.source.kind = host::SourceKind::BACKGROUND;
    sc.source.source_fs = 4000;
  }
  if (duration > 0) sc.duration_s = duration;

  host::TelemetryServer server(static_cast<std::uint16_t>(port));
  host::TelemetryBridge bridge(server);
  host::SimulationOptions opts;
  opts.observer = &bridge;
  opts.log_samples = false;
  host::Simulation sim(sc, opts);
  bridge.attach(&sim);
  server.set_greeting({{"type", "hello"},
                       {"version", 1},
                       {"mode", device::to_string(sim.device().mode())},
                       {"config", host::config_json(sim.host_config())}});
  std::cout << "telemetry on 127.0.0.1:" << server.port() << " (scenario " << sc.name << ", " << sc.duration_s
            << " s simulated)" << std::endl;

  std::signal(SIGINT, [](int) { g_interrupted = 1; });
  std::signal(SIGTERM, [](int) { g_interrupted = 1; });
  const SimTime step = SimTime::from_ms(20);
  const auto wall_start = std::chrono::steady_clock::now();
  while (sim.now() < sim.end() && !g_interrupted) {
    for (auto& in : server.take_commands()) {
      const std::uint16_t id = sim.submit(in.command);
      server.send_to(in.client, {{"type", "submitted"}, {"id", id}, {"command", host::format_command(in.command)}});
    }
    sim.run_until(sim.now() + step);
    bridge.flush();
    if (speed > 0) {
      const auto target = wall_start + std::chrono::duration<double>(sim.now().seconds() / speed);
      std::this_thread::sleep_until(target);
    }
  }
  server.stop();
  return 0;
}

int cmd_hexdump(const std::string& path, std::size_t limit) {
  auto records = link::load_packet_log(path);
  if (limit > 0 && records.size() > limit) records.resize(limit);
  link::hexdump(std::cout, records);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wearable biosignal platform simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = ".";
  std::string trace;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Directory for reports");
  run->add_option("--trace", trace, "Write the device debug trace here");
  run->add_flag("--quiet", quiet, "Suppress the summary");

  std::vector<int> rates{250, 500, 1000, 2000, 4000};
  int channels = 8;
  double cmp_duration = 5.0;
  std::string csv;
  auto* compare = app.add_subcommand("compare-modes", "Streaming vs edge power and bandwidth table");
  compare->add_option("--fs", rates, "Sample rates")->delimiter(',');
  compare->add_option("--channels", channels, "Active EEG channels")->check(CLI::Range(0, 8));
  compare->add_option("--duration", cmp_duration, "Simulated seconds per row");
  compare->add_option("--csv", csv, "Also write the table as CSV");

  std::string log_path;
  int channel = 0;
  std::string psd_out;
  std::string spec_out;
  auto* analyze = app.add_subcommand("analyze", "Analyse a session log");
  analyze->add_option("log", log_path, "Session log (.csv or binary)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--channel", channel, "EEG channel");
  analyze->add_option("--psd", psd_out, "Write the PSD of the channel");
  analyze->add_option("--spectrogram", spec_out, "Write the spectrogram of the channel");

  int port = 7878;
  std::string serve_scenario;
  double speed = 1.0;
  double serve_duration = 0.0;
  auto* serve = app.add_subcommand("serve", "Serve live telemetry for the dashboard");
  serve->add_option("--port", port, "TCP port (0 for any)")->check(CLI::Range(0, 65535));
  serve->add_option("--scenario", serve_scenario, "Scenario to run")->check(CLI::ExistingFile);
  serve->add_option("--speed", speed, "Simulated seconds per wall second (0: unpaced)");
  serve->add_option("--duration", serve_duration, "Simulated seconds (default: scenario, or 3600)");

  std::string capture;
  std::size_t limit = 0;
  auto* hex = app.add_subcommand("hexdump", "Print a packet capture");
  hex->add_option("log", capture, "Packet log")->required()->check(CLI::ExistingFile);
  hex->add_option("--limit", limit, "Print at most this many packets");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scenario, out_dir, trace, quiet);
    if (*compare) return cmd_compare(rates, channels, cmp_duration, csv);
    if (*analyze) return cmd_analyze(log_path, channel, psd_out, spec_out);
    if (*serve) return cmd_serve(port, serve_scenario, speed, serve_scenario.empty() && serve_duration <= 0 ? 3600.0 : serve_duration);
    if (*hex) return cmd_hexdump(capture, limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
