// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "wearsim/device/cost_model.hpp"
#include "wearsim/device/energy.hpp"
#include "wearsim/device/state_machine.hpp"
#include "wearsim/dsp/spectral.hpp"
#include "wearsim/host/analysis.hpp"
#include "wearsim/host/compare.hpp"
#include "wearsim/link/bandwidth.hpp"
#include "wearsim/link/framing.hpp"

using namespace wearsim;
using device::CommandKind;
using device::DeviceMode;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED{" << what << "}";
    }
  }
};

host::Scenario scenario(const std::string& text) {
  std::istringstream is(text);
  return host::parse_scenario(is, "acceptance");
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

void fft_oracle(Outcome& o) {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  double worst_parseval = 0.0;
  double worst_roundtrip = 0.0;
  for (Eigen::Index n : {256, 1024}) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::ArrayXd x(n);
      for (auto& v : x) v = normal(rng);
      const auto s = dsp::rfft(x, 1.0);
      worst = std::max(worst, oracle::max_relative_error(s.bins, oracle::naive_rdft(x)));
      const double e = x.square().sum();
      worst_parseval = std::max(worst_parseval, std::abs(oracle::half_spectrum_energy(s.bins, n) - e) / e);
      worst_roundtrip = std::max(worst_roundtrip, (dsp::irfft(s) - x).abs().maxCoeff());
    }
  }
  o.detail << "max rel err " << worst << ", Parseval " << worst_parseval << ", round trip " << worst_roundtrip;
  o.check(worst <= 1e-5, "DFT error <= 1e-5");
  o.check(worst_parseval <= 1e-9, "Parseval");
  o.check(worst_roundtrip <= 1e-9, "round trip");
}

void bandwidth(Outcome& o) {
  device::DeviceConfig cfg;
  const double stream = link::streaming_throughput(cfg);
  const double edge = link::edge_throughput(cfg);
  const double red = link::reduction_ratio(stream, edge);
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.2f", 100.0 * red);
  const long reported = std::lround(100.0 * red);
  o.detail << "streaming " << stream << " bps, edge summary " << edge << " bps, reduction " << pct << "% (" << reported
           << "%)";
  o.check(stream == 192000.0, "192000 bps");
  o.check(edge == 5120.0, "5120 bps");
  o.check(std::string(pct) == "97.33", "97.33%");
  o.check(reported == 97, "97%");
}

void cycles(Outcome& o) {
  const device::ClusterCostModel m;
  const auto batch = m.batch_cycles(8, 1024);
  const double us = m.seconds(batch) * 1e6;
  const double fft_ratio = static_cast<double>(m.cycles_per_fft(1024, false)) / m.cycles_per_fft(1024);
  const double batch_ratio = static_cast<double>(m.batch_cycles(8, 1024, false)) / batch;
  o.detail << batch << " cycles, " << us << " us, single/8-core " << fft_ratio << " (FFT) " << batch_ratio
           << " (with DMA)";
  o.check(batch == 102000, "102000 cycles");
  o.check(std::abs(us - 425.0) < 1e-9, "425 us");
  o.check(std::abs(102000.0 / m.clock_hz - 425e-6) < 1e-15, "102000 / 240 MHz");
  o.check(within(fft_ratio, 5.3, 0.05), "FFT ratio 5.3 +- 5%");
  o.check(within(batch_ratio, 5.3, 0.05), "batch ratio 5.3 +- 5%");
}

void energy(Outcome& o) {
  const auto cal = device::PowerCalibration::defaults();
  const device::ClusterCostModel cost;
  const device::DeviceConfig ref;
  const double stream_mw = device::sum(device::steady_state_power(DeviceMode::STREAMING, ref, cal, cost));
  const double edge_mw = device::sum(device::steady_state_power(DeviceMode::EDGE_COMPUTE, ref, cal, cost));
  const double stream_uj = device::energy_per_sample_uj(stream_mw, 1000, 8);
  const double edge_uj = device::energy_per_sample_uj(edge_mw, 1000, 8);
  host::CompareOptions opts;
  opts.duration_s = 6.0;
  const auto sim_stream = host::measure_mode(DeviceMode::STREAMING, ref, opts);
  const auto sim_edge = host::measure_mode(DeviceMode::EDGE_COMPUTE, ref, opts);
  const double life = device::battery_lifetime_h(cal.edge_system_budget_mw);
  const double sleep_mw = device::sum(device::baseline_power(DeviceMode::SLEEP, ref, cal));
  const double sleep_days = device::battery_lifetime_h(sleep_mw) / 24.0;
  o.detail << "edge " << edge_uj << " uJ/sample (simulated " << sim_edge.uj_per_sample << "), streaming " << stream_uj
           << " (simulated " << sim_stream.uj_per_sample << "), battery at " << cal.edge_system_budget_mw << " mW "
           << life << " h, sleep " << sleep_days << " days";
  o.check(within(edge_uj, 2.2, 0.02), "edge 2.2 uJ");
  o.check(within(stream_uj, 3.6, 0.02), "streaming 3.6 uJ");
  o.check(within(sim_edge.uj_per_sample, 2.2, 0.02), "simulated edge 2.2 uJ");
  o.check(within(sim_stream.uj_per_sample, 3.6, 0.02), "simulated streaming 3.6 uJ");
  o.check(std::abs(life - 15.0) <= 0.5, "15 h");
  o.check(sleep_days > 70.0, "sleep > 70 days");
}

struct LinkRun {
  std::size_t emitted = 0;
  std::size_t dropped = 0;
  std::size_t late_losses = 0;
  bool fifo = true;
};

LinkRun link_run(int fs, double duration, const std::string& outage) {
  std::string text = "[scenario]\nseed = 6\nduration_s = " + std::to_string(duration) +
                     "\nafe_noise = off\n[device]\nfs = " + std::to_string(fs) +
                     "\n[source]\nkind = background\n[link]\nthroughput_bps = 330000\n";
  if (!outage.empty()) text += "outage = " + outage + "\n";
  text += "[commands]\n0 = START STREAMING\n";
  host::SimulationOptions opts;
  opts.record_packets = true;
  opts.log_samples = false;
  const auto r = host::run_scenario(scenario(text), opts);
  LinkRun out;
  out.emitted = r.link.emitted;
  out.dropped = r.link.dropped;
  std::optional<std::uint16_t> last;
  for (const auto& p : r.packets) {
    if (p.direction != link::Direction::DEVICE_TO_HOST || !p.packet.is_data()) continue;
    if (last && p.packet.header.seq <= *last) out.fifo = false;
    last = p.packet.header.seq;
  }
  for (const auto& l : r.log.losses) {
    if (l.time.seconds() > duration - 10.0) out.late_losses += l.count;
  }
  return out;
}

void link_behaviour(Outcome& o) {
  const auto nominal = link_run(1000, 60.0, "");
  const auto overload = link_run(4000, 60.0, "");
  const double rate = static_cast<double>(overload.dropped) / static_cast<double>(overload.emitted);
  const double expected = (768.0 - 330.0) / 768.0;
  // 15 packets of 1920 bits at 192 kbps last 150 ms.
  const auto short_outage = link_run(1000, 10.0, "3 3.1");
  const auto long_outage = link_run(1000, 10.0, "3 4");
  o.detail << "192 kbps drops " << nominal.dropped << "; 768 kbps drop rate " << rate << " (expected " << expected
           << "); 100 ms outage drops " << short_outage.dropped << "; 1 s outage drops " << long_outage.dropped;
  o.check(nominal.dropped == 0, "no drops at 192 kbps");
  o.check(within(rate, expected, 0.10), "drop rate within 10%");
  o.check(overload.late_losses > 0, "drops sustained to the end");
  o.check(short_outage.dropped == 0, "short outage lossless");
  o.check(long_outage.dropped > 0, "long outage drops");
  o.check(nominal.fifo && overload.fifo && short_outage.fifo && long_outage.fifo, "FIFO order");
}

void alpha(Outcome& o) {
  const auto r = host::run_scenario(scenario(R"(
[scenario]
seed = 7
duration_s = 60
[source]
kind = alpha
open_s = 30
closed_s = 30
[commands]
0 = START STREAMING
)"));
  const auto a = host::analyze_alpha(r.log, 0);
  o.detail << "band power ratio " << a.ratio << ", spectrogram " << a.spectrogram.window << "/"
           << a.spectrogram.overlap << " transition at "
           << (a.transition_s ? std::to_string(*a.transition_s) : std::string("none")) << " s (eyes closed at "
           << a.expected_transition_s << " s)";
  o.check(a.ratio >= 4.0, "ratio >= 4");
  o.check(a.spectrogram.window == 1024 && a.spectrogram.overlap == 768, "1024/768 spectrogram");
  o.check(a.transition_s && std::abs(*a.transition_s - a.expected_transition_s) <= 2.0, "transition located");
}

host::SsvepReport ssvep_session(double snr_db) {
  const auto sc = scenario(R"(
[scenario]
seed = 11
duration_s = 425
[device]
payload = BINS_12FP
[source]
kind = ssvep
snr_db = )" + std::to_string(snr_db) + R"(
trial_s = 25
rest_s = 10
repetitions = 3
[commands]
0 = START EDGE_COMPUTE
)");
  host::SimulationOptions opts;
  opts.log_samples = false;
  return host::classify_trials(host::run_scenario(sc, opts).log);
}

void ssvep(Outcome& o) {
  const auto lo = ssvep_session(10.0);
  const auto hi = ssvep_session(20.0);
  o.detail << "10 dB " << lo.correct() << "/" << lo.trials.size() << ", 20 dB " << hi.correct() << "/"
           << hi.trials.size() << " (" << lo.source << " bins)";
  o.check(lo.source == "edge" && hi.source == "edge", "classified from edge bins");
  o.check(lo.trials.size() == 12 && lo.correct() >= 11, "10 dB >= 11/12");
  o.check(hi.trials.size() == 12 && hi.correct() == 12, "20 dB 12/12");
}

void afe_noise(Outcome& o) {
  const auto r = host::run_scenario(scenario(R"(
[scenario]
seed = 13
duration_s = 30.5
[device]
gain = 6
fs = 1000
afe_mode = HR
[source]
kind = zero
[commands]
0 = START STREAMING
)"));
  double worst = 0.0;
  double first = 0.0;
  for (int c = 0; c < 8; ++c) {
    const auto s = host::eeg_series(r.log, c);
    const double rms = dsp::integrated_rms_noise(s.values.head(30000), s.fs, 0.5, 100.0);
    if (c == 0) first = rms;
    worst = std::max(worst, std::abs(rms - 0.47e-6) / 0.47e-6);
  }
  o.detail << "channel 0 " << first * 1e6 << " uV rms, worst channel deviation " << 100.0 * worst << "%";
  o.check(worst <= 0.10, "0.47 uV +- 10% on every channel");
}

void ppg(Outcome& o) {
  const auto r = host::run_scenario(scenario(R"(
[scenario]
seed = 5
duration_s = 60
[device]
eeg_channels = 0
ppg_rate = 100
[source]
kind = ppg
heart_rate_bpm = 60
[commands]
0 = START STREAMING
)"));
  const auto red = host::analyze_ppg(r.log, 0);
  const auto ir = host::analyze_ppg(r.log, 1);
  o.detail << "mean beat interval " << red.mean_interval_s << " s (red), " << ir.mean_interval_s << " s (IR), "
           << red.beats_s.size() << " beats";
  o.check(std::abs(red.mean_interval_s - 1.0) <= 0.05, "red 1.0 +- 0.05 s");
  o.check(std::abs(ir.mean_interval_s - 1.0) <= 0.05, "IR 1.0 +- 0.05 s");
}

void state_machine(Outcome& o) {
  std::size_t pairs = 0;
  std::size_t mismatches = 0;
  for (int fs : {1000, 8000}) {
    device::DeviceConfig cfg;
    cfg.fs = fs;
    for (DeviceMode s : device::kAllModes) {
      for (DeviceMode selected : {DeviceMode::STREAMING, DeviceMode::EDGE_COMPUTE}) {
        for (CommandKind k : {CommandKind::SET_MODE, CommandKind::START, CommandKind::STOP, CommandKind::SET_PARAMS,
                              CommandKind::SLEEP}) {
          for (std::optional<DeviceMode> m :
               {std::optional<DeviceMode>{}, std::optional{DeviceMode::STREAMING}, std::optional{DeviceMode::EDGE_COMPUTE}}) {
            if (k == CommandKind::SET_MODE && !m) continue;
            if ((k == CommandKind::STOP || k == CommandKind::SLEEP || k == CommandKind::SET_PARAMS) && m) continue;
            device::HostCommand cmd;
            cmd.kind = k;
            cmd.mode = m;
            cmd.id = 9;
            if (k == CommandKind::SET_PARAMS) cmd.params.hop_ms = 100;
            const auto want = oracle::expected_transition(s, k, m, selected, fs <= 4000);
            const auto got = device::handle_command(s, cfg, selected, cmd);
            ++pairs;
            const bool ok = got.next == want.next && got.ack.has_value() == want.answered &&
                            (!got.ack || got.ack->accepted == want.accepted);
            if (!ok) ++mismatches;
          }
        }
      }
    }
  }
  bool sleep_sticky = true;
  for (DeviceMode s : device::kAllModes) {
    if (device::wake(s) != (s == DeviceMode::SLEEP ? DeviceMode::CONNECTED_IDLE : s)) sleep_sticky = false;
  }
  const auto r = host::run_scenario(scenario(R"(
[scenario]
duration_s = 4
[commands]
0.1 = SLEEP
0.5 = START
1.0 = STOP
1.5 = SET_MODE EDGE_COMPUTE
2.5 = START
[imu]
tap = 2.0
)"));
  std::vector<DeviceMode> modes;
  for (const auto& st : r.log.states) modes.push_back(st.mode);
  const std::vector<DeviceMode> want_modes{DeviceMode::CONNECTED_IDLE, DeviceMode::SLEEP, DeviceMode::CONNECTED_IDLE,
                                           DeviceMode::STREAMING};
  sleep_sticky = sleep_sticky && modes == want_modes && r.log.states[2].cause == "double_tap";

  device::DeviceConfig cfg;
  std::vector<afe::QuantizedFrame> frames;
  const std::int32_t extremes[] = {afe::kCodeMax, afe::kCodeMin, 0, -1, 1, afe::kCodeMax - 1, afe::kCodeMin + 1, 0x555555};
  for (int i = 0; i < 16; ++i) {
    afe::QuantizedFrame f;
    f.timestamp = sample_time(i, 1000);
    for (int c = 0; c < 8; ++c) f.eeg.push_back(extremes[(i + c) % 8]);
    frames.push_back(f);
  }
  link::SequenceCounter seq;
  bool exact = true;
  std::size_t k = 0;
  for (const auto& p : link::frame_raw(frames, cfg, seq)) {
    for (const auto& f : link::unframe_raw(link::Packet::parse(p.serialize()), cfg)) {
      exact = exact && f.eeg == frames[k].eeg && f.timestamp == frames[k].timestamp;
      ++k;
    }
  }
  exact = exact && k == frames.size();
  o.detail << pairs << " (state, command) pairs, " << mismatches << " mismatches; sleep exits only on tap: "
           << (sleep_sticky ? "yes" : "no") << "; extreme-code framing bit-exact: " << (exact ? "yes" : "no");
  o.check(mismatches == 0, "transition table");
  o.check(sleep_sticky, "SLEEP exits only on double tap");
  o.check(exact, "framing round trip");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "FFT oracle equivalence", 10.0, fft_oracle},
      {2, "Bandwidth arithmetic", 1.0, bandwidth},
      {3, "Cycle/time model", 0.0, cycles},
      {4, "Energy claims", 0.0, energy},
      {5, "Link behavior", 30.0, link_behaviour},
      {6, "Alpha-wave pipeline", 30.0, alpha},
      {7, "SSVEP end-to-end", 60.0, ssvep},
      {8, "AFE noise calibration", 0.0, afe_noise},
      {9, "PPG pipeline", 0.0, ppg},
      {10, "State machine and framing", 0.0, state_machine},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) o.check(false, "runtime < " + std::to_string(c.budget_s) + " s");
    if (!o.pass) ++failed;
    std::printf("%s %2d %-28s %.2f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
