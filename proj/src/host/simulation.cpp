#include "wearsim/host/simulation.hpp"

#include <cmath>
#include <sstream>

#include "wearsim/synth/generators.hpp"
#include "wearsim/synth/trace_io.hpp"

namespace wearsim::host {

namespace {

enum Priority { kLink = 0, kCommand = 1, kAcquire = 2, kReceive = 3 };

std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) { return synth::random_stream(seed, stream)(); }

std::string label(double hz) {
  std::ostringstream ss;
  ss << hz;
  return ss.str();
}

SimTime air_time(const link::Packet& p, const link::ChannelModel& ch) {
  return SimTime::from_seconds(static_cast<double>(p.payload_bits()) / ch.max_payload_throughput);
}

int frame_rate(const device::DeviceConfig& cfg) { return cfg.eeg_channels > 0 ? cfg.fs : cfg.ppg.rate; }

}  // namespace

device::SignalSources SourceSet::view() const {
  device::SignalSources s;
  s.eeg = eeg;
  s.red = red ? &*red : nullptr;
  s.ir = ir ? &*ir : nullptr;
  return s;
}

SourceSet build_sources(const Scenario& sc) {
  SourceSet out;
  const SourceSpec& src = sc.source;
  const double fs = src.source_fs > 0.0 ? src.source_fs : static_cast<double>(sc.device.fs);
  const int channels = 8;
  switch (src.kind) {
    case SourceKind::ZERO: break;
    case SourceKind::BACKGROUND:
      for (int c = 0; c < channels; ++c) {
        out.eeg.push_back(synth::gen_background_eeg(sc.duration_s, fs, src.rms_uv * 1e-6, derive(sc.seed, 100 + c)));
      }
      break;
    case SourceKind::ALPHA:
      for (int c = 0; c < channels; ++c) {
        const auto open = synth::gen_alpha_eeg(synth::EyeState::EYES_OPEN, src.open_s, fs, derive(sc.seed, 200 + c));
        const auto closed = synth::gen_alpha_eeg(synth::EyeState::EYES_CLOSED, src.closed_s, fs, derive(sc.seed, 300 + c));
        out.eeg.push_back(synth::concatenate(open, closed));
      }
      out.marks.push_back({SimTime{}, SimTime::from_seconds(src.open_s), "eyes_open"});
      out.marks.push_back({SimTime::from_seconds(src.open_s), SimTime::from_seconds(src.open_s + src.closed_s), "eyes_closed"});
      break;
    case SourceKind::SSVEP: {
      synth::SsvepStimulus stim;
      stim.frequencies = sc.device.stim_freqs;
      stim.trial_s = src.trial_s;
      stim.rest_s = src.rest_s;
      stim.repetitions = src.repetitions;
      stim.order_seed = src.order_seed;
      for (int c = 0; c < channels; ++c) {
        const synth::SsvepSession session = synth::gen_ssvep_session(stim, fs, src.snr_db, derive(sc.seed, 400 + c));
        out.eeg.push_back(session.concatenated());
        if (c == 0) {
          if (session.low_snr_warning) out.warnings.push_back("SNR below -20 dB: classification is not expected to work");
          for (const auto& seg : session.segments) {
            if (!seg.is_trial()) continue;
            out.marks.push_back({SimTime::from_seconds(seg.start_s), SimTime::from_seconds(seg.start_s + seg.trace.duration()),
                                 label(seg.label_hz)});
          }
        }
      }
      break;
    }
    case SourceKind::PPG: {
      const double ppg_fs = src.source_fs > 0.0 ? src.source_fs : 1000.0;
      out.red = synth::gen_ppg(src.heart_rate_bpm, sc.duration_s, ppg_fs, synth::PpgLed::RED, derive(sc.seed, 500));
      out.ir = synth::gen_ppg(src.heart_rate_bpm, sc.duration_s, ppg_fs, synth::PpgLed::IR, derive(sc.seed, 500));
      break;
    }
    case SourceKind::FILE:
      for (const auto& f : src.files) {
        std::filesystem::path p(f);
        if (p.is_relative()) p = sc.base_dir / p;
        synth::AnalogTrace t = synth::load_trace(p);
        if (t.kind == synth::TraceKind::PPG_RED) {
          out.red = std::move(t);
        } else if (t.kind == synth::TraceKind::PPG_IR) {
          out.ir = std::move(t);
        } else {
          out.eeg.push_back(std::move(t));
        }
      }
      require(out.eeg.size() <= 8, "at most eight EEG traces");
      break;
  }
  return out;
}

Simulation::Simulation(const Scenario& sc, SimulationOptions opts) : Simulation(sc, build_sources(sc), opts) {}

Simulation::Simulation(const Scenario& sc, SourceSet sources, SimulationOptions opts)
    : sc_(sc),
      opts_(opts),
      sources_(std::move(sources)),
      device_([&] {
        device::DeviceConfig cfg = sc.device;
        cfg.afe_noise = sc.afe_noise;
        return cfg;
      }(), derive(sc.seed, 1)),
      link_(sc.channel, sc.ring_capacity),
      host_cfg_(device_.config()),
      reassembler_(host_cfg_),
      end_(SimTime::from_seconds(sc.duration_s)) {
  sc_.validate();
  result_.log.scenario = sc.name;
  result_.log.seed = sc.seed;
  result_.log.configs[host_cfg_.config_id] = host_cfg_;
  result_.log.marks = sources_.marks;
  result_.warnings = sources_.warnings;
  device_.set_trace(opts_.device_trace);

  const device::DeviceMode before = device_.mode();
  device_.connect(SimTime{});
  note_state(SimTime{}, before, "connect");

  schedule({SimTime{}, kLink, 0, Kind::LINK_STEP, 0, 0, nullptr, nullptr});
  for (const auto& c : sc_.commands) {
    if (c.at >= end_) continue;
    schedule({c.at, kCommand, 0, Kind::HOST_SEND, 0, 0, nullptr, std::make_shared<device::HostCommand>(c.command)});
    next_command_id_ = std::max<std::uint16_t>(next_command_id_, static_cast<std::uint16_t>(c.command.id + 1));
  }
  for (SimTime t : sc_.taps) {
    if (t < end_) schedule({t, kCommand, 0, Kind::TAP, 0, 0, nullptr, nullptr});
  }
}

void Simulation::schedule(Event e) {
  e.order = order_++;
  queue_.push(std::move(e));
}

void Simulation::run_until(SimTime until) {
  if (until > end_) until = end_;
  while (!queue_.empty() && queue_.top().time < until) {
    Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    dispatch(e);
  }
  if (until > now_) now_ = until;
}

void Simulation::dispatch(const Event& e) {
  switch (e.kind) {
    case Kind::LINK_STEP: link_step(e.time); break;
    case Kind::HOST_SEND: host_send(e.time, *e.command); break;
    case Kind::DEVICE_CMD: device_command(e.time, *e.packet); break;
    case Kind::TAP: {
      const device::DeviceMode before = device_.mode();
      device_.imu_wake(e.time);
      note_state(e.time, before, "double_tap");
      break;
    }
    case Kind::SAMPLE_TICK: sample_tick(e.time, e.epoch, e.index); break;
    case Kind::HOST_RX: host_receive(e.time, *e.packet); break;
  }
}

std::uint16_t Simulation::submit(device::HostCommand cmd) {
  cmd.id = next_command_id_++;
  host_send(now_, cmd);
  return cmd.id;
}

void Simulation::link_step(SimTime t) {
  const SimTime dt = std::min(opts_.link_step, end_ - t);
  if (dt.ns <= 0) return;
  const link::TransmitResult r = link_.step(t, dt);
  for (const auto& d : r.delivered) {
    schedule({d.arrival, kReceive, 0, Kind::HOST_RX, 0, 0, std::make_shared<link::Packet>(d.packet), nullptr});
  }

  const device::DeviceMode mode = device_.mode();
  const device::DomainValues before = device_.ledger().energy_uj;
  device_.accrue(dt, r.radio_active + pending_tx_, pending_rx_);
  pending_tx_ = {};
  pending_rx_ = {};
  ModeTotals& totals = result_.by_mode[mode];
  totals.seconds += dt.seconds();
  for (std::size_t d = 0; d < device::kDomainCount; ++d) totals.energy_uj[d] += device_.ledger().energy_uj[d] - before[d];

  if (opts_.observer && t >= next_snapshot_) {
    opts_.observer->on_snapshot(t, link_.stats(), device_.ledger());
    next_snapshot_ = t + opts_.snapshot_period;
  }
  if (t + dt < end_) schedule({t + dt, kLink, 0, Kind::LINK_STEP, 0, 0, nullptr, nullptr});
}

void Simulation::host_send(SimTime t, const device::HostCommand& cmd) {
  device::HostCommand c = cmd;
  if (c.id == 0) c.id = next_command_id_++;
  in_flight_[c.id] = c;
  link::Packet p;
  p.header.type = link::PacketType::CMD;
  p.header.seq = c.id;
  p.header.timestamp_ms = static_cast<std::uint32_t>(t.ns / 1000000);
  p.header.config_id = host_cfg_.config_id;
  p.payload = device::encode_command(c);
  record(t, link::Direction::HOST_TO_DEVICE, p);
  result_.log.commands.push_back({t, c.id, format_command(c), std::nullopt, false, {}});
  pending_rx_ += air_time(p, sc_.channel);
  schedule({t + sc_.channel.per_packet_latency, kCommand, 0, Kind::DEVICE_CMD, 0, 0,
            std::make_shared<link::Packet>(std::move(p)), nullptr});
}

void Simulation::device_command(SimTime t, const link::Packet& p) {
  const device::DeviceMode before = device_.mode();
  std::vector<link::Packet> flushed;
  const std::optional<link::Packet> ack = device_.receive(p, t, &flushed);
  enqueue_data(t, std::move(flushed));
  if (ack) {
    pending_tx_ += air_time(*ack, sc_.channel);
    schedule({t + sc_.channel.per_packet_latency, kReceive, 0, Kind::HOST_RX, 0, 0, std::make_shared<link::Packet>(*ack),
              nullptr});
  }
  std::string cause = "command";
  try {
    cause = device::to_string(device::decode_command(p.payload, p.header.seq).kind);
  } catch (const FramingError&) {
  }
  note_state(t, before, cause + "#" + std::to_string(p.header.seq));
  if (device_.mode() != before && device_.measuring()) {
    ++epoch_;
    tick_origin_ = t;
    schedule({t, kAcquire, 0, Kind::SAMPLE_TICK, epoch_, 0, nullptr, nullptr});
  }
}

void Simulation::sample_tick(SimTime t, std::uint64_t epoch, std::int64_t index) {
  if (epoch != epoch_ || !device_.measuring()) return;
  device::TickOutput out = device_.tick(sources_.view(), t);
  if (out.saturated) ++result_.saturated_frames;
  enqueue_data(t, std::move(out.packets));
  const SimTime next = tick_origin_ + sample_time(index + 1, frame_rate(device_.config()));
  if (next < end_) schedule({next, kAcquire, 0, Kind::SAMPLE_TICK, epoch, index + 1, nullptr, nullptr});
}

void Simulation::enqueue_data(SimTime, std::vector<link::Packet> packets) {
  for (auto& p : packets) link_.enqueue(std::move(p));
}

void Simulation::record(SimTime t, link::Direction d, const link::Packet& p) {
  if (opts_.record_packets) result_.packets.push_back({t, d, p});
}

void Simulation::note_state(SimTime t, device::DeviceMode before, const std::string& cause) {
  if (device_.mode() == before) return;
  StateRecord rec{t, device_.mode(), cause};
  result_.log.states.push_back(rec);
  if (opts_.observer) opts_.observer->on_state(rec);
}

void Simulation::host_receive(SimTime t, const link::Packet& p) {
  record(t, link::Direction::DEVICE_TO_HOST, p);
  SessionLog& log = result_.log;
  for (auto& ev : dongle_.receive(p)) {
    if (auto* a = std::get_if<link::CommandAckEvent>(&ev)) {
      const device::Ack& ack = a->ack;
      for (auto it = log.commands.rbegin(); it != log.commands.rend(); ++it) {
        if (it->id == ack.command_id && !it->answered) {
          it->answered = t;
          it->accepted = ack.accepted;
          it->reason = ack.reason;
          break;
        }
      }
      if (auto it = in_flight_.find(ack.command_id); it != in_flight_.end()) {
        if (ack.accepted && it->second.kind == device::CommandKind::SET_PARAMS) {
          host_cfg_ = it->second.params.applied_to(host_cfg_);
          host_cfg_.config_id = static_cast<std::uint8_t>(host_cfg_.config_id + 1);
          log.configs[host_cfg_.config_id] = host_cfg_;
        }
        in_flight_.erase(it);
      }
      if (opts_.observer) opts_.observer->on_ack(t, ack);
    } else if (auto* l = std::get_if<link::LossEvent>(&ev)) {
      LossRecord rec{t, l->count, l->next_seq};
      log.losses.push_back(rec);
      if (opts_.observer) opts_.observer->on_loss(rec);
    } else if (auto* d = std::get_if<link::DataEvent>(&ev)) {
      const link::Packet& pkt = d->packet;
      auto cfg_it = log.configs.find(pkt.header.config_id);
      if (cfg_it == log.configs.end()) {
        result_.warnings.push_back("packet with unknown config_id " + std::to_string(pkt.header.config_id));
        continue;
      }
      const device::DeviceConfig& cfg = cfg_it->second;
      if (pkt.header.type == link::PacketType::EDGE_RESULT) {
        if (reassembler_.config_id() != cfg.config_id) {
          discards_before_ += reassembler_.discarded();
          reassembler_ = link::EdgeReassembler(cfg);
        }
        if (auto r = reassembler_.push(pkt)) {
          BinRecord rec{SimTime::from_ms(r->timestamp_ms), r->config_id, r->summary, flatten_harmonics(*r)};
          if (opts_.observer) opts_.observer->on_bins(rec, cfg);
          log.bins.push_back(std::move(rec));
        }
      } else {
        for (auto& f : link::unframe_raw(pkt, cfg)) {
          SampleRecord rec{f.timestamp, f.config_id, std::move(f.eeg), std::move(f.ppg), f.ppg_fresh};
          if (opts_.observer) opts_.observer->on_sample(rec, cfg);
          if (opts_.log_samples) log.samples.push_back(std::move(rec));
        }
      }
    }
  }
}

SimulationResult Simulation::finish() {
  if (finished_) throw ParameterError("simulation already finished");
  run();
  finished_ = true;
  result_.link = link_.stats();
  result_.ledger = device_.ledger();
  result_.hops = device_.hops();
  result_.skipped_hops = device_.skipped_hops();
  result_.reassembly_discards = discards_before_ + reassembler_.discarded();
  result_.end = end_;
  if (result_.skipped_hops > 0) {
    result_.warnings.push_back(std::to_string(result_.skipped_hops) + " edge hops skipped after a deadline overrun");
  }
  if (result_.link.dropped > 0) {
    result_.warnings.push_back(std::to_string(result_.link.dropped) + " packets dropped at the ring buffer");
  }
  if (result_.saturated_frames > 0) {
    result_.warnings.push_back(std::to_string(result_.saturated_frames) + " frames with clipped codes");
  }
  return std::move(result_);
}

SimulationResult run_scenario(const Scenario& sc, SimulationOptions opts) {
  Simulation sim(sc, opts);
  return sim.finish();
}

}  // namespace wearsim::host
