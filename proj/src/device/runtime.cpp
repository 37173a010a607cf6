#include "wearsim/device/runtime.hpp"

#include "wearsim/afe/ppg_sensor.hpp"
#include "wearsim/dsp/spectral.hpp"
#include "wearsim/link/framing.hpp"

namespace wearsim::device {

Device::Device(DeviceConfig cfg, std::uint64_t seed, PowerCalibration cal, ClusterCostModel cost)
    : cfg_(std::move(cfg)), cal_(std::move(cal)), cost_(cost), seed_(seed) {
  cfg_.validate();
  cal_.validate();
  cost_.validate();
}

void Device::log(SimTime t, const std::string& event) {
  if (trace_) *trace_ << t.micros() << ' ' << event << ' ' << to_string(mode_) << '\n';
}

void Device::connect(SimTime t) {
  if (mode_ != DeviceMode::BOOT) return;
  mode_ = DeviceMode::CONNECTED_IDLE;
  log(t, "connect");
}

CommandResult Device::handle_command(const HostCommand& cmd, SimTime t) {
  CommandResult result;
  const DeviceMode before = mode_;
  CommandOutcome out = device::handle_command(mode_, cfg_, selected_, cmd);
  result.ack = out.ack;
  if (!out.ack) {
    log(t, "ignored:" + to_string(cmd.kind));
    return result;
  }
  if (out.config) cfg_ = *out.config;
  if (out.selected_mode) selected_ = *out.selected_mode;
  if (before == DeviceMode::STREAMING && out.next != before && !pending_.empty()) {
    result.flushed = link::frame_raw(pending_, cfg_, data_seq_);
    pending_.clear();
  }
  mode_ = out.next;
  if (mode_ != before && measuring()) begin_measurement(t);
  log(t, (out.ack->accepted ? "ack:" : "nack:") + to_string(cmd.kind));
  return result;
}

std::optional<link::Packet> Device::receive(const link::Packet& cmd, SimTime t, std::vector<link::Packet>* flushed) {
  if (cmd.header.type != link::PacketType::CMD) throw FramingError("device expects CMD packets");
  CommandResult r;
  try {
    r = handle_command(decode_command(cmd.payload, cmd.header.seq), t);
  } catch (const FramingError& e) {
    if (mode_ == DeviceMode::SLEEP) return std::nullopt;
    r.ack = Ack{cmd.header.seq, false, mode_, e.what()};
  }
  if (flushed) flushed->insert(flushed->end(), r.flushed.begin(), r.flushed.end());
  if (!r.ack) return std::nullopt;
  link::Packet p;
  p.header.type = link::PacketType::ACK;
  p.header.seq = ack_seq_.next();
  p.header.timestamp_ms = static_cast<std::uint32_t>(t.ns / 1000000);
  p.header.config_id = cfg_.config_id;
  p.payload = encode_ack(*r.ack);
  return p;
}

bool Device::imu_wake(SimTime t) {
  const DeviceMode next = wake(mode_);
  if (next == mode_) {
    log(t, "tap_ignored");
    return false;
  }
  mode_ = next;
  log(t, "wake");
  return true;
}

SimTime Device::frame_period() const {
  const int rate = cfg_.eeg_channels > 0 ? cfg_.fs : cfg_.ppg.rate;
  return sample_time(1, rate);
}

void Device::begin_measurement(SimTime t) {
  ++starts_;
  if (cfg_.eeg_channels > 0) {
    afe_ = std::make_unique<afe::ExgAfe>(cfg_.afe_config(), seed_ ^ (0x9e3779b97f4a7c15ull * starts_));
  } else {
    afe_.reset();
  }
  frame_seq_ = 0;
  pending_.clear();
  next_ppg_ = t;
  last_ppg_.assign(static_cast<std::size_t>(cfg_.ppg.led_count()), cfg_.ppg.dark_code);
  const Eigen::Index n = cfg_.fft_size();
  window_.assign(static_cast<std::size_t>(cfg_.eeg_channels), Eigen::ArrayXf::Zero(n));
  write_pos_ = 0;
  filled_ = 0;
  since_hop_ = 0;
  hop_due_ = true;
}

afe::QuantizedFrame Device::acquire(const SignalSources& sources, SimTime t) {
  afe::QuantizedFrame frame;
  if (afe_) {
    frame = afe_->sample(sources.eeg, t);
  } else {
    frame.sequence = frame_seq_;
    frame.timestamp = t;
  }
  ++frame_seq_;
  frame.config_id = cfg_.config_id;
  const bool ppg_on = mode_ == DeviceMode::STREAMING && cfg_.ppg.enabled && cfg_.ppg.led_count() > 0;
  if (ppg_on) {
    if (next_ppg_ && t >= *next_ppg_) {
      if (sources.red && sources.ir) {
        const afe::PpgSample s = afe::ppg_sample(*sources.red, *sources.ir, cfg_.ppg, t);
        last_ppg_ = s.codes;
        frame.saturated = frame.saturated || s.saturated;
      } else {
        last_ppg_.assign(static_cast<std::size_t>(cfg_.ppg.led_count()), afe::ppg_quantize(0.0, cfg_.ppg));
      }
      frame.ppg_fresh = true;
      next_ppg_ = *next_ppg_ + sample_time(1, cfg_.ppg.rate);
    }
    frame.ppg = last_ppg_;
  }
  return frame;
}

TickOutput Device::tick(const SignalSources& sources, SimTime t) {
  TickOutput out;
  if (!measuring()) return out;
  if (mode_ == DeviceMode::EDGE_COMPUTE && cfg_.eeg_channels == 0) return out;
  if (mode_ == DeviceMode::STREAMING && !link::raw_packet_type(cfg_)) return out;
  const afe::QuantizedFrame frame = acquire(sources, t);
  out.saturated = frame.saturated;
  if (mode_ == DeviceMode::STREAMING) {
    out.packets = run_streaming_tick(frame);
  } else {
    out.hop = buffer_for_edge(frame, t);
    if (out.hop) out.packets = out.hop->packets;
  }
  return out;
}

std::vector<link::Packet> Device::run_streaming_tick(const afe::QuantizedFrame& frame) {
  require(mode_ == DeviceMode::STREAMING, "streaming tick outside STREAMING");
  const std::size_t per_packet = link::frames_per_packet(cfg_);
  if (per_packet == 0) return {};
  pending_.push_back(frame);
  if (pending_.size() < per_packet) return {};
  std::vector<link::Packet> packets = link::frame_raw(pending_, cfg_, data_seq_);
  pending_.clear();
  return packets;
}

std::optional<EdgeHopResult> Device::buffer_for_edge(const afe::QuantizedFrame& frame, SimTime t) {
  const afe::ExgAfeConfig afe_cfg = cfg_.afe_config();
  const Eigen::Index n = cfg_.fft_size();
  for (std::size_t c = 0; c < window_.size(); ++c) {
    window_[c](write_pos_) = static_cast<float>(afe::dequantize(frame.eeg[c], afe_cfg));
  }
  write_pos_ = (write_pos_ + 1) % n;
  filled_ = std::min(filled_ + 1, n);
  ++since_hop_;
  if (filled_ < n || (!hop_due_ && since_hop_ < cfg_.hop_samples())) return std::nullopt;
  hop_due_ = false;
  since_hop_ = 0;

  // Copy out in chronological order: oldest sample sits at write_pos_.
  std::vector<Eigen::ArrayXf> windows(window_.size(), Eigen::ArrayXf(n));
  for (std::size_t c = 0; c < window_.size(); ++c) {
    const Eigen::Index tail = n - write_pos_;
    windows[c].head(tail) = window_[c].segment(write_pos_, tail);
    windows[c].tail(write_pos_) = window_[c].head(write_pos_);
  }
  return run_edge_hop(windows, t);
}

EdgeHopResult Device::run_edge_hop(std::span<const Eigen::ArrayXf> windows, SimTime t) {
  require(mode_ == DeviceMode::EDGE_COMPUTE, "edge hop outside EDGE_COMPUTE");
  const Eigen::Index n = cfg_.fft_size();
  for (const auto& w : windows) require(w.size() == n, "edge window must hold fft_size samples");

  EdgeHopResult r;
  r.cycles = edge_batch_cost(cost_, static_cast<int>(windows.size()), n, cfg_.hop_ms / 1000.0);
  pending_compute_uj_ += r.cycles.energy_uj;
  if (r.cycles.overrun) {
    ++skipped_hops_;
    log(t, "hop_overrun");
    return r;
  }
  const Eigen::ArrayXf taper = dsp::hann<float>(n);
  for (const auto& w : windows) {
    const Eigen::ArrayXf x = w * taper;
    r.report.channels.push_back(dsp::ssvep_bin_power(dsp::rfft(x, static_cast<double>(cfg_.fs)), cfg_.stim_freqs));
  }
  r.packets = link::frame_edge(r.report, cfg_, t, data_seq_);
  ++hops_;
  return r;
}

void Device::accrue(SimTime dt, SimTime radio_tx, SimTime radio_rx) {
  if (dt.ns <= 0) return;
  DomainValues burst{};
  at(burst, Domain::RADIO) = (cal_.radio_tx_mw * radio_tx.seconds() + cal_.radio_rx_mw * radio_rx.seconds()) * 1000.0;
  at(burst, Domain::DIGITAL_1V8) = pending_compute_uj_;
  pending_compute_uj_ = 0.0;
  ledger_ = energy_step(std::move(ledger_), baseline_power(mode_, cfg_, cal_), dt, burst);
}

}  // namespace wearsim::device
