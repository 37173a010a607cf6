#include "wearsim/link/framing.hpp"

#include <algorithm>
#include <bit>

namespace wearsim::link {

namespace {

constexpr std::uint32_t kFreshBit = 1u << 31;

int frame_rate(const device::DeviceConfig& cfg) { return cfg.eeg_channels > 0 ? cfg.fs : cfg.ppg.rate; }

void put_u24(std::vector<std::uint8_t>& out, std::int32_t code) {
  const auto u = static_cast<std::uint32_t>(code) & 0xffffffu;
  out.push_back(static_cast<std::uint8_t>(u >> 16));
  out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(u & 0xff));
}

std::int32_t get_i24(const std::uint8_t* p) {
  std::uint32_t u = (static_cast<std::uint32_t>(p[0]) << 16) | (static_cast<std::uint32_t>(p[1]) << 8) | p[2];
  if (u & 0x800000u) u |= 0xff000000u;
  return static_cast<std::int32_t>(u);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t u) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>((u >> s) & 0xff));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

}  // namespace

std::optional<PacketType> raw_packet_type(const device::DeviceConfig& cfg) {
  const bool eeg = cfg.eeg_channels > 0;
  const bool ppg = cfg.ppg.enabled && cfg.ppg.led_count() > 0;
  if (eeg && ppg) return PacketType::RAW_MIXED;
  if (eeg) return PacketType::RAW_EEG;
  if (ppg) return PacketType::RAW_PPG;
  return std::nullopt;
}

std::size_t raw_frame_bytes(const device::DeviceConfig& cfg) {
  const auto type = raw_packet_type(cfg);
  if (!type) return 0;
  const std::size_t eeg = 3u * static_cast<std::size_t>(cfg.eeg_channels);
  const std::size_t ppg = 4u * static_cast<std::size_t>(cfg.ppg.led_count());
  switch (*type) {
    case PacketType::RAW_EEG: return eeg;
    case PacketType::RAW_PPG: return ppg;
    default: return eeg + ppg;
  }
}

std::size_t frames_per_packet(const device::DeviceConfig& cfg) {
  const std::size_t bytes = raw_frame_bytes(cfg);
  return bytes == 0 ? 0 : kMaxPayload / bytes;
}

std::vector<Packet> frame_raw(std::span<const afe::QuantizedFrame> frames, const device::DeviceConfig& cfg,
                              SequenceCounter& seq) {
  std::vector<Packet> packets;
  const auto type = raw_packet_type(cfg);
  if (!type || frames.empty()) return packets;
  const std::size_t per_packet = frames_per_packet(cfg);
  const auto leds = static_cast<std::size_t>(cfg.ppg.led_count());
  for (std::size_t start = 0; start < frames.size(); start += per_packet) {
    Packet p;
    p.header.type = *type;
    p.header.timestamp_ms = static_cast<std::uint32_t>(frames[start].timestamp.ns / 1000000);
    p.header.config_id = cfg.config_id;
    const std::size_t end = std::min(frames.size(), start + per_packet);
    for (std::size_t i = start; i < end; ++i) {
      const afe::QuantizedFrame& f = frames[i];
      if (f.config_id != cfg.config_id) throw FramingError("frame config_id does not match the active configuration");
      if (*type != PacketType::RAW_PPG) {
        if (f.eeg.size() != static_cast<std::size_t>(cfg.eeg_channels)) throw FramingError("EEG channel count mismatch");
        for (std::int32_t code : f.eeg) {
          if (code < afe::kCodeMin || code > afe::kCodeMax) throw FramingError("EEG code outside 24-bit range");
          put_u24(p.payload, code);
        }
      }
      if (*type != PacketType::RAW_EEG) {
        if (f.ppg.size() != leds) throw FramingError("PPG LED count mismatch");
        for (std::uint32_t code : f.ppg) {
          if (code > afe::kPpgCodeMax) throw FramingError("PPG code outside 19-bit range");
          put_u32(p.payload, code | (*type == PacketType::RAW_MIXED && f.ppg_fresh ? kFreshBit : 0u));
        }
      }
    }
    p.header.seq = seq.next();
    packets.push_back(std::move(p));
  }
  return packets;
}

std::vector<afe::QuantizedFrame> unframe_raw(const Packet& packet, const device::DeviceConfig& cfg) {
  const auto type = raw_packet_type(cfg);
  if (!type || packet.header.type != *type) throw FramingError("packet type does not match configuration");
  if (packet.header.config_id != cfg.config_id) throw FramingError("packet config_id does not match configuration");
  const std::size_t bytes = raw_frame_bytes(cfg);
  if (packet.payload.size() % bytes != 0) throw FramingError("payload is not a whole number of frames");
  const std::size_t count = packet.payload.size() / bytes;
  const auto leds = static_cast<std::size_t>(cfg.ppg.led_count());
  std::vector<afe::QuantizedFrame> frames(count);
  const std::uint8_t* p = packet.payload.data();
  for (std::size_t i = 0; i < count; ++i) {
    afe::QuantizedFrame& f = frames[i];
    f.config_id = packet.header.config_id;
    f.timestamp = SimTime::from_ms(packet.header.timestamp_ms) + sample_time(static_cast<std::int64_t>(i), frame_rate(cfg));
    if (*type != PacketType::RAW_PPG) {
      for (int c = 0; c < cfg.eeg_channels; ++c, p += 3) f.eeg.push_back(get_i24(p));
    }
    if (*type != PacketType::RAW_EEG) {
      for (std::size_t l = 0; l < leds; ++l, p += 4) {
        const std::uint32_t u = get_u32(p);
        f.ppg.push_back(u & afe::kPpgCodeMax);
        f.ppg_fresh = *type == PacketType::RAW_PPG || (u & kFreshBit) != 0;
      }
    }
  }
  return frames;
}

std::vector<std::uint8_t> encode_f32_be(std::span<const float> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 4);
  for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

std::vector<float> decode_f32_be(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw FramingError("float payload is not a multiple of 4 bytes");
  std::vector<float> out;
  for (std::size_t i = 0; i < bytes.size(); i += 4) out.push_back(std::bit_cast<float>(get_u32(bytes.data() + i)));
  return out;
}

std::vector<Packet> frame_edge(const dsp::SsvepBinReport& report, const device::DeviceConfig& cfg, SimTime timestamp,
                               SequenceCounter& seq) {
  std::vector<float> values;
  for (const auto& ch : report.channels) {
    if (cfg.payload_mode == device::PayloadMode::SUMMARY_1FP) {
      values.push_back(static_cast<float>(ch.summary()));
    } else {
      for (Eigen::Index i = 0; i < ch.harmonic_power.rows(); ++i) {
        for (Eigen::Index h = 0; h < ch.harmonic_power.cols(); ++h) {
          values.push_back(static_cast<float>(ch.harmonic_power(i, h)));
        }
      }
    }
  }
  const std::vector<std::uint8_t> bytes = encode_f32_be(values);
  std::vector<Packet> packets;
  for (std::size_t start = 0; start < bytes.size(); start += kMaxPayload) {
    Packet p;
    p.header.type = PacketType::EDGE_RESULT;
    p.header.timestamp_ms = static_cast<std::uint32_t>(timestamp.ns / 1000000);
    p.header.config_id = cfg.config_id;
    p.header.seq = seq.next();
    const std::size_t end = std::min(bytes.size(), start + kMaxPayload);
    p.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.begin() + static_cast<std::ptrdiff_t>(end));
    packets.push_back(std::move(p));
  }
  return packets;
}

std::optional<EdgeResult> EdgeReassembler::push(const Packet& packet) {
  if (packet.header.type != PacketType::EDGE_RESULT) throw FramingError("not an edge result packet");
  const std::vector<float> values = decode_f32_be(packet.payload);
  const bool contiguous = last_seq_ && static_cast<std::uint16_t>(*last_seq_ + 1) == packet.header.seq;
  last_seq_ = packet.header.seq;

  EdgeResult r;
  r.timestamp_ms = packet.header.timestamp_ms;
  r.config_id = packet.header.config_id;
  r.mode = cfg_.payload_mode;
  if (cfg_.payload_mode == device::PayloadMode::SUMMARY_1FP) {
    r.summary = values;
    return r;
  }

  if (!pending_.empty() && (!contiguous || packet.header.timestamp_ms != pending_ts_)) {
    pending_.clear();
    ++discarded_;
  }
  if (pending_.empty()) pending_ts_ = packet.header.timestamp_ms;
  pending_.insert(pending_.end(), values.begin(), values.end());

  const std::size_t stims = cfg_.stim_freqs.size();
  const std::size_t per_channel = stims * dsp::kHarmonics;
  const std::size_t expected = per_channel * static_cast<std::size_t>(cfg_.eeg_channels);
  if (pending_.size() < expected) return std::nullopt;
  if (pending_.size() > expected) {
    pending_.clear();
    ++discarded_;
    return std::nullopt;
  }
  for (int c = 0; c < cfg_.eeg_channels; ++c) {
    Eigen::ArrayXXd h(static_cast<Eigen::Index>(stims), dsp::kHarmonics);
    for (std::size_t i = 0; i < stims; ++i) {
      for (int k = 0; k < dsp::kHarmonics; ++k) {
        h(static_cast<Eigen::Index>(i), k) = pending_[static_cast<std::size_t>(c) * per_channel + i * dsp::kHarmonics + static_cast<std::size_t>(k)];
      }
    }
    r.channels.push_back(dsp::ChannelBinPowers::from_harmonics(cfg_.stim_freqs, h));
    r.summary.push_back(static_cast<float>(r.channels.back().summary()));
  }
  r.timestamp_ms = pending_ts_;
  pending_.clear();
  return r;
}

}  // namespace wearsim::link
