#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "wearsim/afe/frame.hpp"
#include "wearsim/core/time.hpp"
#include "wearsim/device/config.hpp"
#include "wearsim/dsp/ssvep.hpp"
#include "wearsim/link/packet.hpp"

namespace wearsim::link {

// Raw sample layout, per frame, in order:
//   EEG: one 24-bit big-endian two's-complement code per active channel
//   PPG: one 32-bit big-endian container per enabled LED (RED, then IR),
//        19-bit code right-aligned. In RAW_MIXED packets bit 31 is set
//        when the frame carries a fresh optical conversion.
// Frames are packed back to back; a packet holds floor(240 / frame_bytes)
// frames.

/// RAW_EEG, RAW_PPG, RAW_MIXED, or nullopt when nothing is acquired.
std::optional<PacketType> raw_packet_type(const device::DeviceConfig& cfg);
std::size_t raw_frame_bytes(const device::DeviceConfig& cfg);
std::size_t frames_per_packet(const device::DeviceConfig& cfg);

/// Pack frames into packets; the final packet may be short. All frames must
/// carry cfg.config_id.
std::vector<Packet> frame_raw(std::span<const afe::QuantizedFrame> frames, const device::DeviceConfig& cfg,
                              SequenceCounter& seq);

/// Recover frame codes from a raw packet. Sequence numbers are not on the
/// wire; timestamps are rebuilt from the header and the frame rate.
std::vector<afe::QuantizedFrame> unframe_raw(const Packet& packet, const device::DeviceConfig& cfg);

/// Edge result packets. SUMMARY_1FP carries one float32 (big-endian) per
/// channel; BINS_12FP carries, per channel, the 12 harmonic bin powers in
/// stimulus-major order, split across as many packets as needed.
std::vector<Packet> frame_edge(const dsp::SsvepBinReport& report, const device::DeviceConfig& cfg,
                               SimTime timestamp, SequenceCounter& seq);

std::vector<std::uint8_t> encode_f32_be(std::span<const float> values);
std::vector<float> decode_f32_be(std::span<const std::uint8_t> bytes);

/// Host-side result of one edge hop.
struct EdgeResult {
  std::uint32_t timestamp_ms = 0;
  std::uint8_t config_id = 0;
  device::PayloadMode mode = device::PayloadMode::SUMMARY_1FP;
  std::vector<float> summary;                      // one per channel
  std::vector<dsp::ChannelBinPowers> channels;     // BINS_12FP only
};

/// Rebuilds edge results from EDGE_RESULT packets. A gap inside a
/// multi-packet result discards the partial result.
class EdgeReassembler {
 public:
  explicit EdgeReassembler(device::DeviceConfig cfg) : cfg_(std::move(cfg)) {}

  std::optional<EdgeResult> push(const Packet& packet);
  void reset() { pending_.clear(); }
  std::size_t discarded() const { return discarded_; }
  std::uint8_t config_id() const { return cfg_.config_id; }

 private:
  device::DeviceConfig cfg_;
  std::vector<float> pending_;
  std::uint32_t pending_ts_ = 0;
  std::optional<std::uint16_t> last_seq_;
  std::size_t discarded_ = 0;
};

}  // namespace wearsim::link
