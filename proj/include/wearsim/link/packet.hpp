#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wearsim/core/error.hpp"

namespace wearsim::link {

enum class PacketType : std::uint8_t { RAW_EEG = 1, RAW_PPG = 2, RAW_MIXED = 3, EDGE_RESULT = 4, CMD = 5, ACK = 6 };

std::string to_string(PacketType type);

inline constexpr std::size_t kMaxPayload = 240;
inline constexpr std::size_t kHeaderBytes = 8;

/// Wire header, 8 bytes: type u8, seq u16 BE, timestamp_ms u32 BE, config_id u8.
struct PacketHeader {
  PacketType type = PacketType::RAW_EEG;
  std::uint16_t seq = 0;
  std::uint32_t timestamp_ms = 0;
  std::uint8_t config_id = 0;

  bool operator==(const PacketHeader&) const = default;
};

struct Packet {
  PacketHeader header;
  std::vector<std::uint8_t> payload;

  std::size_t payload_bits() const { return payload.size() * 8; }
  bool is_data() const {
    return header.type == PacketType::RAW_EEG || header.type == PacketType::RAW_PPG ||
           header.type == PacketType::RAW_MIXED || header.type == PacketType::EDGE_RESULT;
  }

  /// Header followed by payload; the payload length is implied by the
  /// enclosing record.
  std::vector<std::uint8_t> serialize() const;
  static Packet parse(std::span<const std::uint8_t> bytes);

  bool operator==(const Packet&) const = default;
};

/// Per-direction sequence numbers, wrapping at 2^16.
class SequenceCounter {
 public:
  std::uint16_t next() { return value_++; }
  std::uint16_t peek() const { return value_; }

 private:
  std::uint16_t value_ = 0;
};

}  // namespace wearsim::link
