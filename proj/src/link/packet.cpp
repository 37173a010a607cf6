#include "wearsim/link/packet.hpp"

namespace wearsim::link {

std::string to_string(PacketType type) {
  switch (type) {
    case PacketType::RAW_EEG: return "RAW_EEG";
    case PacketType::RAW_PPG: return "RAW_PPG";
    case PacketType::RAW_MIXED: return "RAW_MIXED";
    case PacketType::EDGE_RESULT: return "EDGE_RESULT";
    case PacketType::CMD: return "CMD";
    case PacketType::ACK: return "ACK";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> Packet::serialize() const {
  if (payload.size() > kMaxPayload) throw FramingError("payload exceeds 240 bytes");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + payload.size());
  out.push_back(static_cast<std::uint8_t>(header.type));
  out.push_back(static_cast<std::uint8_t>(header.seq >> 8));
  out.push_back(static_cast<std::uint8_t>(header.seq & 0xff));
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>((header.timestamp_ms >> s) & 0xff));
  out.push_back(header.config_id);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Packet Packet::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw FramingError("packet shorter than header");
  if (bytes.size() > kHeaderBytes + kMaxPayload) throw FramingError("packet payload exceeds 240 bytes");
  if (bytes[0] < 1 || bytes[0] > 6) throw FramingError("unknown packet type " + std::to_string(bytes[0]));
  Packet p;
  p.header.type = static_cast<PacketType>(bytes[0]);
  p.header.seq = static_cast<std::uint16_t>((bytes[1] << 8) | bytes[2]);
  p.header.timestamp_ms = (static_cast<std::uint32_t>(bytes[3]) << 24) | (static_cast<std::uint32_t>(bytes[4]) << 16) |
                          (static_cast<std::uint32_t>(bytes[5]) << 8) | bytes[6];
  p.header.config_id = bytes[7];
  p.payload.assign(bytes.begin() + kHeaderBytes, bytes.end());
  return p;
}

}  // namespace wearsim::link
