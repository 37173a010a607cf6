#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wearsim/core/time.hpp"
#include "wearsim/link/packet.hpp"

namespace wearsim::link {

enum class Direction : std::uint8_t { DEVICE_TO_HOST = 0, HOST_TO_DEVICE = 1 };

struct PacketRecord {
  SimTime time;
  Direction direction = Direction::DEVICE_TO_HOST;
  Packet packet;
};

/// Packet capture file, little-endian:
///   file header: magic "BGPL", version u16 (1), reserved u16
///   per record:  time_ns u64, direction u8, length u16, serialized packet
void write_packet_log(std::ostream& os, const std::vector<PacketRecord>& records);
std::vector<PacketRecord> read_packet_log(std::istream& is);
std::vector<PacketRecord> load_packet_log(const std::filesystem::path& path);

/// Header summary plus a 16-bytes-per-line hex dump of each record.
void hexdump(std::ostream& os, const std::vector<PacketRecord>& records);

}  // namespace wearsim::link
