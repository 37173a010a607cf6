#include "wearsim/link/packet_log.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <ostream>

namespace wearsim::link {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'G', 'P', 'L'};

void put_le(std::ostream& os, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const std::vector<unsigned char>& b, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

void write_packet_log(std::ostream& os, const std::vector<PacketRecord>& records) {
  os.write(kMagic.data(), 4);
  put_le(os, 1, 2);
  put_le(os, 0, 2);
  for (const auto& r : records) {
    const auto bytes = r.packet.serialize();
    put_le(os, static_cast<std::uint64_t>(r.time.ns), 8);
    put_le(os, static_cast<std::uint8_t>(r.direction), 1);
    put_le(os, bytes.size(), 2);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

std::vector<PacketRecord> read_packet_log(std::istream& is) {
  std::vector<unsigned char> b((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (b.size() < 8 || std::memcmp(b.data(), kMagic.data(), 4) != 0) throw FramingError("packet log: bad magic");
  if (get_le(b, 4, 2) != 1) throw FramingError("packet log: unsupported version");
  std::vector<PacketRecord> out;
  std::size_t at = 8;
  while (at < b.size()) {
    if (at + 11 > b.size()) throw FramingError("packet log: truncated record header");
    PacketRecord r;
    r.time = SimTime::from_ns(static_cast<std::int64_t>(get_le(b, at, 8)));
    if (b[at + 8] > 1) throw FramingError("packet log: bad direction");
    r.direction = static_cast<Direction>(b[at + 8]);
    const auto len = static_cast<std::size_t>(get_le(b, at + 9, 2));
    at += 11;
    if (at + len > b.size()) throw FramingError("packet log: truncated record");
    r.packet = Packet::parse(std::span<const std::uint8_t>(b.data() + at, len));
    at += len;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PacketRecord> load_packet_log(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("cannot open " + path.string());
  return read_packet_log(is);
}

void hexdump(std::ostream& os, const std::vector<PacketRecord>& records) {
  const auto flags = os.flags();
  for (const auto& r : records) {
    const auto& h = r.packet.header;
    os << std::dec << std::fixed << std::setprecision(3) << r.time.millis() << " ms "
       << (r.direction == Direction::DEVICE_TO_HOST ? "dev->host " : "host->dev ") << to_string(h.type)
       << " seq=" << h.seq << " ts=" << h.timestamp_ms << "ms cfg=" << static_cast<int>(h.config_id)
       << " len=" << r.packet.payload.size() << '\n';
    const auto bytes = r.packet.serialize();
    for (std::size_t i = 0; i < bytes.size(); i += 16) {
      os << "  " << std::hex << std::setw(4) << std::setfill('0') << i << ' ';
      for (std::size_t j = i; j < std::min(bytes.size(), i + 16); ++j) {
        os << ' ' << std::setw(2) << static_cast<int>(bytes[j]);
      }
      os << std::setfill(' ') << std::dec << '\n';
    }
  }
  os.flags(flags);
}

}  // namespace wearsim::link
