#include "wearsim/link/dongle.hpp"

namespace wearsim::link {

std::vector<HostEvent> Dongle::receive(const Packet& p) {
  std::vector<HostEvent> events;
  if (p.header.type == PacketType::ACK) {
    events.emplace_back(CommandAckEvent{device::decode_ack(p.payload)});
    return events;
  }
  if (!p.is_data()) throw FramingError("dongle received a host-to-device packet");
  if (last_seq_) {
    const auto delta = static_cast<std::uint16_t>(p.header.seq - *last_seq_);
    if (delta > 1) {
      const auto missing = static_cast<std::uint16_t>(delta - 1);
      lost_ += missing;
      events.emplace_back(LossEvent{missing, p.header.seq});
    }
  }
  last_seq_ = p.header.seq;
  ++received_;
  events.emplace_back(DataEvent{p});
  return events;
}

}  // namespace wearsim::link
