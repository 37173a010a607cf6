#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "wearsim/device/command.hpp"
#include "wearsim/link/packet.hpp"

namespace wearsim::link {

struct DataEvent {
  Packet packet;
};

/// `count` data packets were never received before `next_seq`.
struct LossEvent {
  std::uint16_t count = 0;
  std::uint16_t next_seq = 0;
};

struct CommandAckEvent {
  device::Ack ack;
};

using HostEvent = std::variant<DataEvent, LossEvent, CommandAckEvent>;

/// Host-side receiver. Checks data sequence continuity (mod 2^16) and
/// decodes command acknowledgements.
class Dongle {
 public:
  std::vector<HostEvent> receive(const Packet& p);

  std::uint64_t lost() const { return lost_; }
  std::uint64_t received() const { return received_; }

 private:
  std::optional<std::uint16_t> last_seq_;
  std::uint64_t lost_ = 0;
  std::uint64_t received_ = 0;
};

}  // namespace wearsim::link
