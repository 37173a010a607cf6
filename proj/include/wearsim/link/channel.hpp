#pragma once

#include <optional>
#include <vector>

#include "wearsim/core/time.hpp"
#include "wearsim/link/ring.hpp"

namespace wearsim::link {

struct Outage {
  SimTime start;
  SimTime end;  // exclusive
};

/// Radio channel: payload throughput cap, interference outages and a fixed
/// delivery latency.
struct ChannelModel {
  double max_payload_throughput = 330000.0;  // bits/s
  std::vector<Outage> outages;
  SimTime per_packet_latency = SimTime::from_us(1000);

  /// Throughput positive; outages sorted, non-empty and non-overlapping.
  void validate() const;
  bool in_outage(SimTime t) const;
  /// Start of the first outage strictly after t, if any.
  std::optional<SimTime> next_outage_after(SimTime t) const;
  /// End of the outage covering t (t itself when none does).
  SimTime outage_end(SimTime t) const;
};

struct Delivery {
  Packet packet;
  SimTime sent;     // last payload bit left the radio
  SimTime arrival;  // sent + per-packet latency
};

/// Packet currently on air. It has left the ring; interference pauses it
/// and transmission resumes where it stopped.
struct RadioSlot {
  std::optional<Packet> packet;
  double remaining_bits = 0.0;
};

struct TransmitResult {
  std::vector<Delivery> delivered;
  SimTime radio_active;
};

/// Advance the data direction over [now, now + dt). Head-of-line packets go
/// out in order at the throughput cap; nothing is sent during outages.
TransmitResult transmit_step(RingBuffer& ring, RadioSlot& slot, const ChannelModel& channel, SimTime now, SimTime dt);

struct LinkStats {
  std::size_t emitted = 0;
  std::size_t delivered = 0;
  std::size_t dropped = 0;
  std::size_t buffered = 0;  // in ring plus on air
  double delivered_bits = 0.0;
  SimTime radio_active;
};

/// Device-to-host data path: ring buffer, radio slot and channel.
class DataLink {
 public:
  explicit DataLink(ChannelModel channel = {}, std::size_t ring_capacity = kRingCapacity);

  void enqueue(Packet p);
  TransmitResult step(SimTime now, SimTime dt);

  const RingBuffer& ring() const { return ring_; }
  const ChannelModel& channel() const { return channel_; }
  LinkStats stats() const;

 private:
  ChannelModel channel_;
  RingBuffer ring_;
  RadioSlot slot_;
  std::size_t emitted_ = 0;
  std::size_t delivered_ = 0;
  double delivered_bits_ = 0.0;
  SimTime radio_active_;
};

}  // namespace wearsim::link
