#include "wearsim/link/channel.hpp"

#include <algorithm>
#include <cmath>

namespace wearsim::link {

void ChannelModel::validate() const {
  require(max_payload_throughput > 0.0, "throughput cap must be positive");
  require(per_packet_latency.ns >= 0, "latency must be non-negative");
  for (std::size_t i = 0; i < outages.size(); ++i) {
    require(outages[i].start < outages[i].end, "outage must have positive duration");
    if (i > 0) require(outages[i - 1].end <= outages[i].start, "outages must be sorted and non-overlapping");
  }
}

bool ChannelModel::in_outage(SimTime t) const {
  return std::any_of(outages.begin(), outages.end(), [t](const Outage& o) { return o.start <= t && t < o.end; });
}

std::optional<SimTime> ChannelModel::next_outage_after(SimTime t) const {
  for (const Outage& o : outages) {
    if (o.start > t) return o.start;
  }
  return std::nullopt;
}

SimTime ChannelModel::outage_end(SimTime t) const {
  for (const Outage& o : outages) {
    if (o.start <= t && t < o.end) return o.end;
  }
  return t;
}

TransmitResult transmit_step(RingBuffer& ring, RadioSlot& slot, const ChannelModel& channel, SimTime now, SimTime dt) {
  require(dt.ns > 0, "transmit step must be positive");
  TransmitResult result;
  const SimTime end = now + dt;
  const double rate = channel.max_payload_throughput;
  SimTime t = now;
  while (t < end) {
    if (channel.in_outage(t)) {
      t = std::min(channel.outage_end(t), end);
      continue;
    }
    if (!slot.packet) {
      auto next = ring.pop();
      if (!next) break;
      slot.remaining_bits = static_cast<double>(next->payload_bits());
      slot.packet = std::move(next);
    }
    SimTime segment_end = end;
    if (auto o = channel.next_outage_after(t); o && *o < end) segment_end = *o;
    const auto needed_ns = static_cast<std::int64_t>(std::ceil(slot.remaining_bits / rate * 1e9));
    if (t.ns + needed_ns <= segment_end.ns) {
      const SimTime done = SimTime::from_ns(t.ns + needed_ns);
      result.radio_active += done - t;
      result.delivered.push_back({std::move(*slot.packet), done, done + channel.per_packet_latency});
      slot.packet.reset();
      slot.remaining_bits = 0.0;
      t = done;
    } else {
      const SimTime span = segment_end - t;
      slot.remaining_bits = std::max(0.0, slot.remaining_bits - rate * span.seconds());
      result.radio_active += span;
      t = segment_end;
    }
  }
  return result;
}

DataLink::DataLink(ChannelModel channel, std::size_t ring_capacity)
    : channel_(std::move(channel)), ring_(ring_capacity) {
  channel_.validate();
}

void DataLink::enqueue(Packet p) {
  ++emitted_;
  ring_.enqueue(std::move(p));
}

TransmitResult DataLink::step(SimTime now, SimTime dt) {
  TransmitResult r = transmit_step(ring_, slot_, channel_, now, dt);
  delivered_ += r.delivered.size();
  for (const auto& d : r.delivered) delivered_bits_ += static_cast<double>(d.packet.payload_bits());
  radio_active_ += r.radio_active;
  return r;
}

LinkStats DataLink::stats() const {
  LinkStats s;
  s.emitted = emitted_;
  s.delivered = delivered_;
  s.dropped = ring_.drop_count();
  s.buffered = ring_.occupancy() + (slot_.packet ? 1 : 0);
  s.delivered_bits = delivered_bits_;
  s.radio_active = radio_active_;
  return s;
}

}  // namespace wearsim::link
