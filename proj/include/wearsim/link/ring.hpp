#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "wearsim/link/packet.hpp"

namespace wearsim::link {

inline constexpr std::size_t kRingCapacity = 15;

/// Fixed-capacity packet FIFO. When full, the oldest packet is evicted to
/// make room and counted as dropped.
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity = kRingCapacity);

  /// Returns the evicted packet, if any.
  std::optional<Packet> enqueue(Packet p);
  std::optional<Packet> pop();
  const Packet* front() const { return packets_.empty() ? nullptr : &packets_.front(); }

  std::size_t capacity() const { return capacity_; }
  std::size_t occupancy() const { return packets_.size(); }
  std::size_t drop_count() const { return drops_; }
  bool empty() const { return packets_.empty(); }
  bool full() const { return packets_.size() == capacity_; }

 private:
  std::size_t capacity_;
  std::deque<Packet> packets_;
  std::size_t drops_ = 0;
};

}  // namespace wearsim::link
