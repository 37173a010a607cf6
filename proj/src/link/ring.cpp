#include "wearsim/link/ring.hpp"

namespace wearsim::link {

RingBuffer::RingBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity > 0, "ring capacity must be positive");
}

std::optional<Packet> RingBuffer::enqueue(Packet p) {
  std::optional<Packet> evicted;
  if (packets_.size() == capacity_) {
    evicted = std::move(packets_.front());
    packets_.pop_front();
    ++drops_;
  }
  packets_.push_back(std::move(p));
  return evicted;
}

std::optional<Packet> RingBuffer::pop() {
  if (packets_.empty()) return std::nullopt;
  Packet p = std::move(packets_.front());
  packets_.pop_front();
  return p;
}

}  // namespace wearsim::link
