#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace wearsim {

/// Simulated time with nanosecond resolution.
///
/// Nanoseconds keep sample periods exact for every supported data rate
/// (31.25 us at 32 kSPS), while the public contracts speak microseconds.
struct SimTime {
  std::int64_t ns = 0;

  static constexpr SimTime from_ns(std::int64_t v) { return SimTime{v}; }
  static constexpr SimTime from_us(std::int64_t v) { return SimTime{v * 1000}; }
  static constexpr SimTime from_ms(std::int64_t v) { return SimTime{v * 1000000}; }
  static SimTime from_seconds(double s) { return SimTime{static_cast<std::int64_t>(std::llround(s * 1e9))}; }

  constexpr double micros() const { return static_cast<double>(ns) / 1e3; }
  constexpr double millis() const { return static_cast<double>(ns) / 1e6; }
  constexpr double seconds() const { return static_cast<double>(ns) / 1e9; }

  constexpr auto operator<=>(const SimTime&) const = default;
  constexpr SimTime operator+(SimTime o) const { return SimTime{ns + o.ns}; }
  constexpr SimTime operator-(SimTime o) const { return SimTime{ns - o.ns}; }
  constexpr SimTime& operator+=(SimTime o) {
    ns += o.ns;
    return *this;
  }
};

/// Timestamp of sample `index` at `rate_hz`, exact in nanoseconds for all
/// rates that divide 1e9 * 4.
inline SimTime sample_time(std::int64_t index, double rate_hz) {
  return SimTime{static_cast<std::int64_t>(std::llround(static_cast<double>(index) * 1e9 / rate_hz))};
}

}  // namespace wearsim
