#pragma once

#include <cstdint>
#include <vector>

#include "wearsim/core/time.hpp"

namespace wearsim::afe {

inline constexpr std::int32_t kCodeMax = (1 << 23) - 1;
inline constexpr std::int32_t kCodeMin = -(1 << 23);
inline constexpr std::uint32_t kPpgCodeMax = (1u << 19) - 1;

/// One acquisition instant across the active channels.
///
/// `eeg` holds signed 24-bit codes, channel-major. `ppg` holds 19-bit LED
/// codes in RED-then-IR order; `ppg_fresh` marks a frame where the optical
/// sensor produced a new conversion (it runs slower than the ExG AFE).
struct QuantizedFrame {
  std::uint32_t sequence = 0;
  SimTime timestamp;
  std::uint8_t config_id = 0;
  std::vector<std::int32_t> eeg;
  std::vector<std::uint32_t> ppg;
  bool ppg_fresh = false;
  bool saturated = false;

  bool operator==(const QuantizedFrame&) const = default;
};

}  // namespace wearsim::afe
