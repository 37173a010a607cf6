#pragma once

#include <vector>

#include "wearsim/core/time.hpp"

namespace wearsim::afe {

struct WakeInterrupt {
  SimTime time;
};

/// Double-tap interrupts at exactly the scheduled times. The schedule must
/// be sorted ascending.
std::vector<WakeInterrupt> imu_double_tap(const std::vector<SimTime>& schedule);

}  // namespace wearsim::afe
