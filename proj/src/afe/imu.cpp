#include "wearsim/afe/imu.hpp"

#include <algorithm>

#include "wearsim/core/error.hpp"

namespace wearsim::afe {

std::vector<WakeInterrupt> imu_double_tap(const std::vector<SimTime>& schedule) {
  require(std::is_sorted(schedule.begin(), schedule.end()), "tap schedule must be sorted ascending");
  std::vector<WakeInterrupt> events;
  events.reserve(schedule.size());
  for (SimTime t : schedule) events.push_back({t});
  return events;
}

}  // namespace wearsim::afe
