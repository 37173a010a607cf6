#include "wearsim/afe/impedance.hpp"

#include <string>

#include "wearsim/core/error.hpp"

namespace wearsim::afe {

ImpedanceReading ImpedanceModel::check(int channel, int active_channels) const {
  require(channel >= 0 && channel < active_channels && channel < 8,
          "impedance check on inactive channel " + std::to_string(channel));
  const double z = ohms[static_cast<std::size_t>(channel)];
  return {z, z < threshold_ohms};
}

}  // namespace wearsim::afe
