#pragma once

#include <array>
#include <limits>

namespace wearsim::afe {

struct ImpedanceReading {
  double ohms = 0.0;
  bool good = false;
};

/// Electrode contact check. Returns the configured synthetic impedance;
/// contact is GOOD below `threshold_ohms`.
struct ImpedanceModel {
  std::array<double, 8> ohms{10e3, 10e3, 10e3, 10e3, 10e3, 10e3, 10e3, 10e3};
  double threshold_ohms = 50e3;

  ImpedanceReading check(int channel, int active_channels) const;
};

}  // namespace wearsim::afe
