#pragma once

#include <cstdint>
#include <vector>

#include "wearsim/afe/frame.hpp"
#include "wearsim/synth/trace.hpp"

namespace wearsim::afe {

/// Optical pulse sensor settings. Supply current is the typical SpO2-mode
/// draw: 480 uA at 10 SPS, 1.15 mA at 100 SPS.
struct PpgConfig {
  bool enabled = false;
  int rate = 100;
  bool red = true;
  bool ir = true;
  std::uint32_t dark_code = 128;

  int led_count() const { return (red ? 1 : 0) + (ir ? 1 : 0); }
  double supply_current_ma() const;
  void validate() const;
};

struct PpgSample {
  std::vector<std::uint32_t> codes;  // RED then IR, enabled LEDs only
  bool saturated = false;
};

/// 19-bit unsigned code of a normalised reflectance in [0, 1].
std::uint32_t ppg_quantize(double reflectance, const PpgConfig& cfg, bool* saturated = nullptr);
double ppg_dequantize(std::uint32_t code, const PpgConfig& cfg);

/// Time-multiplexed conversion: RED at t, IR half a sample period later.
PpgSample ppg_sample(const synth::AnalogTrace& red, const synth::AnalogTrace& ir, const PpgConfig& cfg, SimTime t);

}  // namespace wearsim::afe
