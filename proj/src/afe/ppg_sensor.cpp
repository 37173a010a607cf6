#include "wearsim/afe/ppg_sensor.hpp"

#include <cmath>

namespace wearsim::afe {

double PpgConfig::supply_current_ma() const {
  if (!enabled) return 0.0;
  return rate == 10 ? 0.48 : 1.15;
}

void PpgConfig::validate() const {
  if (!enabled) return;
  require(rate == 10 || rate == 100, "PPG rate must be 10 or 100 SPS");
  require(led_count() >= 1, "PPG needs at least one LED when enabled");
  require(dark_code < kPpgCodeMax, "dark code must be below full scale");
}

std::uint32_t ppg_quantize(double reflectance, const PpgConfig& cfg, bool* saturated) {
  const double span = static_cast<double>(kPpgCodeMax - cfg.dark_code);
  const double code = static_cast<double>(cfg.dark_code) + std::nearbyint(reflectance * span);
  bool clipped = false;
  std::uint32_t out = 0;
  if (code >= static_cast<double>(kPpgCodeMax)) {
    out = kPpgCodeMax;
    clipped = code > static_cast<double>(kPpgCodeMax);
  } else if (code < 0.0) {
    clipped = true;
  } else {
    out = static_cast<std::uint32_t>(code);
  }
  if (saturated) *saturated = clipped;
  return out;
}

double ppg_dequantize(std::uint32_t code, const PpgConfig& cfg) {
  return (static_cast<double>(code) - static_cast<double>(cfg.dark_code)) /
         static_cast<double>(kPpgCodeMax - cfg.dark_code);
}

PpgSample ppg_sample(const synth::AnalogTrace& red, const synth::AnalogTrace& ir, const PpgConfig& cfg, SimTime t) {
  cfg.validate();
  PpgSample s;
  const SimTime half_period = SimTime::from_ns(static_cast<std::int64_t>(5e8 / cfg.rate));
  auto convert = [&](const synth::AnalogTrace& trace, SimTime at) {
    bool sat = false;
    s.codes.push_back(ppg_quantize(trace.at(at), cfg, &sat));
    s.saturated = s.saturated || sat;
  };
  if (cfg.red) convert(red, t);
  if (cfg.ir) convert(ir, t + half_period);
  return s;
}

}  // namespace wearsim::afe
