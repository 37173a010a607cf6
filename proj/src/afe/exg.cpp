#include "wearsim/afe/exg.hpp"

#include <algorithm>
#include <array>
#include <numbers>

#include "wearsim/synth/generators.hpp"

namespace wearsim::afe {

std::string to_string(AfeMode mode) { return mode == AfeMode::LOW_POWER ? "LP" : "HR"; }

AfeMode afe_mode_from_string(const std::string& s) {
  if (s == "HR" || s == "HIGH_RESOLUTION") return AfeMode::HIGH_RESOLUTION;
  if (s == "LP" || s == "LOW_POWER") return AfeMode::LOW_POWER;
  throw ParameterError("unknown AFE mode '" + s + "'");
}

bool is_supported_gain(int gain) {
  static constexpr std::array<int, 7> gains{1, 2, 3, 4, 6, 8, 12};
  return std::find(gains.begin(), gains.end(), gain) != gains.end();
}

bool is_supported_data_rate(int rate) {
  static constexpr std::array<int, 8> rates{250, 500, 1000, 2000, 4000, 8000, 16000, 32000};
  return std::find(rates.begin(), rates.end(), rate) != rates.end();
}

void ExgAfeConfig::validate() const {
  require(active_channels >= 0 && active_channels <= 8, "active channels must lie in 0..8");
  require(is_supported_gain(gain), "unsupported PGA gain " + std::to_string(gain));
  require(is_supported_data_rate(data_rate), "unsupported data rate " + std::to_string(data_rate));
  require(noise_density >= 0.0, "noise density must be non-negative");
  require(vref > 0.0, "reference voltage must be positive");
}

std::int32_t quantize(double volts, const ExgAfeConfig& cfg, bool* saturated) {
  const double code = std::nearbyint(volts / cfg.lsb());
  bool clipped = false;
  std::int32_t out = 0;
  if (code > kCodeMax) {
    out = kCodeMax;
    clipped = true;
  } else if (code < kCodeMin) {
    out = kCodeMin;
    clipped = true;
  } else {
    out = static_cast<std::int32_t>(code);
  }
  if (saturated) *saturated = clipped;
  return out;
}

double dequantize(std::int32_t code, const ExgAfeConfig& cfg) { return static_cast<double>(code) * cfg.lsb(); }

ExgAfe::ExgAfe(ExgAfeConfig cfg, std::uint64_t seed)
    : cfg_(cfg),
      alpha_(std::exp(-2.0 * std::numbers::pi * cfg.cutoff_hz() / cfg.data_rate)),
      state_(static_cast<std::size_t>(cfg.active_channels), 0.0),
      rng_(synth::random_stream(seed, 0xafe)) {
  cfg_.validate();
}

QuantizedFrame ExgAfe::sample(std::span<const synth::AnalogTrace> traces, SimTime t) {
  std::vector<double> v(static_cast<std::size_t>(cfg_.active_channels), 0.0);
  for (std::size_t c = 0; c < v.size() && c < traces.size(); ++c) v[c] = traces[c].at(t);
  return sample_voltages(v, t);
}

QuantizedFrame ExgAfe::sample_voltages(std::span<const double> volts, SimTime t) {
  QuantizedFrame f;
  f.sequence = sequence_++;
  f.timestamp = t;
  f.eeg.resize(state_.size());
  const double sigma = cfg_.effective_noise_density() * std::sqrt(cfg_.data_rate / 2.0);
  for (std::size_t c = 0; c < state_.size(); ++c) {
    const double x = c < volts.size() ? volts[c] : 0.0;
    state_[c] = primed_ ? alpha_ * state_[c] + (1.0 - alpha_) * x : x;
    const double noisy = state_[c] + (cfg_.noise_enabled ? sigma * normal_(rng_) : 0.0);
    bool sat = false;
    f.eeg[c] = quantize(noisy, cfg_, &sat);
    f.saturated = f.saturated || sat;
  }
  primed_ = true;
  return f;
}

}  // namespace wearsim::afe
