#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wearsim/afe/frame.hpp"
#include "wearsim/synth/trace.hpp"

namespace wearsim::afe {

enum class AfeMode { HIGH_RESOLUTION, LOW_POWER };

std::string to_string(AfeMode mode);
AfeMode afe_mode_from_string(const std::string& s);

/// Input-referred white noise density giving 0.47 uV RMS over 0.5-100 Hz.
inline const double kDefaultNoiseDensity = 0.47e-6 / std::sqrt(99.5);

/// Anti-alias -3 dB point as a fraction of the data rate (262 Hz at 1 kSPS).
inline constexpr double kCutoffFraction = 0.262;

struct ExgAfeConfig {
  int active_channels = 8;
  int gain = 6;
  int data_rate = 1000;
  AfeMode mode = AfeMode::HIGH_RESOLUTION;
  double noise_density = kDefaultNoiseDensity;
  double vref = 2.4;
  bool noise_enabled = true;

  double cutoff_hz() const { return kCutoffFraction * data_rate; }
  /// Input full-scale range: codes span +/- vref / gain.
  double full_scale() const { return vref / gain; }
  double lsb() const { return full_scale() / static_cast<double>(1 << 23); }
  /// Effective noise density; low-power mode trades noise for current.
  double effective_noise_density() const { return mode == AfeMode::LOW_POWER ? 2.0 * noise_density : noise_density; }

  void validate() const;
};

bool is_supported_gain(int gain);
bool is_supported_data_rate(int rate);

/// Signed 24-bit conversion of an input-referred voltage.
std::int32_t quantize(double volts, const ExgAfeConfig& cfg, bool* saturated = nullptr);
double dequantize(std::int32_t code, const ExgAfeConfig& cfg);

/// Behavioural 8-channel ExG front-end.
///
/// Each call models one conversion: single-pole low-pass at cutoff_hz(),
/// input-referred white noise, then 24-bit quantisation with clamping.
/// Filter state starts at the first input so DC inputs settle at once.
class ExgAfe {
 public:
  ExgAfe(ExgAfeConfig cfg, std::uint64_t seed);

  /// Convert channel i from traces[i] (0 V when fewer traces are given).
  QuantizedFrame sample(std::span<const synth::AnalogTrace> traces, SimTime t);
  /// Convert explicit per-channel input voltages.
  QuantizedFrame sample_voltages(std::span<const double> volts, SimTime t);

  const ExgAfeConfig& config() const { return cfg_; }
  std::uint32_t next_sequence() const { return sequence_; }

 private:
  ExgAfeConfig cfg_;
  double alpha_;
  std::vector<double> state_;
  bool primed_ = false;
  std::uint32_t sequence_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace wearsim::afe
