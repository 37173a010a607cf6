#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wearsim/afe/exg.hpp"
#include "wearsim/afe/ppg_sensor.hpp"

namespace wearsim::device {

enum class DeviceMode : std::uint8_t { BOOT = 0, CONNECTED_IDLE = 1, STREAMING = 2, EDGE_COMPUTE = 3, SLEEP = 4 };

inline constexpr DeviceMode kAllModes[] = {DeviceMode::BOOT, DeviceMode::CONNECTED_IDLE, DeviceMode::STREAMING,
                                           DeviceMode::EDGE_COMPUTE, DeviceMode::SLEEP};

std::string to_string(DeviceMode mode);
DeviceMode device_mode_from_string(const std::string& s);

/// What an edge hop transmits per channel: the strongest stimulus power
/// (one float) or all twelve harmonic bin powers.
enum class PayloadMode : std::uint8_t { SUMMARY_1FP = 0, BINS_12FP = 1 };

std::string to_string(PayloadMode mode);
PayloadMode payload_mode_from_string(const std::string& s);

/// The knob set the host can change while the device is idle.
struct DeviceConfig {
  int eeg_channels = 8;
  int fs = 1000;
  int gain = 6;
  afe::AfeMode afe_mode = afe::AfeMode::HIGH_RESOLUTION;
  afe::PpgConfig ppg;
  int hop_ms = 50;
  PayloadMode payload_mode = PayloadMode::SUMMARY_1FP;
  std::vector<double> stim_freqs{1.0, 3.125, 7.8125, 10.6125};
  std::uint8_t config_id = 0;
  /// Simulation switch for the AFE noise source; not settable over the link.
  bool afe_noise = true;

  /// Smallest power of two covering one second of samples.
  Eigen::Index fft_size() const;
  /// New samples between successive edge results.
  int hop_samples() const { return fs * hop_ms / 1000; }
  bool edge_capable() const;

  afe::ExgAfeConfig afe_config() const;
  void validate() const;
};

}  // namespace wearsim::device
