#include "wearsim/device/config.hpp"

#include "wearsim/dsp/fft.hpp"

namespace wearsim::device {

std::string to_string(DeviceMode mode) {
  switch (mode) {
    case DeviceMode::BOOT: return "BOOT";
    case DeviceMode::CONNECTED_IDLE: return "CONNECTED_IDLE";
    case DeviceMode::STREAMING: return "STREAMING";
    case DeviceMode::EDGE_COMPUTE: return "EDGE_COMPUTE";
    case DeviceMode::SLEEP: return "SLEEP";
  }
  return "BOOT";
}

DeviceMode device_mode_from_string(const std::string& s) {
  for (DeviceMode m : kAllModes) {
    if (to_string(m) == s) return m;
  }
  if (s == "EDGE") return DeviceMode::EDGE_COMPUTE;
  if (s == "IDLE") return DeviceMode::CONNECTED_IDLE;
  throw ParameterError("unknown device mode '" + s + "'");
}

std::string to_string(PayloadMode mode) { return mode == PayloadMode::BINS_12FP ? "BINS_12FP" : "SUMMARY_1FP"; }

PayloadMode payload_mode_from_string(const std::string& s) {
  if (s == "SUMMARY_1FP" || s == "SUMMARY") return PayloadMode::SUMMARY_1FP;
  if (s == "BINS_12FP" || s == "BINS") return PayloadMode::BINS_12FP;
  throw ParameterError("unknown payload mode '" + s + "'");
}

Eigen::Index DeviceConfig::fft_size() const { return dsp::next_power_of_two(fs); }

bool DeviceConfig::edge_capable() const {
  const Eigen::Index n = fft_size();
  return n >= 256 && n <= 4096 && hop_samples() >= 1;
}

afe::ExgAfeConfig DeviceConfig::afe_config() const {
  afe::ExgAfeConfig c;
  c.active_channels = eeg_channels;
  c.gain = gain;
  c.data_rate = fs;
  c.mode = afe_mode;
  c.noise_enabled = afe_noise;
  return c;
}

void DeviceConfig::validate() const {
  afe_config().validate();
  ppg.validate();
  require(hop_ms > 0, "hop must be positive");
  require(!stim_freqs.empty(), "at least one stimulation frequency is required");
  for (double f : stim_freqs) require(f > 0.0, "stimulation frequency must be positive");
}

}  // namespace wearsim::device
