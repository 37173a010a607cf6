#include "wearsim/link/bandwidth.hpp"

#include "wearsim/dsp/ssvep.hpp"
#include "wearsim/link/framing.hpp"

namespace wearsim::link {

double streaming_throughput(const device::DeviceConfig& cfg) {
  const auto type = raw_packet_type(cfg);
  if (!type) return 0.0;
  const double rate = cfg.eeg_channels > 0 ? cfg.fs : cfg.ppg.rate;
  return static_cast<double>(raw_frame_bytes(cfg)) * 8.0 * rate;
}

double edge_throughput(const device::DeviceConfig& cfg) {
  require(cfg.hop_ms > 0, "hop must be positive");
  const double values = cfg.payload_mode == device::PayloadMode::SUMMARY_1FP
                            ? 1.0
                            : static_cast<double>(cfg.stim_freqs.size() * dsp::kHarmonics);
  return cfg.eeg_channels * 32.0 * values * (1000.0 / cfg.hop_ms);
}

double reduction_ratio(double stream_bps, double edge_bps) {
  require(stream_bps > 0.0, "streaming throughput must be positive");
  return 1.0 - edge_bps / stream_bps;
}

}  // namespace wearsim::link
