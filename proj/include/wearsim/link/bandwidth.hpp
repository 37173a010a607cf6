#pragma once

#include "wearsim/device/config.hpp"

namespace wearsim::link {

/// Application-level bits per second to stream raw samples:
/// frame bytes * 8 * frame rate (channels * 24 * fs for EEG only).
double streaming_throughput(const device::DeviceConfig& cfg);

/// Bits per second of edge results: channels * 32 * values * (1000 / hop_ms),
/// with one value per channel in summary mode and twelve in bins mode.
double edge_throughput(const device::DeviceConfig& cfg);

/// Fraction of streaming bandwidth saved by sending edge results instead.
double reduction_ratio(double stream_bps, double edge_bps);

}  // namespace wearsim::link
