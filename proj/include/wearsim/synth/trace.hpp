#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>

#include "wearsim/core/error.hpp"
#include "wearsim/core/time.hpp"

namespace wearsim::synth {

enum class TraceKind : std::uint8_t { EEG = 0, PPG_RED = 1, PPG_IR = 2 };

std::string to_string(TraceKind kind);
TraceKind trace_kind_from_string(const std::string& s);

/// Uniformly sampled analog-domain signal: volts for EEG, normalised
/// reflectance for PPG.
struct AnalogTrace {
  Eigen::ArrayXd values;
  double sample_rate = 1.0;
  TraceKind kind = TraceKind::EEG;

  double duration() const { return static_cast<double>(values.size()) / sample_rate; }
  Eigen::Index size() const { return values.size(); }

  /// Sample-and-hold value at simulated time t (clamped to the trace).
  double at(SimTime t) const {
    if (values.size() == 0) return 0.0;
    auto i = static_cast<Eigen::Index>(std::floor(t.seconds() * sample_rate + 1e-9));
    if (i < 0) i = 0;
    if (i >= values.size()) i = values.size() - 1;
    return values(i);
  }
};

/// Number of samples for a duration at a rate: round(fs * duration).
inline Eigen::Index sample_count(double duration_s, double fs) {
  return static_cast<Eigen::Index>(std::llround(duration_s * fs));
}

/// Concatenate traces of equal rate and kind.
AnalogTrace concatenate(const AnalogTrace& a, const AnalogTrace& b);

}  // namespace wearsim::synth
