#pragma once

#include <filesystem>
#include <iosfwd>

#include "wearsim/synth/trace.hpp"

namespace wearsim::synth {

/// CSV layout:
///   kind,fs
///   EEG,1000
///   value
///   <one decimal value per sample>
void write_trace_csv(std::ostream& os, const AnalogTrace& trace);
AnalogTrace read_trace_csv(std::istream& is);

/// Binary layout, little-endian:
///   bytes 0-3   magic "BGTR"
///   byte  4     kind (0 EEG, 1 PPG_RED, 2 PPG_IR)
///   bytes 5-11  reserved, zero
///   bytes 12-15 fs as float32
///   then one float32 per sample
void write_trace_binary(std::ostream& os, const AnalogTrace& trace);
AnalogTrace read_trace_binary(std::istream& is);

void save_trace(const std::filesystem::path& path, const AnalogTrace& trace);
AnalogTrace load_trace(const std::filesystem::path& path);

}  // namespace wearsim::synth
