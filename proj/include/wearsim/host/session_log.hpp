#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wearsim/core/time.hpp"
#include "wearsim/device/config.hpp"
#include "wearsim/link/framing.hpp"

namespace wearsim::host {

struct SampleRecord {
  SimTime time;
  std::uint8_t config_id = 0;
  std::vector<std::int32_t> eeg;
  std::vector<std::uint32_t> ppg;
  bool ppg_fresh = false;
};

/// One edge result. `harmonics` is channel-major, stimulus by harmonic;
/// empty in summary payload mode.
struct BinRecord {
  SimTime time;
  std::uint8_t config_id = 0;
  std::vector<float> summary;
  std::vector<float> harmonics;
};

struct LossRecord {
  SimTime time;
  std::uint16_t count = 0;
  std::uint16_t next_seq = 0;
};

struct StateRecord {
  SimTime time;
  device::DeviceMode mode = device::DeviceMode::BOOT;
  std::string cause;
};

/// A host command and, once it arrived, the device's answer.
struct CommandRecord {
  SimTime sent;
  std::uint16_t id = 0;
  std::string text;
  std::optional<SimTime> answered;
  bool accepted = false;
  std::string reason;
};

/// Ground-truth interval from the signal source (an SSVEP trial, an eyes
/// open/closed epoch).
struct MarkRecord {
  SimTime start;
  SimTime end;
  std::string label;
};

/// Everything the host saw in one run. Records of each kind are in time
/// order; configurations are keyed by config_id.
struct SessionLog {
  std::string scenario;
  std::uint64_t seed = 0;
  std::map<std::uint8_t, device::DeviceConfig> configs;
  std::vector<SampleRecord> samples;
  std::vector<BinRecord> bins;
  std::vector<LossRecord> losses;
  std::vector<StateRecord> states;
  std::vector<CommandRecord> commands;
  std::vector<MarkRecord> marks;

  const device::DeviceConfig& config(std::uint8_t id) const;
  std::size_t lost_packets() const;
};

std::vector<float> flatten_harmonics(const link::EdgeResult& r);
std::vector<dsp::ChannelBinPowers> unflatten_harmonics(const BinRecord& r, const device::DeviceConfig& cfg);

/// CSV: `#`-prefixed metadata lines (scenario, seed, one JSON config per
/// id), a header `time_ns,record,config_id,values`, then one row per
/// record. Record names are sample, bins, summary, loss, state, command
/// and mark.
void write_session_csv(std::ostream& os, const SessionLog& log);
SessionLog read_session_csv(std::istream& is);

/// Binary, little-endian: magic "BGSL", version u16, metadata JSON
/// (u32 length + bytes), then records of type u8, time_ns i64, config_id
/// u8, value count u32 and the values (i32 codes, f32 powers, or a
/// length-prefixed strings for state, command and mark records).
void write_session_binary(std::ostream& os, const SessionLog& log);
SessionLog read_session_binary(std::istream& is);

/// Format chosen by extension: `.csv` text, anything else binary.
void save_session(const std::filesystem::path& path, const SessionLog& log);
SessionLog load_session(const std::filesystem::path& path);

}  // namespace wearsim::host
