#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wearsim/core/error.hpp"
#include "wearsim/core/time.hpp"
#include "wearsim/device/command.hpp"
#include "wearsim/link/channel.hpp"

namespace wearsim::host {

/// Scenario syntax error; what() carries "<origin>:<line>: ...".
class ScenarioError : public ParameterError {
 public:
  ScenarioError(const std::string& origin, int line, const std::string& msg)
      : ParameterError(origin + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class SourceKind { ZERO, BACKGROUND, ALPHA, SSVEP, PPG, FILE };

std::string to_string(SourceKind kind);

struct SourceSpec {
  SourceKind kind = SourceKind::ZERO;
  double source_fs = 0.0;  // 0: the device sample rate
  double rms_uv = 5.0;     // background
  double open_s = 30.0;    // alpha: eyes open first, then closed
  double closed_s = 30.0;
  double snr_db = 10.0;    // ssvep
  double trial_s = 25.0;
  double rest_s = 10.0;
  int repetitions = 3;
  std::uint64_t order_seed = 0;
  double heart_rate_bpm = 60.0;  // ppg
  std::vector<std::string> files;
};

struct TimedCommand {
  SimTime at;
  device::HostCommand command;
  int line = 0;
};

/// Declarative experiment: device configuration, signal source, link
/// conditions, a timed command script, IMU taps and requested reports.
struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration_s = 10.0;
  bool afe_noise = true;
  device::DeviceConfig device;
  SourceSpec source;
  link::ChannelModel channel;
  std::size_t ring_capacity = 15;
  std::vector<TimedCommand> commands;
  std::vector<SimTime> taps;
  std::map<std::string, std::string> reports;  // report kind -> output path
  std::filesystem::path base_dir;              // for relative source files

  void validate() const;
};

/// `START [MODE]`, `STOP`, `SLEEP`, `SET_MODE MODE`, or
/// `SET_PARAMS key=value ...` with keys eeg_channels, fs, gain, hop_ms,
/// ppg_rate, payload, afe_mode.
device::HostCommand parse_command_text(const std::string& text);
std::string format_command(const device::HostCommand& cmd);

Scenario parse_scenario(std::istream& is, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace wearsim::host
