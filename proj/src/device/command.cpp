#include "wearsim/device/command.hpp"

#include <algorithm>

namespace wearsim::device {

namespace {

enum Tag : std::uint8_t { kChannels = 1, kFs = 2, kGain = 3, kHop = 4, kPpgRate = 5, kPayload = 6, kAfeMode = 7 };
constexpr std::uint8_t kNoMode = 0xff;

void put_i32(std::vector<std::uint8_t>& out, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>((u >> s) & 0xff));
}

std::int32_t get_i32(std::span<const std::uint8_t> b) {
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u = (u << 8) | b[static_cast<std::size_t>(i)];
  return static_cast<std::int32_t>(u);
}

}  // namespace

std::string to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::SET_MODE: return "SET_MODE";
    case CommandKind::START: return "START";
    case CommandKind::STOP: return "STOP";
    case CommandKind::SET_PARAMS: return "SET_PARAMS";
    case CommandKind::SLEEP: return "SLEEP";
  }
  return "STOP";
}

CommandKind command_kind_from_string(const std::string& s) {
  for (auto k : {CommandKind::SET_MODE, CommandKind::START, CommandKind::STOP, CommandKind::SET_PARAMS,
                 CommandKind::SLEEP}) {
    if (to_string(k) == s) return k;
  }
  throw ParameterError("unknown command '" + s + "'");
}

bool ConfigDelta::empty() const {
  return !eeg_channels && !fs && !gain && !hop_ms && !ppg_rate && !payload_mode && !afe_mode;
}

DeviceConfig ConfigDelta::applied_to(const DeviceConfig& base) const {
  DeviceConfig c = base;
  if (eeg_channels) c.eeg_channels = *eeg_channels;
  if (fs) c.fs = *fs;
  if (gain) c.gain = *gain;
  if (hop_ms) c.hop_ms = *hop_ms;
  if (ppg_rate) {
    c.ppg.enabled = *ppg_rate != 0;
    if (*ppg_rate != 0) c.ppg.rate = *ppg_rate;
  }
  if (payload_mode) c.payload_mode = *payload_mode;
  if (afe_mode) c.afe_mode = *afe_mode;
  return c;
}

void HostCommand::validate() const {
  if (kind == CommandKind::SET_PARAMS) require(!params.empty(), "SET_PARAMS must carry at least one field");
  if (kind == CommandKind::SET_MODE) require(mode.has_value(), "SET_MODE requires a mode");
  if (mode) {
    require(*mode == DeviceMode::STREAMING || *mode == DeviceMode::EDGE_COMPUTE,
            "measurement mode must be STREAMING or EDGE_COMPUTE");
  }
}

std::vector<std::uint8_t> encode_command(const HostCommand& cmd) {
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(cmd.kind),
                                cmd.mode ? static_cast<std::uint8_t>(*cmd.mode) : kNoMode};
  auto field = [&](Tag tag, const std::optional<int>& v) {
    if (!v) return;
    out.push_back(tag);
    put_i32(out, *v);
  };
  const ConfigDelta& p = cmd.params;
  field(kChannels, p.eeg_channels);
  field(kFs, p.fs);
  field(kGain, p.gain);
  field(kHop, p.hop_ms);
  field(kPpgRate, p.ppg_rate);
  if (p.payload_mode) field(kPayload, static_cast<int>(*p.payload_mode));
  if (p.afe_mode) field(kAfeMode, static_cast<int>(*p.afe_mode));
  return out;
}

HostCommand decode_command(std::span<const std::uint8_t> payload, std::uint16_t id) {
  if (payload.size() < 2 || (payload.size() - 2) % 5 != 0) throw FramingError("malformed command payload");
  HostCommand cmd;
  cmd.id = id;
  if (payload[0] < 1 || payload[0] > 5) throw FramingError("unknown command kind");
  cmd.kind = static_cast<CommandKind>(payload[0]);
  if (payload[1] != kNoMode) {
    if (payload[1] > 4) throw FramingError("unknown mode in command");
    cmd.mode = static_cast<DeviceMode>(payload[1]);
  }
  for (std::size_t i = 2; i < payload.size(); i += 5) {
    const std::int32_t v = get_i32(payload.subspan(i + 1, 4));
    switch (payload[i]) {
      case kChannels: cmd.params.eeg_channels = v; break;
      case kFs: cmd.params.fs = v; break;
      case kGain: cmd.params.gain = v; break;
      case kHop: cmd.params.hop_ms = v; break;
      case kPpgRate: cmd.params.ppg_rate = v; break;
      case kPayload:
        if (v != 0 && v != 1) throw FramingError("bad payload mode in command");
        cmd.params.payload_mode = static_cast<PayloadMode>(v);
        break;
      case kAfeMode:
        if (v != 0 && v != 1) throw FramingError("bad AFE mode in command");
        cmd.params.afe_mode = static_cast<afe::AfeMode>(v);
        break;
      default: throw FramingError("unknown command field tag");
    }
  }
  return cmd;
}

std::vector<std::uint8_t> encode_ack(const Ack& ack) {
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(ack.command_id >> 8),
                                static_cast<std::uint8_t>(ack.command_id & 0xff),
                                static_cast<std::uint8_t>(ack.accepted ? 1 : 0), static_cast<std::uint8_t>(ack.state)};
  const std::size_t len = std::min<std::size_t>(ack.reason.size(), 200);
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), ack.reason.begin(), ack.reason.begin() + static_cast<std::ptrdiff_t>(len));
  return out;
}

Ack decode_ack(std::span<const std::uint8_t> payload) {
  if (payload.size() < 5 || payload.size() != 5u + payload[4]) throw FramingError("malformed ack payload");
  if (payload[3] > 4) throw FramingError("unknown state in ack");
  Ack a;
  a.command_id = static_cast<std::uint16_t>((payload[0] << 8) | payload[1]);
  a.accepted = payload[2] != 0;
  a.state = static_cast<DeviceMode>(payload[3]);
  a.reason.assign(payload.begin() + 5, payload.end());
  return a;
}

}  // namespace wearsim::device
