#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wearsim/device/config.hpp"

namespace wearsim::device {

enum class CommandKind : std::uint8_t { SET_MODE = 1, START = 2, STOP = 3, SET_PARAMS = 4, SLEEP = 5 };

std::string to_string(CommandKind kind);
CommandKind command_kind_from_string(const std::string& s);

/// Partial configuration update; unset fields keep their value.
/// ppg_rate = 0 turns the optical sensor off.
struct ConfigDelta {
  std::optional<int> eeg_channels;
  std::optional<int> fs;
  std::optional<int> gain;
  std::optional<int> hop_ms;
  std::optional<int> ppg_rate;
  std::optional<PayloadMode> payload_mode;
  std::optional<afe::AfeMode> afe_mode;

  bool empty() const;
  DeviceConfig applied_to(const DeviceConfig& base) const;
  bool operator==(const ConfigDelta&) const = default;
};

struct HostCommand {
  CommandKind kind = CommandKind::STOP;
  std::optional<DeviceMode> mode;
  ConfigDelta params;
  std::uint16_t id = 0;

  /// SET_PARAMS needs a non-empty delta; SET_MODE and START accept only
  /// measurement modes.
  void validate() const;
  bool operator==(const HostCommand&) const = default;
};

struct Ack {
  std::uint16_t command_id = 0;
  bool accepted = false;
  DeviceMode state = DeviceMode::BOOT;
  std::string reason;

  bool operator==(const Ack&) const = default;
};

/// CMD payload: kind u8, mode u8 (0xff when absent), then (tag u8, value
/// i32 big-endian) pairs for each set delta field. The command id travels
/// in the packet sequence number.
std::vector<std::uint8_t> encode_command(const HostCommand& cmd);
HostCommand decode_command(std::span<const std::uint8_t> payload, std::uint16_t id);

/// ACK payload: command id u16 BE, accepted u8, state u8, reason length u8,
/// reason bytes.
std::vector<std::uint8_t> encode_ack(const Ack& ack);
Ack decode_ack(std::span<const std::uint8_t> payload);

}  // namespace wearsim::device
