#pragma once

#include <optional>

#include "wearsim/device/command.hpp"

namespace wearsim::device {

/// Result of presenting one host command to the firmware.
struct CommandOutcome {
  DeviceMode next = DeviceMode::BOOT;
  std::optional<DeviceConfig> config;       // set by an accepted SET_PARAMS
  std::optional<DeviceMode> selected_mode;  // set by an accepted SET_MODE
  std::optional<Ack> ack;                   // empty while asleep: the radio is off
};

/// Legal transitions:
///   CONNECTED_IDLE --START--> STREAMING | EDGE_COMPUTE
///   CONNECTED_IDLE --SLEEP--> SLEEP
///   STREAMING | EDGE_COMPUTE --STOP--> CONNECTED_IDLE
///   SLEEP --double tap--> CONNECTED_IDLE   (see wake())
/// SET_MODE and SET_PARAMS are accepted only in CONNECTED_IDLE and do not
/// change the mode. Anything else is NACKed with the state unchanged.
CommandOutcome handle_command(DeviceMode state, const DeviceConfig& config, DeviceMode selected,
                              const HostCommand& cmd);

/// IMU wake: SLEEP -> CONNECTED_IDLE, every other state unchanged.
DeviceMode wake(DeviceMode state);

}  // namespace wearsim::device
