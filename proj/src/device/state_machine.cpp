#include "wearsim/device/state_machine.hpp"

namespace wearsim::device {

namespace {

CommandOutcome reply(DeviceMode next, const HostCommand& cmd, bool accepted, std::string reason = {}) {
  CommandOutcome out;
  out.next = next;
  out.ack = Ack{cmd.id, accepted, next, std::move(reason)};
  return out;
}

}  // namespace

CommandOutcome handle_command(DeviceMode state, const DeviceConfig& config, DeviceMode selected,
                              const HostCommand& cmd) {
  if (state == DeviceMode::SLEEP) return CommandOutcome{state, {}, {}, {}};
  if (state == DeviceMode::BOOT) return reply(state, cmd, false, "not connected");
  try {
    cmd.validate();
  } catch (const ParameterError& e) {
    return reply(state, cmd, false, e.what());
  }

  const bool measuring = state == DeviceMode::STREAMING || state == DeviceMode::EDGE_COMPUTE;
  if (measuring) {
    if (cmd.kind == CommandKind::STOP) return reply(DeviceMode::CONNECTED_IDLE, cmd, true);
    return reply(state, cmd, false, to_string(cmd.kind) + " not allowed in " + to_string(state));
  }

  switch (cmd.kind) {
    case CommandKind::SET_MODE: {
      CommandOutcome out = reply(state, cmd, true);
      out.selected_mode = *cmd.mode;
      return out;
    }
    case CommandKind::START: {
      const DeviceMode target = cmd.mode.value_or(selected);
      if (target == DeviceMode::EDGE_COMPUTE && !config.edge_capable()) {
        return reply(state, cmd, false, "FFT size for fs=" + std::to_string(config.fs) + " is not supported");
      }
      return reply(target, cmd, true);
    }
    case CommandKind::STOP: return reply(state, cmd, false, "not measuring");
    case CommandKind::SET_PARAMS: {
      DeviceConfig next = cmd.params.applied_to(config);
      try {
        next.validate();
      } catch (const ParameterError& e) {
        return reply(state, cmd, false, e.what());
      }
      next.config_id = static_cast<std::uint8_t>(config.config_id + 1);
      CommandOutcome out = reply(state, cmd, true);
      out.config = std::move(next);
      return out;
    }
    case CommandKind::SLEEP: return reply(DeviceMode::SLEEP, cmd, true);
  }
  return reply(state, cmd, false, "unknown command");
}

DeviceMode wake(DeviceMode state) { return state == DeviceMode::SLEEP ? DeviceMode::CONNECTED_IDLE : state; }

}  // namespace wearsim::device
