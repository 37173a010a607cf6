#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "wearsim/device/runtime.hpp"
#include "wearsim/host/scenario.hpp"
#include "wearsim/host/session_log.hpp"
#include "wearsim/link/channel.hpp"
#include "wearsim/link/dongle.hpp"
#include "wearsim/link/framing.hpp"
#include "wearsim/link/packet_log.hpp"
#include "wearsim/synth/trace.hpp"

namespace wearsim::host {

/// Analog inputs built from a scenario's [source] section, plus the
/// ground-truth intervals they contain.
struct SourceSet {
  std::vector<synth::AnalogTrace> eeg;
  std::optional<synth::AnalogTrace> red;
  std::optional<synth::AnalogTrace> ir;
  std::vector<MarkRecord> marks;
  std::vector<std::string> warnings;

  device::SignalSources view() const;
};

SourceSet build_sources(const Scenario& sc);

/// Hooks called from the simulation loop, in simulated-time order.
class SimulationObserver {
 public:
  virtual ~SimulationObserver() = default;
  virtual void on_sample(const SampleRecord&, const device::DeviceConfig&) {}
  virtual void on_bins(const BinRecord&, const device::DeviceConfig&) {}
  virtual void on_state(const StateRecord&) {}
  virtual void on_ack(SimTime, const device::Ack&) {}
  virtual void on_loss(const LossRecord&) {}
  /// Every `snapshot_period` of simulated time.
  virtual void on_snapshot(SimTime, const link::LinkStats&, const device::EnergyLedger&) {}
};

struct SimulationOptions {
  std::ostream* device_trace = nullptr;
  bool record_packets = false;
  bool log_samples = true;
  SimulationObserver* observer = nullptr;
  SimTime link_step = SimTime::from_ms(1);
  SimTime snapshot_period = SimTime::from_ms(100);
};

struct ModeTotals {
  double seconds = 0.0;
  device::DomainValues energy_uj{};
};

struct SimulationResult {
  SessionLog log;
  link::LinkStats link;
  device::EnergyLedger ledger;
  std::map<device::DeviceMode, ModeTotals> by_mode;
  std::vector<link::PacketRecord> packets;
  std::uint64_t hops = 0;
  std::uint64_t skipped_hops = 0;
  std::uint64_t saturated_frames = 0;
  std::size_t reassembly_discards = 0;
  std::vector<std::string> warnings;
  SimTime end;
};

/// Discrete-event run of one scenario. Events are ordered by (time,
/// priority, insertion order); at equal times the link step covering
/// [t, t + step) runs first, then commands and taps, then acquisition,
/// then host-side receptions.
class Simulation {
 public:
  explicit Simulation(const Scenario& sc, SimulationOptions opts = {});
  Simulation(const Scenario& sc, SourceSet sources, SimulationOptions opts = {});

  SimTime now() const { return now_; }
  SimTime end() const { return end_; }
  bool done() const { return queue_.empty(); }

  /// Process every event strictly before `until` (clamped to the end).
  void run_until(SimTime until);
  void run() { run_until(end_); }

  /// Send a host command at the current simulated time. Returns its id.
  std::uint16_t submit(device::HostCommand cmd);

  const device::Device& device() const { return device_; }
  const device::DeviceConfig& host_config() const { return host_cfg_; }
  const device::EnergyLedger& ledger() const { return device_.ledger(); }
  link::LinkStats link_stats() const { return link_.stats(); }
  const SessionLog& log() const { return result_.log; }

  SimulationResult finish();

 private:
  enum class Kind : std::uint8_t { LINK_STEP, HOST_SEND, DEVICE_CMD, TAP, SAMPLE_TICK, HOST_RX };

  struct Event {
    SimTime time;
    int priority = 0;
    std::uint64_t order = 0;
    Kind kind = Kind::LINK_STEP;
    std::uint64_t epoch = 0;
    std::int64_t index = 0;
    std::shared_ptr<link::Packet> packet;
    std::shared_ptr<device::HostCommand> command;

    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (priority != o.priority) return priority > o.priority;
      return order > o.order;
    }
  };

  void schedule(Event e);
  void dispatch(const Event& e);
  void link_step(SimTime t);
  void host_send(SimTime t, const device::HostCommand& cmd);
  void device_command(SimTime t, const link::Packet& p);
  void sample_tick(SimTime t, std::uint64_t epoch, std::int64_t index);
  void host_receive(SimTime t, const link::Packet& p);
  void note_state(SimTime t, device::DeviceMode before, const std::string& cause);
  void enqueue_data(SimTime t, std::vector<link::Packet> packets);
  void record(SimTime t, link::Direction d, const link::Packet& p);

  Scenario sc_;
  SimulationOptions opts_;
  SourceSet sources_;
  device::Device device_;
  link::DataLink link_;
  link::Dongle dongle_;
  device::DeviceConfig host_cfg_;
  link::EdgeReassembler reassembler_;
  std::map<std::uint16_t, device::HostCommand> in_flight_;
  std::uint16_t next_command_id_ = 1;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t order_ = 0;
  std::uint64_t epoch_ = 0;
  SimTime tick_origin_;
  SimTime now_;
  SimTime end_;
  SimTime next_snapshot_;
  SimTime pending_rx_;
  SimTime pending_tx_;
  std::size_t discards_before_ = 0;
  SimulationResult result_;
  bool finished_ = false;
};

SimulationResult run_scenario(const Scenario& sc, SimulationOptions opts = {});

}  // namespace wearsim::host
