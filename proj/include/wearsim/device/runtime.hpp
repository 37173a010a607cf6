#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wearsim/afe/exg.hpp"
#include "wearsim/device/command.hpp"
#include "wearsim/device/cost_model.hpp"
#include "wearsim/device/energy.hpp"
#include "wearsim/device/state_machine.hpp"
#include "wearsim/dsp/ssvep.hpp"
#include "wearsim/link/packet.hpp"
#include "wearsim/synth/trace.hpp"

namespace wearsim::device {

/// Analog inputs seen by the sensors. Missing EEG traces read 0 V; missing
/// PPG traces read zero reflectance.
struct SignalSources {
  std::span<const synth::AnalogTrace> eeg;
  const synth::AnalogTrace* red = nullptr;
  const synth::AnalogTrace* ir = nullptr;
};

struct EdgeHopResult {
  dsp::SsvepBinReport report;
  std::vector<link::Packet> packets;
  CycleReport cycles;
};

struct TickOutput {
  std::vector<link::Packet> packets;
  std::optional<EdgeHopResult> hop;
  bool saturated = false;
};

struct CommandResult {
  std::optional<Ack> ack;
  std::vector<link::Packet> flushed;  // partial raw packet sent on STOP
};

/// Firmware model: mode state machine, acquisition, streaming framing,
/// sliding-window edge processing and the energy ledger.
///
/// The host drives it with tick() at frame_period() intervals while a
/// measurement runs and with accrue() to advance the energy ledger.
class Device {
 public:
  explicit Device(DeviceConfig cfg = {}, std::uint64_t seed = 1, PowerCalibration cal = PowerCalibration::defaults(),
                  ClusterCostModel cost = {});

  DeviceMode mode() const { return mode_; }
  DeviceMode selected_mode() const { return selected_; }
  const DeviceConfig& config() const { return cfg_; }
  const PowerCalibration& calibration() const { return cal_; }
  const ClusterCostModel& cost_model() const { return cost_; }

  void connect(SimTime t);
  CommandResult handle_command(const HostCommand& cmd, SimTime t);
  /// Decode a CMD packet and answer with an ACK packet (nothing while asleep).
  std::optional<link::Packet> receive(const link::Packet& cmd, SimTime t, std::vector<link::Packet>* flushed = nullptr);
  /// IMU double tap; returns true when it woke the device.
  bool imu_wake(SimTime t);

  /// Acquisition period of the running measurement (EEG rate, or the PPG
  /// rate when no EEG channel is active).
  SimTime frame_period() const;
  bool measuring() const { return mode_ == DeviceMode::STREAMING || mode_ == DeviceMode::EDGE_COMPUTE; }

  TickOutput tick(const SignalSources& sources, SimTime t);
  std::vector<link::Packet> run_streaming_tick(const afe::QuantizedFrame& frame);
  EdgeHopResult run_edge_hop(std::span<const Eigen::ArrayXf> windows, SimTime t);

  /// Advance the ledger by dt with the current mode's baseline plus radio
  /// air time and any compute energy since the last call.
  void accrue(SimTime dt, SimTime radio_tx = {}, SimTime radio_rx = {});
  const EnergyLedger& ledger() const { return ledger_; }

  std::uint64_t hops() const { return hops_; }
  std::uint64_t skipped_hops() const { return skipped_hops_; }

  /// Line-delimited debug trace: `time_us event state`.
  void set_trace(std::ostream* os) { trace_ = os; }

 private:
  void log(SimTime t, const std::string& event);
  void begin_measurement(SimTime t);
  afe::QuantizedFrame acquire(const SignalSources& sources, SimTime t);
  std::optional<EdgeHopResult> buffer_for_edge(const afe::QuantizedFrame& frame, SimTime t);

  DeviceConfig cfg_;
  PowerCalibration cal_;
  ClusterCostModel cost_;
  std::uint64_t seed_;
  DeviceMode mode_ = DeviceMode::BOOT;
  DeviceMode selected_ = DeviceMode::STREAMING;

  std::unique_ptr<afe::ExgAfe> afe_;
  std::uint32_t frame_seq_ = 0;
  std::optional<SimTime> next_ppg_;
  std::vector<std::uint32_t> last_ppg_;
  std::vector<afe::QuantizedFrame> pending_;

  std::vector<Eigen::ArrayXf> window_;
  Eigen::Index write_pos_ = 0;
  Eigen::Index filled_ = 0;
  int since_hop_ = 0;
  bool hop_due_ = true;

  link::SequenceCounter data_seq_;
  link::SequenceCounter ack_seq_;
  EnergyLedger ledger_;
  double pending_compute_uj_ = 0.0;
  std::uint64_t hops_ = 0;
  std::uint64_t skipped_hops_ = 0;
  std::uint64_t starts_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace wearsim::device
