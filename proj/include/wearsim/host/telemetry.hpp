#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wearsim/device/command.hpp"
#include "wearsim/host/simulation.hpp"

namespace wearsim::host {

/// Maximum display rate per channel; logs stay at the full rate.
inline constexpr int kDisplayRateHz = 250;

/// Parse one inbound line. Accepted forms:
///   {"type":"command","text":"SET_PARAMS fs=2000"}
///   {"type":"command","kind":"START","mode":"EDGE_COMPUTE","params":{"fs":2000}}
/// Throws ParameterError on malformed input.
device::HostCommand parse_command_message(const std::string& line);

nlohmann::json config_json(const device::DeviceConfig& cfg);
nlohmann::json state_message(const StateRecord& s);
nlohmann::json ack_message(SimTime t, const device::Ack& ack);
nlohmann::json loss_message(const LossRecord& l);
nlohmann::json link_message(SimTime t, const link::LinkStats& s, std::size_t ring_occupancy);
nlohmann::json energy_message(SimTime t, const device::EnergyLedger& ledger);
nlohmann::json bins_message(const BinRecord& b, const device::DeviceConfig& cfg);
nlohmann::json error_message(const std::string& what);

/// Line-delimited JSON over TCP. One I/O thread accepts clients, reads
/// inbound lines and flushes outbound buffers; publish() may be called
/// from the simulation thread at any time.
class TelemetryServer {
 public:
  struct Inbound {
    int client = 0;
    device::HostCommand command;
  };

  /// Port 0 picks an ephemeral port; see port().
  explicit TelemetryServer(std::uint16_t port = 0, const std::string& bind_address = "127.0.0.1");
  ~TelemetryServer();
  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  std::uint16_t port() const { return port_; }
  void publish(const nlohmann::json& msg);
  void send_to(int client, const nlohmann::json& msg);
  /// Message sent to every new client before anything else.
  void set_greeting(const nlohmann::json& msg);
  /// Commands received since the last call, in arrival order.
  std::vector<Inbound> take_commands();
  std::size_t client_count() const;
  void stop();

 private:
  struct Client {
    int fd = -1;
    std::string in;
    std::string out;
  };

  void loop();
  void wake();
  void handle_line(int id, Client& c, const std::string& line);
  void close_client(int id);

  int listen_fd_ = -1;
  int wake_pipe_[2] = {-1, -1};
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  mutable std::mutex mu_;
  std::map<int, Client> clients_;
  int next_id_ = 1;
  std::string greeting_;
  std::vector<Inbound> inbound_;
  std::thread thread_;
};

/// Simulation observer that turns events into telemetry messages, with
/// samples decimated to at most kDisplayRateHz per channel and batched.
class TelemetryBridge : public SimulationObserver {
 public:
  TelemetryBridge(TelemetryServer& server, const Simulation* sim = nullptr) : server_(server), sim_(sim) {}
  void attach(const Simulation* sim) { sim_ = sim; }

  void on_sample(const SampleRecord& rec, const device::DeviceConfig& cfg) override;
  void on_bins(const BinRecord& rec, const device::DeviceConfig& cfg) override;
  void on_state(const StateRecord& rec) override;
  void on_ack(SimTime t, const device::Ack& ack) override;
  void on_loss(const LossRecord& rec) override;
  void on_snapshot(SimTime t, const link::LinkStats& stats, const device::EnergyLedger& ledger) override;

  /// Send any partially filled sample batch.
  void flush();

 private:
  TelemetryServer& server_;
  const Simulation* sim_;
  std::uint64_t counter_ = 0;
  std::uint8_t batch_config_ = 0;
  double batch_rate_ = 0.0;
  SimTime batch_start_;
  std::vector<double> times_;
  std::vector<std::vector<double>> eeg_;
  std::vector<std::vector<double>> ppg_;
  device::DeviceConfig batch_cfg_;
};

}  // namespace wearsim::host
