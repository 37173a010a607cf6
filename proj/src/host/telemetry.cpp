#include "wearsim/host/telemetry.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "wearsim/afe/ppg_sensor.hpp"
#include "wearsim/host/scenario.hpp"

namespace wearsim::host {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxLine = 64 * 1024;
constexpr std::size_t kMaxBacklog = 8 * 1024 * 1024;
const SimTime kBatchPeriod = SimTime::from_ms(40);

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK); }

int get_int(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ParameterError(std::string("parameter ") + key + " must be an integer");
  return v.get<int>();
}

}  // namespace

device::HostCommand parse_command_message(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) throw ParameterError("message needs a string 'type'");
  if (j["type"] != "command") throw ParameterError("unknown message type '" + j["type"].get<std::string>() + "'");
  if (j.contains("text")) {
    if (!j["text"].is_string()) throw ParameterError("'text' must be a string");
    return parse_command_text(j["text"].get<std::string>());
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw ParameterError("command needs 'text' or 'kind'");
  device::HostCommand cmd;
  cmd.kind = device::command_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw ParameterError("'mode' must be a string");
    cmd.mode = device::device_mode_from_string(j["mode"].get<std::string>());
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    if (!p.is_object()) throw ParameterError("'params' must be an object");
    for (const auto& [key, value] : p.items()) {
      if (key == "eeg_channels") cmd.params.eeg_channels = get_int(p, "eeg_channels");
      else if (key == "fs") cmd.params.fs = get_int(p, "fs");
      else if (key == "gain") cmd.params.gain = get_int(p, "gain");
      else if (key == "hop_ms") cmd.params.hop_ms = get_int(p, "hop_ms");
      else if (key == "ppg_rate") cmd.params.ppg_rate = get_int(p, "ppg_rate");
      else if (key == "payload" && value.is_string()) cmd.params.payload_mode = device::payload_mode_from_string(value.get<std::string>());
      else if (key == "afe_mode" && value.is_string()) cmd.params.afe_mode = afe::afe_mode_from_string(value.get<std::string>());
      else throw ParameterError("unknown or mistyped parameter '" + key + "'");
    }
  }
  cmd.validate();
  return cmd;
}

json config_json(const device::DeviceConfig& cfg) {
  return json{{"config_id", cfg.config_id},       {"eeg_channels", cfg.eeg_channels},
              {"fs", cfg.fs},                     {"gain", cfg.gain},
              {"afe_mode", afe::to_string(cfg.afe_mode)}, {"hop_ms", cfg.hop_ms},
              {"payload", device::to_string(cfg.payload_mode)}, {"stim_freqs", cfg.stim_freqs},
              {"ppg_rate", cfg.ppg.enabled ? cfg.ppg.rate : 0}, {"fft_size", cfg.fft_size()}};
}

json state_message(const StateRecord& s) {
  return json{{"type", "state"}, {"t", s.time.seconds()}, {"mode", device::to_string(s.mode)}, {"cause", s.cause}};
}

json ack_message(SimTime t, const device::Ack& ack) {
  return json{{"type", "ack"},          {"t", t.seconds()},
              {"id", ack.command_id},   {"accepted", ack.accepted},
              {"state", device::to_string(ack.state)}, {"reason", ack.reason}};
}

json loss_message(const LossRecord& l) {
  return json{{"type", "loss"}, {"t", l.time.seconds()}, {"count", l.count}, {"next_seq", l.next_seq}};
}

json link_message(SimTime t, const link::LinkStats& s, std::size_t ring_occupancy) {
  return json{{"type", "link"},           {"t", t.seconds()},         {"emitted", s.emitted},
              {"delivered", s.delivered}, {"dropped", s.dropped},     {"buffered", s.buffered},
              {"occupancy", ring_occupancy}, {"delivered_bits", s.delivered_bits}};
}

json energy_message(SimTime t, const device::EnergyLedger& ledger) {
  json domains = json::object();
  for (device::Domain d : device::kAllDomains) {
    domains[device::to_string(d)] = {{"energy_uj", device::at(ledger.energy_uj, d)}, {"power_mw", device::at(ledger.power_mw, d)}};
  }
  return json{{"type", "energy"},
              {"t", t.seconds()},
              {"elapsed_s", ledger.elapsed_s},
              {"total_uj", ledger.total_uj()},
              {"power_mw", ledger.total_power_mw()},
              {"average_mw", ledger.average_power_mw()},
              {"domains", domains}};
}

json bins_message(const BinRecord& b, const device::DeviceConfig& cfg) {
  json j{{"type", "bins"}, {"t", b.time.seconds()}, {"config_id", b.config_id}, {"stim_freqs", cfg.stim_freqs},
         {"summary", b.summary}};
  if (!b.harmonics.empty()) {
    dsp::SsvepBinReport report;
    report.channels = unflatten_harmonics(b, cfg);
    Eigen::ArrayXd total = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(cfg.stim_freqs.size()));
    for (const auto& ch : report.channels) total += ch.stim_power;
    j["stim_power"] = std::vector<double>(total.data(), total.data() + total.size());
    j["predicted_hz"] = dsp::classify_ssvep(report);
  }
  return j;
}

json error_message(const std::string& what) { return json{{"type", "error"}, {"message", what}}; }

TelemetryServer::TelemetryServer(std::uint16_t port, const std::string& bind_address) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ParameterError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw ParameterError("invalid bind address " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw ParameterError("cannot listen on port " + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  set_nonblocking(listen_fd_);
  if (::pipe(wake_pipe_) < 0) {
    ::close(listen_fd_);
    throw ParameterError("pipe failed");
  }
  set_nonblocking(wake_pipe_[0]);
  set_nonblocking(wake_pipe_[1]);
  thread_ = std::thread([this] { loop(); });
}

TelemetryServer::~TelemetryServer() { stop(); }

void TelemetryServer::stop() {
  if (!running_.exchange(false)) return;
  wake();
  if (thread_.joinable()) thread_.join();
  std::lock_guard lock(mu_);
  for (auto& [id, c] : clients_) ::close(c.fd);
  clients_.clear();
  ::close(listen_fd_);
  ::close(wake_pipe_[0]);
  ::close(wake_pipe_[1]);
}

void TelemetryServer::wake() {
  const char b = 1;
  [[maybe_unused]] auto n = ::write(wake_pipe_[1], &b, 1);
}

void TelemetryServer::publish(const json& msg) {
  const std::string line = msg.dump() + "\n";
  {
    std::lock_guard lock(mu_);
    for (auto& [id, c] : clients_) c.out += line;
  }
  wake();
}

void TelemetryServer::send_to(int client, const json& msg) {
  {
    std::lock_guard lock(mu_);
    auto it = clients_.find(client);
    if (it == clients_.end()) return;
    it->second.out += msg.dump() + "\n";
  }
  wake();
}

void TelemetryServer::set_greeting(const json& msg) {
  std::lock_guard lock(mu_);
  greeting_ = msg.dump() + "\n";
}

std::vector<TelemetryServer::Inbound> TelemetryServer::take_commands() {
  std::lock_guard lock(mu_);
  std::vector<Inbound> out;
  out.swap(inbound_);
  return out;
}

std::size_t TelemetryServer::client_count() const {
  std::lock_guard lock(mu_);
  return clients_.size();
}

void TelemetryServer::close_client(int id) {
  auto it = clients_.find(id);
  if (it == clients_.end()) return;
  ::close(it->second.fd);
  clients_.erase(it);
}

// Called with mu_ held.
void TelemetryServer::handle_line(int, Client& c, const std::string& line) {
  if (line.empty()) return;
  try {
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.value("type", "") == "ping") {
      c.out += json{{"type", "pong"}}.dump() + "\n";
      return;
    }
    device::HostCommand cmd = parse_command_message(line);
    for (auto& [id, other] : clients_) {
      if (&other == &c) inbound_.push_back({id, std::move(cmd)});
    }
  } catch (const std::exception& e) {
    c.out += error_message(e.what()).dump() + "\n";
  }
}

void TelemetryServer::loop() {
  std::vector<pollfd> fds;
  std::vector<int> ids;
  char buf[65536];
  while (running_) {
    fds.clear();
    ids.clear();
    fds.push_back({listen_fd_, POLLIN, 0});
    fds.push_back({wake_pipe_[0], POLLIN, 0});
    {
      std::lock_guard lock(mu_);
      for (auto& [id, c] : clients_) {
        fds.push_back({c.fd, static_cast<short>(POLLIN | (c.out.empty() ? 0 : POLLOUT)), 0});
        ids.push_back(id);
      }
    }
    if (::poll(fds.data(), fds.size(), 200) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (fds[1].revents & POLLIN) {
      while (::read(wake_pipe_[0], buf, sizeof buf) > 0) {
      }
    }
    std::lock_guard lock(mu_);
    if (fds[0].revents & POLLIN) {
      for (;;) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) break;
        set_nonblocking(fd);
        clients_[next_id_++] = Client{fd, {}, greeting_};
      }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const int id = ids[i];
      auto it = clients_.find(id);
      if (it == clients_.end()) continue;
      Client& c = it->second;
      const short ev = fds[i + 2].revents;
      bool dead = (ev & (POLLERR | POLLNVAL)) != 0;
      if (!dead && (ev & (POLLIN | POLLHUP))) {
        const ssize_t n = ::recv(c.fd, buf, sizeof buf, 0);
        if (n <= 0) {
          dead = n == 0 || (errno != EAGAIN && errno != EWOULDBLOCK);
        } else {
          c.in.append(buf, static_cast<std::size_t>(n));
          std::size_t pos;
          while ((pos = c.in.find('\n')) != std::string::npos) {
            std::string line = c.in.substr(0, pos);
            c.in.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            handle_line(id, c, line);
          }
          if (c.in.size() > kMaxLine) {
            c.in.clear();
            c.out += error_message("line too long").dump() + "\n";
          }
        }
      }
      if (!dead && !c.out.empty()) {
        const ssize_t n = ::send(c.fd, c.out.data(), c.out.size(), MSG_NOSIGNAL);
        if (n > 0) {
          c.out.erase(0, static_cast<std::size_t>(n));
        } else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK) {
          dead = true;
        }
      }
      if (c.out.size() > kMaxBacklog) dead = true;
      if (dead) close_client(id);
    }
  }
}

void TelemetryBridge::on_sample(const SampleRecord& rec, const device::DeviceConfig& cfg) {
  const double rate = cfg.eeg_channels > 0 ? cfg.fs : cfg.ppg.rate;
  const auto factor = static_cast<std::uint64_t>(std::ceil(rate / kDisplayRateHz));
  if (rec.config_id != batch_config_ || rate != batch_rate_) {
    flush();
    batch_config_ = rec.config_id;
    batch_rate_ = rate;
    batch_cfg_ = cfg;
    counter_ = 0;
  }
  if (counter_++ % factor != 0) return;
  if (times_.empty()) {
    batch_start_ = rec.time;
    eeg_.assign(rec.eeg.size(), {});
    ppg_.assign(rec.ppg.size(), {});
  }
  times_.push_back(rec.time.seconds());
  const afe::ExgAfeConfig afe_cfg = cfg.afe_config();
  for (std::size_t c = 0; c < rec.eeg.size() && c < eeg_.size(); ++c) eeg_[c].push_back(afe::dequantize(rec.eeg[c], afe_cfg));
  for (std::size_t l = 0; l < rec.ppg.size() && l < ppg_.size(); ++l) ppg_[l].push_back(afe::ppg_dequantize(rec.ppg[l], cfg.ppg));
  if (rec.time - batch_start_ >= kBatchPeriod) flush();
}

void TelemetryBridge::flush() {
  if (times_.empty()) return;
  server_.publish(json{{"type", "samples"},
                       {"config_id", batch_config_},
                       {"display_rate_hz", batch_rate_ / std::ceil(batch_rate_ / kDisplayRateHz)},
                       {"t", times_},
                       {"eeg_v", eeg_},
                       {"ppg", ppg_}});
  times_.clear();
  eeg_.clear();
  ppg_.clear();
}

void TelemetryBridge::on_bins(const BinRecord& rec, const device::DeviceConfig& cfg) {
  server_.publish(bins_message(rec, cfg));
}

void TelemetryBridge::on_state(const StateRecord& rec) {
  flush();
  server_.publish(state_message(rec));
  json greeting{{"type", "hello"}, {"version", 1}, {"mode", device::to_string(rec.mode)}};
  if (sim_) greeting["config"] = config_json(sim_->host_config());
  server_.set_greeting(greeting);
}

void TelemetryBridge::on_ack(SimTime t, const device::Ack& ack) {
  server_.publish(ack_message(t, ack));
  if (sim_) {
    server_.publish(json{{"type", "config"}, {"t", t.seconds()}, {"config", config_json(sim_->host_config())}});
    server_.set_greeting(json{{"type", "hello"},
                              {"version", 1},
                              {"mode", device::to_string(ack.state)},
                              {"config", config_json(sim_->host_config())}});
  }
}

void TelemetryBridge::on_loss(const LossRecord& rec) { server_.publish(loss_message(rec)); }

void TelemetryBridge::on_snapshot(SimTime t, const link::LinkStats& stats, const device::EnergyLedger& ledger) {
  flush();
  server_.publish(link_message(t, stats, stats.buffered));
  server_.publish(energy_message(t, ledger));
}

}  // namespace wearsim::host
