#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <deque>
#include <thread>

#include "wearsim/host/scenario.hpp"
#include "wearsim/host/telemetry.hpp"

using namespace wearsim;
using nlohmann::json;

namespace {

class Client {
 public:
  explicit Client(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    connected_ = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
  }
  ~Client() { close(); }
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  bool connected() const { return connected_; }

  void send(const std::string& line) {
    const std::string s = line + "\n";
    REQUIRE(::send(fd_, s.data(), s.size(), MSG_NOSIGNAL) == static_cast<ssize_t>(s.size()));
  }

  // Next JSON line, or null after the timeout.
  json next(int timeout_ms = 2000) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      if (auto nl = buf_.find('\n'); nl != std::string::npos) {
        const std::string line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return json::parse(line);
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return nullptr;
      pollfd p{fd_, POLLIN, 0};
      if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) return nullptr;
      char tmp[4096];
      const ssize_t n = ::recv(fd_, tmp, sizeof tmp, 0);
      if (n <= 0) return nullptr;
      buf_.append(tmp, static_cast<std::size_t>(n));
    }
  }

  // Skips messages until one of the given type arrives.
  // First message of `type`, searching ones skipped by earlier calls too.
  json next_of(const std::string& type, int timeout_ms = 3000) {
    for (auto it = skipped_.begin(); it != skipped_.end(); ++it) {
      if (it->value("type", "") == type) {
        json j = std::move(*it);
        skipped_.erase(it);
        return j;
      }
    }
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (std::chrono::steady_clock::now() < deadline) {
      json j = next(100);
      if (j.is_null()) continue;
      if (j.value("type", "") == type) return j;
      skipped_.push_back(std::move(j));
    }
    return nullptr;
  }

 private:
  int fd_ = -1;
  bool connected_ = false;
  std::string buf_;
  std::deque<json> skipped_;
};

template <typename Pred>
bool eventually(Pred p, int timeout_ms = 2000) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (std::chrono::steady_clock::now() < deadline) {
    if (p()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return p();
}

}  // namespace

TEST_CASE("command message parsing") {
  auto c = host::parse_command_message(R"({"type":"command","text":"START EDGE_COMPUTE"})");
  CHECK(c.kind == device::CommandKind::START);
  CHECK(c.mode == device::DeviceMode::EDGE_COMPUTE);
  c = host::parse_command_message(R"({"type":"command","kind":"SET_PARAMS","params":{"fs":2000,"payload":"BINS_12FP"}})");
  CHECK(c.kind == device::CommandKind::SET_PARAMS);
  CHECK(c.params.fs == 2000);
  CHECK(c.params.payload_mode == device::PayloadMode::BINS_12FP);
  c = host::parse_command_message(R"({"type":"command","kind":"SET_MODE","mode":"STREAMING"})");
  CHECK(c.mode == device::DeviceMode::STREAMING);
  CHECK_THROWS_AS(host::parse_command_message("{not json"), ParameterError);
  CHECK_THROWS_AS(host::parse_command_message(R"({"type":"hello"})"), ParameterError);
  CHECK_THROWS_AS(host::parse_command_message(R"({"type":"command"})"), ParameterError);
  CHECK_THROWS_AS(host::parse_command_message(R"({"type":"command","kind":"FLY"})"), ParameterError);
  CHECK_THROWS_AS(host::parse_command_message(R"({"type":"command","kind":"SET_PARAMS","params":{"fs":"x"}})"),
                  ParameterError);
}

TEST_CASE("message builders") {
  device::DeviceConfig cfg;
  const auto j = host::config_json(cfg);
  CHECK(j.at("fs") == 1000);
  CHECK(j.at("eeg_channels") == 8);
  CHECK(j.at("payload") == "SUMMARY_1FP");
  CHECK(j.at("stim_freqs").size() == 4);
  const auto s = host::state_message({SimTime::from_ms(1500), device::DeviceMode::STREAMING, "START#1"});
  CHECK(s.at("type") == "state");
  CHECK(s.at("mode") == "STREAMING");
  CHECK(s.at("t") == doctest::Approx(1.5));
  const auto a = host::ack_message(SimTime{}, {3, false, device::DeviceMode::BOOT, "not connected"});
  CHECK(a.at("type") == "ack");
  CHECK(a.at("accepted") == false);
  CHECK(a.at("reason") == "not connected");
  host::BinRecord b;
  b.summary = {1.0f, 2.0f};
  cfg.eeg_channels = 2;
  cfg.payload_mode = device::PayloadMode::BINS_12FP;
  b.harmonics.assign(24, 0.0f);
  b.harmonics[12 + 3 * 2] = 5.0f;  // channel 1, third stimulus, first harmonic
  const auto bins = host::bins_message(b, cfg);
  CHECK(bins.at("type") == "bins");
  CHECK(bins.at("predicted_hz") == doctest::Approx(7.8125));
  CHECK(bins.at("stim_power").size() == 4);
  CHECK(host::error_message("boom").at("message") == "boom");
}

TEST_CASE("telemetry server greeting, ping and broadcast") {
  host::TelemetryServer server(0);
  REQUIRE(server.port() != 0);
  server.set_greeting({{"type", "hello"}, {"version", 1}});
  Client a(server.port());
  Client b(server.port());
  REQUIRE(a.connected());
  REQUIRE(b.connected());
  CHECK(a.next().at("type") == "hello");
  CHECK(b.next().at("type") == "hello");
  CHECK(eventually([&] { return server.client_count() == 2; }));

  a.send(R"({"type":"ping"})");
  CHECK(a.next().at("type") == "pong");

  server.publish({{"type", "link"}, {"delivered", 3}});
  CHECK(a.next().at("delivered") == 3);
  CHECK(b.next().at("delivered") == 3);
}

TEST_CASE("malformed input gets an error reply to that client only") {
  host::TelemetryServer server(0);
  Client a(server.port());
  Client b(server.port());
  CHECK(eventually([&] { return server.client_count() == 2; }));
  a.send("this is not json");
  const auto e = a.next();
  REQUIRE_FALSE(e.is_null());
  CHECK(e.at("type") == "error");
  CHECK(b.next(200).is_null());
  a.send(R"({"type":"command","text":"WARP 9"})");
  CHECK(a.next().at("type") == "error");
  CHECK(server.take_commands().empty());
}

TEST_CASE("command intake and directed replies") {
  host::TelemetryServer server(0);
  Client a(server.port());
  Client b(server.port());
  CHECK(eventually([&] { return server.client_count() == 2; }));
  b.send(R"({"type":"command","text":"STOP"})");
  a.send(R"({"type":"command","kind":"START","mode":"EDGE_COMPUTE"})");
  std::vector<host::TelemetryServer::Inbound> got;
  CHECK(eventually([&] {
    for (auto& in : server.take_commands()) got.push_back(in);
    return got.size() == 2;
  }));
  REQUIRE(got.size() == 2);
  for (const auto& in : got) {
    server.send_to(in.client, {{"type", "submitted"}, {"kind", device::to_string(in.command.kind)}});
  }
  CHECK(a.next().at("kind") == "START");
  CHECK(b.next().at("kind") == "STOP");
}

TEST_CASE("client disconnect is handled") {
  host::TelemetryServer server(0);
  {
    Client a(server.port());
    CHECK(eventually([&] { return server.client_count() == 1; }));
  }
  CHECK(eventually([&] { return server.client_count() == 0; }));
  server.publish({{"type", "link"}});
  Client b(server.port());
  CHECK(eventually([&] { return server.client_count() == 1; }));
  server.stop();
  CHECK(b.next(500).is_null());
}

TEST_CASE("bridge streams a live simulation") {
  host::TelemetryServer server(0);
  std::istringstream is(R"(
[scenario]
duration_s = 2
[device]
eeg_channels = 2
fs = 1000
[source]
kind = background
)");
  const auto sc = host::parse_scenario(is);
  host::TelemetryBridge bridge(server);
  host::SimulationOptions opts;
  opts.observer = &bridge;
  opts.log_samples = false;
  host::Simulation sim(sc, opts);
  bridge.attach(&sim);
  Client c(server.port());
  CHECK(eventually([&] { return server.client_count() == 1; }));

  sim.run_until(SimTime::from_ms(100));
  c.send(R"({"type":"command","text":"START"})");
  std::vector<host::TelemetryServer::Inbound> in;
  CHECK(eventually([&] {
    for (auto& x : server.take_commands()) in.push_back(x);
    return !in.empty();
  }));
  REQUIRE(in.size() == 1);
  sim.submit(in[0].command);
  sim.run_until(SimTime::from_ms(600));
  bridge.flush();

  const auto ack = c.next_of("ack");
  REQUIRE_FALSE(ack.is_null());
  CHECK(ack.at("accepted") == true);
  const auto state = c.next_of("state");
  REQUIRE_FALSE(state.is_null());
  CHECK(state.at("mode") == "STREAMING");
  const auto samples = c.next_of("samples");
  REQUIRE_FALSE(samples.is_null());
  CHECK(samples.at("display_rate_hz") == doctest::Approx(250.0));
  CHECK(samples.at("eeg_v").size() == 2);
  CHECK(samples.at("eeg_v")[0].size() == samples.at("t").size());
  const auto t = samples.at("t");
  REQUIRE(t.size() >= 2);
  CHECK(t[1].get<double>() - t[0].get<double>() == doctest::Approx(0.004));
  CHECK_FALSE(c.next_of("energy").is_null());
  CHECK(sim.log().samples.empty());
}
