#include <doctest.h>

#include <sstream>

#include "wearsim/link/bandwidth.hpp"
#include "wearsim/link/channel.hpp"
#include "wearsim/link/dongle.hpp"
#include "wearsim/link/framing.hpp"
#include "wearsim/link/packet_log.hpp"

using namespace wearsim;
using link::Packet;
using link::PacketType;

namespace {

Packet data_packet(std::uint16_t seq, std::size_t bytes = link::kMaxPayload) {
  Packet p;
  p.header.type = PacketType::RAW_EEG;
  p.header.seq = seq;
  p.payload.assign(bytes, static_cast<std::uint8_t>(seq & 0xff));
  return p;
}

struct OutageRun {
  std::size_t emitted = 0;
  std::size_t delivered = 0;
  std::size_t dropped = 0;
  std::size_t buffered = 0;
  bool fifo = true;
};

// 240-byte packets every 10 ms (192 kbps) for 3 s through a 330 kbps link.
OutageRun run_with_outage(double outage_s) {
  link::ChannelModel ch;
  if (outage_s > 0.0) ch.outages.push_back({SimTime::from_seconds(1.0), SimTime::from_seconds(1.0 + outage_s)});
  link::DataLink dl(ch);
  OutageRun r;
  std::optional<std::uint16_t> last;
  std::uint16_t seq = 0;
  const SimTime dt = SimTime::from_ms(1);
  for (int ms = 0; ms < 3000; ++ms) {
    if (ms % 10 == 0) dl.enqueue(data_packet(seq++));
    for (const auto& d : dl.step(SimTime::from_ms(ms), dt).delivered) {
      if (last && d.packet.header.seq <= *last) r.fifo = false;
      last = d.packet.header.seq;
    }
  }
  const auto s = dl.stats();
  r.emitted = s.emitted;
  r.delivered = s.delivered;
  r.dropped = s.dropped;
  r.buffered = s.buffered;
  return r;
}

}  // namespace

TEST_CASE("packet header layout is big-endian and 8 bytes") {
  Packet p;
  p.header.type = PacketType::EDGE_RESULT;
  p.header.seq = 0x1234;
  p.header.timestamp_ms = 0xA1B2C3D4;
  p.header.config_id = 7;
  p.payload = {0xde, 0xad};
  const auto b = p.serialize();
  const std::vector<std::uint8_t> expected{4, 0x12, 0x34, 0xA1, 0xB2, 0xC3, 0xD4, 7, 0xde, 0xad};
  CHECK(b == expected);
  CHECK(Packet::parse(b) == p);
}

TEST_CASE("packet size limits and bad types") {
  CHECK_NOTHROW(data_packet(0, 240).serialize());
  CHECK_THROWS_AS(data_packet(0, 241).serialize(), FramingError);
  std::vector<std::uint8_t> short_bytes(7, 1);
  CHECK_THROWS_AS(Packet::parse(short_bytes), FramingError);
  std::vector<std::uint8_t> bad(8, 0);
  CHECK_THROWS_AS(Packet::parse(bad), FramingError);
  bad[0] = 7;
  CHECK_THROWS_AS(Packet::parse(bad), FramingError);
}

TEST_CASE("raw framing geometry") {
  device::DeviceConfig cfg;
  CHECK(link::raw_packet_type(cfg) == PacketType::RAW_EEG);
  CHECK(link::raw_frame_bytes(cfg) == 24);
  CHECK(link::frames_per_packet(cfg) == 10);
  cfg.ppg.enabled = true;
  CHECK(link::raw_packet_type(cfg) == PacketType::RAW_MIXED);
  CHECK(link::raw_frame_bytes(cfg) == 32);
  CHECK(link::frames_per_packet(cfg) == 7);
  cfg.eeg_channels = 0;
  CHECK(link::raw_packet_type(cfg) == PacketType::RAW_PPG);
  CHECK(link::frames_per_packet(cfg) == 30);
  cfg.ppg.enabled = false;
  CHECK_FALSE(link::raw_packet_type(cfg).has_value());
}

TEST_CASE("raw framing round-trips extreme 24-bit codes bit-exactly") {
  device::DeviceConfig cfg;
  cfg.config_id = 3;
  const std::int32_t codes[] = {afe::kCodeMax, afe::kCodeMin, 0, -1, 1, 0x7FFF00, -0x7FFF00, 0x123456};
  std::vector<afe::QuantizedFrame> frames;
  for (int i = 0; i < 25; ++i) {
    afe::QuantizedFrame f;
    f.config_id = 3;
    f.timestamp = sample_time(i, cfg.fs) + SimTime::from_ms(40);
    for (int c = 0; c < 8; ++c) f.eeg.push_back(codes[(i + c) % 8]);
    frames.push_back(f);
  }
  link::SequenceCounter seq;
  const auto packets = link::frame_raw(frames, cfg, seq);
  REQUIRE(packets.size() == 3);
  CHECK(packets[0].payload.size() == 240);
  CHECK(packets[2].payload.size() == 5 * 24);
  CHECK(packets[1].header.seq == 1);
  CHECK(packets[1].header.timestamp_ms == 50);
  CHECK(packets[0].payload[0] == 0x7F);
  CHECK(packets[0].payload[1] == 0xFF);
  CHECK(packets[0].payload[2] == 0xFF);
  CHECK(packets[0].payload[3] == 0x80);
  CHECK(packets[0].payload[4] == 0x00);
  CHECK(packets[0].payload[5] == 0x00);
  std::size_t k = 0;
  for (const auto& p : packets) {
    const auto wire = Packet::parse(p.serialize());
    for (const auto& f : link::unframe_raw(wire, cfg)) {
      CHECK(f.eeg == frames[k].eeg);
      CHECK(f.timestamp == frames[k].timestamp);
      CHECK(f.config_id == 3);
      ++k;
    }
  }
  CHECK(k == frames.size());
}

TEST_CASE("raw framing rejects out-of-range codes and mismatched frames") {
  device::DeviceConfig cfg;
  cfg.eeg_channels = 1;
  link::SequenceCounter seq;
  afe::QuantizedFrame f;
  f.eeg = {afe::kCodeMax + 1};
  CHECK_THROWS_AS(link::frame_raw(std::vector{f}, cfg, seq), FramingError);
  f.eeg = {0, 0};
  CHECK_THROWS_AS(link::frame_raw(std::vector{f}, cfg, seq), FramingError);
  f.eeg = {0};
  f.config_id = 1;
  CHECK_THROWS_AS(link::frame_raw(std::vector{f}, cfg, seq), FramingError);
  Packet p = data_packet(0, 5);
  CHECK_THROWS_AS(link::unframe_raw(p, cfg), FramingError);
}

TEST_CASE("mixed framing carries the PPG fresh flag") {
  device::DeviceConfig cfg;
  cfg.eeg_channels = 2;
  cfg.ppg.enabled = true;
  std::vector<afe::QuantizedFrame> frames(4);
  for (int i = 0; i < 4; ++i) {
    frames[i].eeg = {i, -i};
    frames[i].ppg = {afe::kPpgCodeMax, static_cast<std::uint32_t>(i)};
    frames[i].ppg_fresh = i % 2 == 0;
    frames[i].timestamp = sample_time(i, 1000);
  }
  link::SequenceCounter seq;
  const auto packets = link::frame_raw(frames, cfg, seq);
  REQUIRE(packets.size() == 1);
  CHECK(packets[0].header.type == PacketType::RAW_MIXED);
  const auto back = link::unframe_raw(packets[0], cfg);
  for (int i = 0; i < 4; ++i) {
    CHECK(back[i].eeg == frames[i].eeg);
    CHECK(back[i].ppg == frames[i].ppg);
    CHECK(back[i].ppg_fresh == frames[i].ppg_fresh);
  }
}

TEST_CASE("edge framing and reassembly") {
  device::DeviceConfig cfg;
  cfg.payload_mode = device::PayloadMode::BINS_12FP;
  dsp::SsvepBinReport report;
  for (int c = 0; c < 8; ++c) {
    Eigen::ArrayXXd h(4, 3);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 3; ++k) h(i, k) = 0.25 * c + i + 0.1 * k;
    report.channels.push_back(dsp::ChannelBinPowers::from_harmonics(cfg.stim_freqs, h));
  }
  link::SequenceCounter seq;
  const auto packets = link::frame_edge(report, cfg, SimTime::from_ms(1234), seq);
  REQUIRE(packets.size() == 2);
  CHECK(packets[0].payload.size() == 240);
  CHECK(packets[1].payload.size() == 144);
  CHECK(packets[1].header.timestamp_ms == 1234);

  link::EdgeReassembler r(cfg);
  CHECK_FALSE(r.push(packets[0]).has_value());
  const auto out = r.push(packets[1]);
  REQUIRE(out.has_value());
  REQUIRE(out->channels.size() == 8);
  CHECK(out->channels[5].harmonic_power(2, 1) == doctest::Approx(0.25 * 5 + 2 + 0.1).epsilon(1e-7));
  CHECK(out->summary[7] == doctest::Approx(report.channels[7].summary()).epsilon(1e-6));

  // A lost first fragment discards the orphaned second one on the next burst.
  const auto next = link::frame_edge(report, cfg, SimTime::from_ms(1284), seq);
  link::EdgeReassembler lossy(cfg);
  CHECK_FALSE(lossy.push(next[1]).has_value());
  CHECK_FALSE(lossy.push(packets[0]).has_value());
  CHECK(lossy.discarded() == 1);

  cfg.payload_mode = device::PayloadMode::SUMMARY_1FP;
  const auto summary = link::frame_edge(report, cfg, SimTime::from_ms(0), seq);
  REQUIRE(summary.size() == 1);
  CHECK(summary[0].payload.size() == 32);
  link::EdgeReassembler s(cfg);
  const auto got = s.push(summary[0]);
  REQUIRE(got.has_value());
  CHECK(got->summary.size() == 8);
  CHECK(got->channels.empty());
}

TEST_CASE("float payload codec") {
  const std::vector<float> v{0.0f, -1.5f, 3.25e-12f, 1e30f};
  const auto b = link::encode_f32_be(v);
  CHECK(b.size() == 16);
  CHECK(b[4] == 0xBF);
  CHECK(b[5] == 0xC0);
  CHECK(link::decode_f32_be(b) == v);
  CHECK_THROWS_AS(link::decode_f32_be(std::vector<std::uint8_t>(3)), FramingError);
}

TEST_CASE("ring buffer drops the oldest packet") {
  link::RingBuffer ring(3);
  for (std::uint16_t s = 0; s < 3; ++s) CHECK_FALSE(ring.enqueue(data_packet(s, 1)).has_value());
  CHECK(ring.full());
  const auto evicted = ring.enqueue(data_packet(3, 1));
  REQUIRE(evicted.has_value());
  CHECK(evicted->header.seq == 0);
  CHECK(ring.drop_count() == 1);
  CHECK(ring.pop()->header.seq == 1);
  CHECK(ring.occupancy() == 2);
  CHECK_THROWS_AS(link::RingBuffer(0), ParameterError);
}

TEST_CASE("radio slot timing at the throughput cap") {
  link::RingBuffer ring;
  link::RadioSlot slot;
  link::ChannelModel ch;
  for (std::uint16_t s = 0; s < 10; ++s) ring.enqueue(data_packet(s));
  const auto r = link::transmit_step(ring, slot, ch, SimTime{}, SimTime::from_seconds(1.0));
  REQUIRE(r.delivered.size() == 10);
  CHECK(r.delivered[0].sent.ns == 5818182);
  CHECK(r.delivered[0].arrival.ns == 5818182 + 1000000);
  CHECK(r.delivered[9].sent.ns == 10 * 5818182);
  CHECK(r.radio_active.ns == 10 * 5818182);
}

TEST_CASE("a packet in flight resumes after an outage") {
  link::RingBuffer ring;
  link::RadioSlot slot;
  link::ChannelModel ch;
  ch.outages.push_back({SimTime::from_ms(2), SimTime::from_ms(5)});
  ring.enqueue(data_packet(0));
  std::vector<link::Delivery> got;
  for (int ms = 0; ms < 20; ++ms) {
    auto r = link::transmit_step(ring, slot, ch, SimTime::from_ms(ms), SimTime::from_ms(1));
    for (auto& d : r.delivered) got.push_back(d);
  }
  REQUIRE(got.size() == 1);
  CHECK(got[0].sent.ns == 5818182 + 3000000);
  CHECK(ch.in_outage(SimTime::from_ms(2)));
  CHECK_FALSE(ch.in_outage(SimTime::from_ms(5)));
}

TEST_CASE("channel validation") {
  link::ChannelModel ch;
  ch.outages = {{SimTime::from_ms(5), SimTime::from_ms(5)}};
  CHECK_THROWS_AS(ch.validate(), ParameterError);
  ch.outages = {{SimTime::from_ms(5), SimTime::from_ms(9)}, {SimTime::from_ms(8), SimTime::from_ms(12)}};
  CHECK_THROWS_AS(ch.validate(), ParameterError);
  ch.outages.clear();
  ch.max_payload_throughput = 0.0;
  CHECK_THROWS_AS(ch.validate(), ParameterError);
}

TEST_CASE("outage sweep around ring capacity / offered rate") {
  // 15 packets of 1920 bits at 192 kbps: 150 ms of buffering.
  for (int ms : {0, 20, 50, 100, 130}) {
    const auto r = run_with_outage(ms / 1000.0);
    CAPTURE(ms);
    CHECK(r.dropped == 0);
    CHECK(r.fifo);
    CHECK(r.emitted == r.delivered + r.dropped + r.buffered);
  }
  for (int ms : {180, 250, 500, 1000}) {
    const auto r = run_with_outage(ms / 1000.0);
    CAPTURE(ms);
    CHECK(r.dropped > 0);
    CHECK(r.fifo);
    CHECK(r.emitted == r.delivered + r.dropped + r.buffered);
  }
  // Drops grow with the outage beyond the buffer: one per 10 ms.
  const auto a = run_with_outage(0.5);
  const auto b = run_with_outage(1.0);
  CHECK(b.dropped - a.dropped == 50);
}

TEST_CASE("dongle detects sequence gaps across wrap-around") {
  link::Dongle d;
  std::size_t losses = 0;
  std::uint16_t reported = 0;
  for (std::uint16_t s : {65533, 65534, 65535, 0, 1, 4, 5}) {
    for (const auto& e : d.receive(data_packet(s, 1))) {
      if (const auto* l = std::get_if<link::LossEvent>(&e)) {
        ++losses;
        reported = l->count;
        CHECK(l->next_seq == 4);
      }
    }
  }
  CHECK(losses == 1);
  CHECK(reported == 2);
  CHECK(d.lost() == 2);
  CHECK(d.received() == 7);

  link::Dongle w;
  w.receive(data_packet(65534, 1));
  w.receive(data_packet(2, 1));
  CHECK(w.lost() == 3);
}

TEST_CASE("dongle routes ACKs and rejects host packets") {
  link::Dongle d;
  Packet ack;
  ack.header.type = PacketType::ACK;
  ack.payload = device::encode_ack({9, false, device::DeviceMode::STREAMING, "busy"});
  const auto ev = d.receive(ack);
  REQUIRE(ev.size() == 1);
  const auto& a = std::get<link::CommandAckEvent>(ev[0]).ack;
  CHECK(a.command_id == 9);
  CHECK(a.reason == "busy");
  Packet cmd;
  cmd.header.type = PacketType::CMD;
  CHECK_THROWS_AS(d.receive(cmd), FramingError);
}

TEST_CASE("bandwidth arithmetic") {
  device::DeviceConfig cfg;
  CHECK(link::streaming_throughput(cfg) == 192000.0);
  CHECK(link::edge_throughput(cfg) == 5120.0);
  CHECK(link::reduction_ratio(192000.0, 5120.0) == doctest::Approx(0.973333333333));
  cfg.fs = 4000;
  CHECK(link::streaming_throughput(cfg) == 768000.0);
  cfg.payload_mode = device::PayloadMode::BINS_12FP;
  CHECK(link::edge_throughput(cfg) == 61440.0);
  cfg.eeg_channels = 0;
  cfg.ppg.enabled = true;
  CHECK(link::streaming_throughput(cfg) == 6400.0);
}

TEST_CASE("command and ack codecs") {
  device::HostCommand c;
  c.kind = device::CommandKind::SET_PARAMS;
  c.params.fs = 2000;
  c.params.gain = 12;
  c.params.payload_mode = device::PayloadMode::BINS_12FP;
  c.params.ppg_rate = 0;
  c.id = 77;
  CHECK(device::decode_command(device::encode_command(c), 77) == c);
  device::HostCommand s;
  s.kind = device::CommandKind::START;
  s.mode = device::DeviceMode::EDGE_COMPUTE;
  s.id = 2;
  CHECK(device::decode_command(device::encode_command(s), 2) == s);
  const device::Ack a{500, true, device::DeviceMode::CONNECTED_IDLE, ""};
  CHECK(device::decode_ack(device::encode_ack(a)) == a);
  CHECK_THROWS(device::decode_command(std::vector<std::uint8_t>{}, 0));
}

TEST_CASE("packet log round trip and hexdump") {
  std::vector<link::PacketRecord> recs;
  recs.push_back({SimTime::from_us(1500), link::Direction::DEVICE_TO_HOST, data_packet(1, 20)});
  Packet cmd;
  cmd.header.type = PacketType::CMD;
  cmd.payload = device::encode_command({});
  recs.push_back({SimTime::from_ms(3), link::Direction::HOST_TO_DEVICE, cmd});
  std::stringstream ss;
  link::write_packet_log(ss, recs);
  const auto back = link::read_packet_log(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].time == recs[0].time);
  CHECK(back[1].direction == link::Direction::HOST_TO_DEVICE);
  CHECK(back[0].packet == recs[0].packet);
  CHECK(back[1].packet == recs[1].packet);
  std::ostringstream hex;
  link::hexdump(hex, back);
  CHECK(hex.str().find("01 00 01 00 00 00 00 00") != std::string::npos);
  std::stringstream junk("garbage");
  CHECK_THROWS(link::read_packet_log(junk));
}
