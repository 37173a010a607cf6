#include "wearsim/host/session_log.hpp"

#include <bit>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace wearsim::host {

using nlohmann::json;

namespace {

json config_to_json(const device::DeviceConfig& c) {
  return json{{"config_id", c.config_id},
              {"eeg_channels", c.eeg_channels},
              {"fs", c.fs},
              {"gain", c.gain},
              {"afe_mode", afe::to_string(c.afe_mode)},
              {"hop_ms", c.hop_ms},
              {"payload", device::to_string(c.payload_mode)},
              {"stim_freqs", c.stim_freqs},
              {"ppg",
               {{"enabled", c.ppg.enabled},
                {"rate", c.ppg.rate},
                {"red", c.ppg.red},
                {"ir", c.ppg.ir},
                {"dark_code", c.ppg.dark_code}}}};
}

device::DeviceConfig config_from_json(const json& j) {
  device::DeviceConfig c;
  c.config_id = j.at("config_id").get<std::uint8_t>();
  c.eeg_channels = j.at("eeg_channels").get<int>();
  c.fs = j.at("fs").get<int>();
  c.gain = j.at("gain").get<int>();
  c.afe_mode = afe::afe_mode_from_string(j.at("afe_mode").get<std::string>());
  c.hop_ms = j.at("hop_ms").get<int>();
  c.payload_mode = device::payload_mode_from_string(j.at("payload").get<std::string>());
  c.stim_freqs = j.at("stim_freqs").get<std::vector<double>>();
  const json& p = j.at("ppg");
  c.ppg.enabled = p.at("enabled").get<bool>();
  c.ppg.rate = p.at("rate").get<int>();
  c.ppg.red = p.at("red").get<bool>();
  c.ppg.ir = p.at("ir").get<bool>();
  c.ppg.dark_code = p.at("dark_code").get<std::uint32_t>();
  return c;
}

json metadata(const SessionLog& log) {
  json configs = json::array();
  for (const auto& [id, cfg] : log.configs) configs.push_back(config_to_json(cfg));
  return json{{"scenario", log.scenario}, {"seed", log.seed}, {"configs", configs}};
}

void apply_metadata(SessionLog& log, const json& j) {
  if (j.contains("scenario")) log.scenario = j.at("scenario").get<std::string>();
  if (j.contains("seed")) log.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("configs")) {
    for (const auto& c : j.at("configs")) {
      device::DeviceConfig cfg = config_from_json(c);
      log.configs[cfg.config_id] = cfg;
    }
  }
}

// Splits on commas outside double quotes; "" inside quotes is a literal quote.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch != '"') {
        out.back() += ch;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  if (quoted) throw ParameterError("unterminated quote");
  return out;
}

std::string quote(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + '"';
}

// Cells from i onward, rejoined.
std::string rest(const std::vector<std::string>& cells, std::size_t i) {
  std::string out;
  for (std::size_t k = i; k < cells.size(); ++k) out += (k > i ? "," : "") + cells[k];
  return out;
}

enum class RecordType : std::uint8_t { SAMPLE = 1, SUMMARY = 2, BINS = 3, LOSS = 4, STATE = 5, MARK = 6, COMMAND = 7 };

template <typename T>
void put_le(std::ostream& os, T v) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::istream& is) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw FramingError("session log truncated");
    u |= static_cast<U>(static_cast<U>(c) << (8 * i));
  }
  return static_cast<T>(u);
}

void put_string(std::ostream& os, const std::string& s) {
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get_le<std::uint32_t>(is);
  if (n > (1u << 26)) throw FramingError("session log string too long");
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (static_cast<std::uint32_t>(is.gcount()) != n) throw FramingError("session log truncated");
  return s;
}

void put_header(std::ostream& os, RecordType type, SimTime t, std::uint8_t cid, std::size_t count) {
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(type));
  put_le<std::int64_t>(os, t.ns);
  put_le<std::uint8_t>(os, cid);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(count));
}

}  // namespace

const device::DeviceConfig& SessionLog::config(std::uint8_t id) const {
  auto it = configs.find(id);
  if (it == configs.end()) throw ParameterError("session log has no configuration " + std::to_string(id));
  return it->second;
}

std::size_t SessionLog::lost_packets() const {
  std::size_t n = 0;
  for (const auto& l : losses) n += l.count;
  return n;
}

std::vector<float> flatten_harmonics(const link::EdgeResult& r) {
  std::vector<float> out;
  for (const auto& ch : r.channels) {
    for (Eigen::Index i = 0; i < ch.harmonic_power.rows(); ++i) {
      for (Eigen::Index h = 0; h < ch.harmonic_power.cols(); ++h) out.push_back(static_cast<float>(ch.harmonic_power(i, h)));
    }
  }
  return out;
}

std::vector<dsp::ChannelBinPowers> unflatten_harmonics(const BinRecord& r, const device::DeviceConfig& cfg) {
  const auto stims = static_cast<Eigen::Index>(cfg.stim_freqs.size());
  const std::size_t per_channel = static_cast<std::size_t>(stims) * dsp::kHarmonics;
  if (per_channel == 0 || r.harmonics.size() % per_channel != 0) {
    throw FramingError("bin record size does not match the configuration");
  }
  std::vector<dsp::ChannelBinPowers> out;
  for (std::size_t base = 0; base < r.harmonics.size(); base += per_channel) {
    Eigen::ArrayXXd h(stims, dsp::kHarmonics);
    for (Eigen::Index i = 0; i < stims; ++i) {
      for (int k = 0; k < dsp::kHarmonics; ++k) {
        h(i, k) = r.harmonics[base + static_cast<std::size_t>(i) * dsp::kHarmonics + static_cast<std::size_t>(k)];
      }
    }
    out.push_back(dsp::ChannelBinPowers::from_harmonics(cfg.stim_freqs, h));
  }
  return out;
}

void write_session_csv(std::ostream& os, const SessionLog& log) {
  os << "# " << metadata(log).dump() << '\n';
  os << "time_ns,record,config_id,values\n";
  os << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (const auto& m : log.marks) os << m.start.ns << ",mark,0," << m.end.ns << ',' << quote(m.label) << '\n';
  for (const auto& s : log.states) {
    os << s.time.ns << ",state,0," << device::to_string(s.mode) << ',' << quote(s.cause) << '\n';
  }
  for (const auto& c : log.commands) {
    os << c.sent.ns << ",command,0," << c.id << ',' << quote(c.text) << ',' << (c.answered ? c.answered->ns : -1) << ','
       << (c.answered ? (c.accepted ? "ack" : "nack") : "none") << ',' << quote(c.reason) << '\n';
  }
  for (const auto& l : log.losses) os << l.time.ns << ",loss,0," << l.count << ',' << l.next_seq << '\n';
  for (const auto& s : log.samples) {
    os << s.time.ns << ",sample," << int(s.config_id);
    for (auto c : s.eeg) os << ',' << c;
    for (auto c : s.ppg) os << ',' << c;
    if (!s.ppg.empty()) os << ',' << (s.ppg_fresh ? 1 : 0);
    os << '\n';
  }
  for (const auto& b : log.bins) {
    os << b.time.ns << (b.harmonics.empty() ? ",summary," : ",bins,") << int(b.config_id);
    for (float v : b.summary) os << ',' << v;
    for (float v : b.harmonics) os << ',' << v;
    os << '\n';
  }
}

SessionLog read_session_csv(std::istream& is) {
  SessionLog log;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      if (line[0] == '#') {
        apply_metadata(log, json::parse(line.substr(1)));
        continue;
      }
      if (!header) {
        if (line.rfind("time_ns,record", 0) != 0) throw ParameterError("missing header");
        header = true;
        continue;
      }
      const auto cells = split_csv(line);
      if (cells.size() < 3) throw ParameterError("short row");
      const SimTime t = SimTime::from_ns(std::stoll(cells[0]));
      const std::string& kind = cells[1];
      const auto cid = static_cast<std::uint8_t>(std::stoi(cells[2]));
      if (kind == "mark") {
        log.marks.push_back({t, SimTime::from_ns(std::stoll(cells.at(3))), rest(cells, 4)});
      } else if (kind == "state") {
        log.states.push_back({t, device::device_mode_from_string(cells.at(3)), rest(cells, 4)});
      } else if (kind == "command") {
        CommandRecord c{t, static_cast<std::uint16_t>(std::stoul(cells.at(3))), cells.at(4), {}, false, {}};
        const long long answered = std::stoll(cells.at(5));
        if (answered >= 0) c.answered = SimTime::from_ns(answered);
        c.accepted = cells.at(6) == "ack";
        c.reason = rest(cells, 7);
        log.commands.push_back(std::move(c));
      } else if (kind == "loss") {
        log.losses.push_back({t, static_cast<std::uint16_t>(std::stoul(cells.at(3))),
                              static_cast<std::uint16_t>(std::stoul(cells.at(4)))});
      } else if (kind == "sample") {
        const device::DeviceConfig& cfg = log.config(cid);
        SampleRecord s{t, cid, {}, {}, false};
        std::size_t i = 3;
        for (int c = 0; c < cfg.eeg_channels; ++c) s.eeg.push_back(std::stoi(cells.at(i++)));
        if (i < cells.size()) {
          for (int l = 0; l < cfg.ppg.led_count(); ++l) s.ppg.push_back(static_cast<std::uint32_t>(std::stoul(cells.at(i++))));
          s.ppg_fresh = cells.at(i++) == "1";
        }
        log.samples.push_back(std::move(s));
      } else if (kind == "summary" || kind == "bins") {
        const device::DeviceConfig& cfg = log.config(cid);
        BinRecord b{t, cid, {}, {}};
        std::size_t i = 3;
        for (int c = 0; c < cfg.eeg_channels; ++c) b.summary.push_back(std::stof(cells.at(i++)));
        for (; i < cells.size(); ++i) b.harmonics.push_back(std::stof(cells[i]));
        log.bins.push_back(std::move(b));
      } else {
        throw ParameterError("unknown record '" + kind + "'");
      }
    } catch (const std::exception& e) {
      throw ParameterError("session log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ParameterError("session log has no header");
  return log;
}

void write_session_binary(std::ostream& os, const SessionLog& log) {
  os.write("BGSL", 4);
  put_le<std::uint16_t>(os, 1);
  put_string(os, metadata(log).dump());
  for (const auto& m : log.marks) {
    put_header(os, RecordType::MARK, m.start, 0, 1);
    put_le<std::int64_t>(os, m.end.ns);
    put_string(os, m.label);
  }
  for (const auto& s : log.states) {
    put_header(os, RecordType::STATE, s.time, 0, 1);
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(s.mode));
    put_string(os, s.cause);
  }
  for (const auto& c : log.commands) {
    put_header(os, RecordType::COMMAND, c.sent, 0, 1);
    put_le<std::uint16_t>(os, c.id);
    put_le<std::int64_t>(os, c.answered ? c.answered->ns : -1);
    put_le<std::uint8_t>(os, c.accepted ? 1 : 0);
    put_string(os, c.text);
    put_string(os, c.reason);
  }
  for (const auto& l : log.losses) {
    put_header(os, RecordType::LOSS, l.time, 0, 2);
    put_le<std::uint16_t>(os, l.count);
    put_le<std::uint16_t>(os, l.next_seq);
  }
  for (const auto& s : log.samples) {
    put_header(os, RecordType::SAMPLE, s.time, s.config_id, s.eeg.size() + s.ppg.size());
    for (auto c : s.eeg) put_le<std::int32_t>(os, c);
    for (auto c : s.ppg) put_le<std::uint32_t>(os, c | (s.ppg_fresh ? 0x80000000u : 0u));
  }
  for (const auto& b : log.bins) {
    put_header(os, b.harmonics.empty() ? RecordType::SUMMARY : RecordType::BINS, b.time, b.config_id,
               b.summary.size() + b.harmonics.size());
    for (float v : b.summary) put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(v));
    for (float v : b.harmonics) put_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(v));
  }
}

SessionLog read_session_binary(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != "BGSL") throw FramingError("not a session log");
  if (get_le<std::uint16_t>(is) != 1) throw FramingError("unsupported session log version");
  SessionLog log;
  apply_metadata(log, json::parse(get_string(is)));
  while (is.peek() != std::char_traits<char>::eof()) {
    const auto type = static_cast<RecordType>(get_le<std::uint8_t>(is));
    const SimTime t = SimTime::from_ns(get_le<std::int64_t>(is));
    const auto cid = get_le<std::uint8_t>(is);
    const auto count = get_le<std::uint32_t>(is);
    switch (type) {
      case RecordType::MARK: {
        const SimTime end = SimTime::from_ns(get_le<std::int64_t>(is));
        log.marks.push_back({t, end, get_string(is)});
        break;
      }
      case RecordType::STATE: {
        const auto mode = static_cast<device::DeviceMode>(get_le<std::uint8_t>(is));
        log.states.push_back({t, mode, get_string(is)});
        break;
      }
      case RecordType::COMMAND: {
        CommandRecord c;
        c.sent = t;
        c.id = get_le<std::uint16_t>(is);
        const auto answered = get_le<std::int64_t>(is);
        if (answered >= 0) c.answered = SimTime::from_ns(answered);
        c.accepted = get_le<std::uint8_t>(is) != 0;
        c.text = get_string(is);
        c.reason = get_string(is);
        log.commands.push_back(std::move(c));
        break;
      }
      case RecordType::LOSS: {
        const auto n = get_le<std::uint16_t>(is);
        log.losses.push_back({t, n, get_le<std::uint16_t>(is)});
        break;
      }
      case RecordType::SAMPLE: {
        const device::DeviceConfig& cfg = log.config(cid);
        if (count != static_cast<std::uint32_t>(cfg.eeg_channels) &&
            count != static_cast<std::uint32_t>(cfg.eeg_channels + cfg.ppg.led_count())) {
          throw FramingError("sample record size does not match the configuration");
        }
        SampleRecord s{t, cid, {}, {}, false};
        for (int c = 0; c < cfg.eeg_channels; ++c) s.eeg.push_back(get_le<std::int32_t>(is));
        for (std::uint32_t i = static_cast<std::uint32_t>(cfg.eeg_channels); i < count; ++i) {
          const auto u = get_le<std::uint32_t>(is);
          s.ppg.push_back(u & 0x7fffffffu);
          s.ppg_fresh = (u & 0x80000000u) != 0;
        }
        log.samples.push_back(std::move(s));
        break;
      }
      case RecordType::SUMMARY:
      case RecordType::BINS: {
        const device::DeviceConfig& cfg = log.config(cid);
        const auto channels = static_cast<std::uint32_t>(cfg.eeg_channels);
        if (count < channels) throw FramingError("bin record shorter than the channel count");
        BinRecord b{t, cid, {}, {}};
        for (std::uint32_t i = 0; i < count; ++i) {
          const float v = std::bit_cast<float>(get_le<std::uint32_t>(is));
          (i < channels ? b.summary : b.harmonics).push_back(v);
        }
        log.bins.push_back(std::move(b));
        break;
      }
      default: throw FramingError("unknown session record type");
    }
  }
  return log;
}

void save_session(const std::filesystem::path& path, const SessionLog& log) {
  const bool csv = path.extension() == ".csv";
  std::ofstream os(path, csv ? std::ios::out : std::ios::binary);
  if (!os) throw ParameterError("cannot write " + path.string());
  if (csv) {
    write_session_csv(os, log);
  } else {
    write_session_binary(os, log);
  }
}

SessionLog load_session(const std::filesystem::path& path) {
  const bool csv = path.extension() == ".csv";
  std::ifstream is(path, csv ? std::ios::in : std::ios::binary);
  if (!is) throw ParameterError("cannot open " + path.string());
  return csv ? read_session_csv(is) : read_session_binary(is);
}

}  // namespace wearsim::host
