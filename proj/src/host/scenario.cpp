#include "wearsim/host/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace wearsim::host {

namespace {

const std::set<std::string> kReportKinds{"log", "packets", "trace", "psd", "spectrogram", "alpha",
                                         "ssvep", "ppg", "power", "bandwidth", "summary"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParameterError("expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw ParameterError("expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != static_cast<double>(static_cast<long long>(v))) throw ParameterError("expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
  if (s == "off" || s == "false" || s == "no" || s == "0") return false;
  throw ParameterError("expected on/off, got '" + s + "'");
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

SourceKind source_kind_from_string(const std::string& s) {
  for (auto k : {SourceKind::ZERO, SourceKind::BACKGROUND, SourceKind::ALPHA, SourceKind::SSVEP, SourceKind::PPG,
                 SourceKind::FILE}) {
    if (to_string(k) == s) return k;
  }
  throw ParameterError("unknown source kind '" + s + "'");
}

void apply_param(device::ConfigDelta& d, const std::string& key, const std::string& value) {
  if (key == "eeg_channels") d.eeg_channels = to_int(value);
  else if (key == "fs") d.fs = to_int(value);
  else if (key == "gain") d.gain = to_int(value);
  else if (key == "hop_ms") d.hop_ms = to_int(value);
  else if (key == "ppg_rate") d.ppg_rate = to_int(value);
  else if (key == "payload") d.payload_mode = device::payload_mode_from_string(upper(value));
  else if (key == "afe_mode") d.afe_mode = afe::afe_mode_from_string(upper(value));
  else throw ParameterError("unknown parameter '" + key + "'");
}

void device_key(device::DeviceConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "eeg_channels") cfg.eeg_channels = to_int(value);
  else if (key == "fs") cfg.fs = to_int(value);
  else if (key == "gain") cfg.gain = to_int(value);
  else if (key == "hop_ms") cfg.hop_ms = to_int(value);
  else if (key == "payload") cfg.payload_mode = device::payload_mode_from_string(upper(value));
  else if (key == "afe_mode") cfg.afe_mode = afe::afe_mode_from_string(upper(value));
  else if (key == "ppg_rate") {
    const int rate = to_int(value);
    cfg.ppg.enabled = rate > 0;
    if (rate > 0) cfg.ppg.rate = rate;
  } else if (key == "ppg_leds") {
    const auto leds = split(value, ',');
    cfg.ppg.red = std::find(leds.begin(), leds.end(), "red") != leds.end();
    cfg.ppg.ir = std::find(leds.begin(), leds.end(), "ir") != leds.end();
  } else if (key == "stim_freqs") {
    cfg.stim_freqs.clear();
    for (const auto& f : split(value, ',')) cfg.stim_freqs.push_back(to_double(f));
  } else {
    throw ParameterError("unknown device key '" + key + "'");
  }
}

void source_key(SourceSpec& s, const std::string& key, const std::string& value) {
  if (key == "kind") s.kind = source_kind_from_string(value);
  else if (key == "source_fs") s.source_fs = to_double(value);
  else if (key == "rms_uv") s.rms_uv = to_double(value);
  else if (key == "open_s") s.open_s = to_double(value);
  else if (key == "closed_s") s.closed_s = to_double(value);
  else if (key == "snr_db") s.snr_db = to_double(value);
  else if (key == "trial_s") s.trial_s = to_double(value);
  else if (key == "rest_s") s.rest_s = to_double(value);
  else if (key == "repetitions") s.repetitions = to_int(value);
  else if (key == "order_seed") s.order_seed = static_cast<std::uint64_t>(to_int(value));
  else if (key == "heart_rate_bpm") s.heart_rate_bpm = to_double(value);
  else if (key == "files") s.files = split(value, ',');
  else throw ParameterError("unknown source key '" + key + "'");
}

}  // namespace

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::ZERO: return "zero";
    case SourceKind::BACKGROUND: return "background";
    case SourceKind::ALPHA: return "alpha";
    case SourceKind::SSVEP: return "ssvep";
    case SourceKind::PPG: return "ppg";
    case SourceKind::FILE: return "file";
  }
  return "zero";
}

device::HostCommand parse_command_text(const std::string& text) {
  std::istringstream ss(text);
  std::string word;
  if (!(ss >> word)) throw ParameterError("empty command");
  device::HostCommand cmd;
  cmd.kind = device::command_kind_from_string(upper(word));
  std::vector<std::string> args;
  while (ss >> word) args.push_back(word);
  switch (cmd.kind) {
    case device::CommandKind::SET_MODE:
    case device::CommandKind::START:
      if (args.size() > 1) throw ParameterError(device::to_string(cmd.kind) + " takes at most one mode");
      if (!args.empty()) cmd.mode = device::device_mode_from_string(upper(args[0]));
      break;
    case device::CommandKind::SET_PARAMS:
      for (const auto& a : args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ParameterError("expected key=value, got '" + a + "'");
        apply_param(cmd.params, a.substr(0, eq), a.substr(eq + 1));
      }
      break;
    default:
      if (!args.empty()) throw ParameterError(device::to_string(cmd.kind) + " takes no arguments");
  }
  cmd.validate();
  return cmd;
}

std::string format_command(const device::HostCommand& cmd) {
  std::string s = device::to_string(cmd.kind);
  if (cmd.mode) s += " " + device::to_string(*cmd.mode);
  const auto& p = cmd.params;
  if (p.eeg_channels) s += " eeg_channels=" + std::to_string(*p.eeg_channels);
  if (p.fs) s += " fs=" + std::to_string(*p.fs);
  if (p.gain) s += " gain=" + std::to_string(*p.gain);
  if (p.hop_ms) s += " hop_ms=" + std::to_string(*p.hop_ms);
  if (p.ppg_rate) s += " ppg_rate=" + std::to_string(*p.ppg_rate);
  if (p.payload_mode) s += " payload=" + device::to_string(*p.payload_mode);
  if (p.afe_mode) s += " afe_mode=" + afe::to_string(*p.afe_mode);
  return s;
}

void Scenario::validate() const {
  require(duration_s > 0.0, "duration must be positive");
  device.validate();
  channel.validate();
  require(ring_capacity >= 1, "ring capacity must be at least 1");
  for (std::size_t i = 1; i < commands.size(); ++i) {
    require(commands[i - 1].at <= commands[i].at, "commands must be in time order");
  }
  require(std::is_sorted(taps.begin(), taps.end()), "taps must be in time order");
  if (source.kind == SourceKind::FILE) require(!source.files.empty(), "file source needs at least one file");
}

Scenario parse_scenario(std::istream& is, const std::string& origin) {
  Scenario sc;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ParameterError("unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        static const std::set<std::string> known{"scenario", "device", "source", "link", "commands", "imu", "reports"};
        if (!known.count(section)) throw ParameterError("unknown section '" + section + "'");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParameterError("expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) throw ParameterError("empty key or value");
      if (section.empty()) throw ParameterError("entry outside a section");

      if (section == "scenario") {
        if (key == "name") sc.name = value;
        else if (key == "seed") sc.seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "duration_s") sc.duration_s = to_double(value);
        else if (key == "afe_noise") sc.afe_noise = to_bool(value);
        else throw ParameterError("unknown scenario key '" + key + "'");
      } else if (section == "device") {
        device_key(sc.device, key, value);
      } else if (section == "source") {
        source_key(sc.source, key, value);
      } else if (section == "link") {
        if (key == "throughput_bps") sc.channel.max_payload_throughput = to_double(value);
        else if (key == "latency_ms") sc.channel.per_packet_latency = SimTime::from_seconds(to_double(value) / 1000.0);
        else if (key == "ring_capacity") sc.ring_capacity = static_cast<std::size_t>(to_int(value));
        else if (key == "outage") {
          std::istringstream ss(value);
          double a = 0.0;
          double b = 0.0;
          if (!(ss >> a >> b) || b <= a) throw ParameterError("outage needs 'start_s end_s' with end > start");
          sc.channel.outages.push_back({SimTime::from_seconds(a), SimTime::from_seconds(b)});
        } else {
          throw ParameterError("unknown link key '" + key + "'");
        }
      } else if (section == "commands") {
        const double t = to_double(key);
        if (t < 0.0) throw ParameterError("command time must be non-negative");
        sc.commands.push_back({SimTime::from_seconds(t), parse_command_text(value), line_no});
      } else if (section == "imu") {
        if (key != "tap") throw ParameterError("unknown imu key '" + key + "'");
        sc.taps.push_back(SimTime::from_seconds(to_double(value)));
      } else if (section == "reports") {
        if (!kReportKinds.count(key)) throw ParameterError("unknown report '" + key + "'");
        sc.reports[key] = value;
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(origin, line_no, e.what());
    }
  }
  std::stable_sort(sc.commands.begin(), sc.commands.end(),
                   [](const TimedCommand& a, const TimedCommand& b) { return a.at < b.at; });
  std::sort(sc.taps.begin(), sc.taps.end());
  for (std::size_t i = 0; i < sc.commands.size(); ++i) sc.commands[i].command.id = static_cast<std::uint16_t>(i + 1);
  try {
    sc.validate();
  } catch (const ParameterError& e) {
    throw ScenarioError(origin, line_no, e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open scenario " + path.string());
  Scenario sc = parse_scenario(is, path.string());
  sc.base_dir = path.parent_path();
  return sc;
}

}  // namespace wearsim::host
