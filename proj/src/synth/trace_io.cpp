#include "wearsim/synth/trace_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wearsim::synth {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'G', 'T', 'R'};

void put_f32_le(std::ostream& os, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  const std::array<char, 4> b{static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                              static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
  os.write(b.data(), 4);
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

}  // namespace

std::string to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::EEG: return "EEG";
    case TraceKind::PPG_RED: return "PPG_RED";
    case TraceKind::PPG_IR: return "PPG_IR";
  }
  return "EEG";
}

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "EEG") return TraceKind::EEG;
  if (s == "PPG_RED") return TraceKind::PPG_RED;
  if (s == "PPG_IR") return TraceKind::PPG_IR;
  throw ParameterError("unknown trace kind '" + s + "'");
}

AnalogTrace concatenate(const AnalogTrace& a, const AnalogTrace& b) {
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  require(a.sample_rate == b.sample_rate && a.kind == b.kind, "cannot concatenate traces of different rate or kind");
  AnalogTrace out = a;
  out.values.conservativeResize(a.size() + b.size());
  out.values.tail(b.size()) = b.values;
  return out;
}

void write_trace_csv(std::ostream& os, const AnalogTrace& trace) {
  os << "kind,fs\n" << to_string(trace.kind) << ',' << std::setprecision(17) << trace.sample_rate << "\nvalue\n";
  os << std::setprecision(12);
  for (Eigen::Index i = 0; i < trace.size(); ++i) os << trace.values(i) << '\n';
}

AnalogTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "kind,fs") throw ParameterError("trace CSV: missing 'kind,fs' header");
  if (!std::getline(is, line)) throw ParameterError("trace CSV: missing kind/fs row");
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw ParameterError("trace CSV: malformed kind/fs row");
  AnalogTrace t;
  t.kind = trace_kind_from_string(trim(line.substr(0, comma)));
  t.sample_rate = std::stod(line.substr(comma + 1));
  require(t.sample_rate > 0.0, "trace CSV: fs must be positive");
  if (!std::getline(is, line) || trim(line) != "value") throw ParameterError("trace CSV: missing 'value' header");
  std::vector<double> v;
  std::size_t row = 3;
  while (std::getline(is, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    try {
      v.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ParameterError("trace CSV: bad value on line " + std::to_string(row));
    }
  }
  t.values = Eigen::Map<Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return t;
}

void write_trace_binary(std::ostream& os, const AnalogTrace& trace) {
  std::array<char, 12> head{};
  std::memcpy(head.data(), kMagic.data(), 4);
  head[4] = static_cast<char>(trace.kind);
  os.write(head.data(), head.size());
  put_f32_le(os, static_cast<float>(trace.sample_rate));
  for (Eigen::Index i = 0; i < trace.size(); ++i) put_f32_le(os, static_cast<float>(trace.values(i)));
}

AnalogTrace read_trace_binary(std::istream& is) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic.data(), 4) != 0) {
    throw ParameterError("binary trace: bad magic");
  }
  if ((bytes.size() - 16) % 4 != 0) throw ParameterError("binary trace: truncated sample data");
  require(bytes[4] <= 2, "binary trace: unknown kind");
  AnalogTrace t;
  t.kind = static_cast<TraceKind>(bytes[4]);
  t.sample_rate = get_f32_le(bytes.data() + 12);
  require(t.sample_rate > 0.0, "binary trace: fs must be positive");
  const auto n = static_cast<Eigen::Index>((bytes.size() - 16) / 4);
  t.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) t.values(i) = get_f32_le(bytes.data() + 16 + 4 * i);
  return t;
}

void save_trace(const std::filesystem::path& path, const AnalogTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParameterError("cannot open " + path.string() + " for writing");
  if (path.extension() == ".csv") {
    write_trace_csv(os, trace);
  } else {
    write_trace_binary(os, trace);
  }
}

AnalogTrace load_trace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParameterError("cannot open " + path.string());
  return path.extension() == ".csv" ? read_trace_csv(is) : read_trace_binary(is);
}

}  // namespace wearsim::synth
