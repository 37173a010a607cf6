#include "wearsim/afe/power_table.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace wearsim::afe {

double AfePowerTable::lookup(int channels, int rate, AfeMode mode) const {
  if (auto it = overrides_.find({channels, rate, mode}); it != overrides_.end()) return it->second;
  const double per_channel = mode == AfeMode::LOW_POWER ? per_channel_lp_mw : per_channel_hr_mw;
  return floor_mw + channels * per_channel * std::pow(rate / 1000.0, rate_exponent);
}

void AfePowerTable::set(int channels, int rate, AfeMode mode, double mw) {
  require(mw >= 0.0, "power must be non-negative");
  overrides_[{channels, rate, mode}] = mw;
}

AfePowerTable AfePowerTable::parse(std::istream& is) {
  AfePowerTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    int ch = 0;
    int rate = 0;
    std::string mode;
    std::string eq;
    double mw = 0.0;
    if (!(ss >> ch >> rate >> mode >> eq >> mw) || eq != "=") {
      throw ParameterError("power table line " + std::to_string(line_no) + ": expected 'channels rate mode = mW'");
    }
    require(ch >= 0 && ch <= 8 && is_supported_data_rate(rate),
            "power table line " + std::to_string(line_no) + ": unsupported key");
    t.set(ch, rate, afe_mode_from_string(mode), mw);
  }
  return t;
}

AfePowerTable AfePowerTable::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open power table " + path.string());
  return parse(is);
}

double exg_power(const ExgAfeConfig& cfg, const AfePowerTable& table) {
  cfg.validate();
  return table.lookup(cfg.active_channels, cfg.data_rate, cfg.mode);
}

}  // namespace wearsim::afe
