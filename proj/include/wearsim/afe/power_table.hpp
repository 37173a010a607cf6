#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <tuple>

#include "wearsim/afe/exg.hpp"

namespace wearsim::afe {

/// Analog-domain power of the ExG AFE.
///
/// The default model is floor + channels * per_channel(mode) *
/// (rate / 1 kSPS)^rate_exponent. Explicit entries keyed by
/// (channels, rate, mode) override the model. The text format is one entry
/// per line, `channels rate mode = mW`, with `#` comments:
///
///     # ch  rate  mode  =  mW
///     8     1000  HR    =  6.4
class AfePowerTable {
 public:
  double floor_mw = 0.4;
  double per_channel_hr_mw = 0.75;
  double per_channel_lp_mw = 0.33;
  double rate_exponent = 0.15;

  double lookup(int channels, int rate, AfeMode mode) const;
  void set(int channels, int rate, AfeMode mode, double mw);
  std::size_t override_count() const { return overrides_.size(); }

  static AfePowerTable parse(std::istream& is);
  static AfePowerTable load(const std::filesystem::path& path);

 private:
  std::map<std::tuple<int, int, AfeMode>, double> overrides_;
};

/// Analog power for a configuration; monotone in channels and rate for the
/// default model.
double exg_power(const ExgAfeConfig& cfg, const AfePowerTable& table = {});

}  // namespace wearsim::afe
