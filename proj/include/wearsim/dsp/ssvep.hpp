#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <vector>

#include "wearsim/dsp/spectral.hpp"

namespace wearsim::dsp {

/// Stimulation frequencies of the four-target checkerboard protocol.
inline const std::vector<double>& default_stimulus_frequencies() {
  static const std::vector<double> f{1.0, 3.125, 7.8125, 10.6125};
  return f;
}

inline constexpr int kHarmonics = 3;

struct BinOptions {
  /// Add the two neighbouring bins to each selected bin.
  bool aggregate_neighbors = false;
};

/// Harmonic bin powers of one channel.
///
/// harmonic_power(i, h) is |X|^2 at the bin nearest (h+1) * stim_freqs[i];
/// stim_power(i) is the row sum. Harmonics at or above Nyquist are
/// skipped (zero power) and flagged.
struct ChannelBinPowers {
  std::vector<double> stim_freqs;
  Eigen::ArrayXXd harmonic_power;
  Eigen::ArrayXd stim_power;
  std::vector<std::array<bool, kHarmonics>> skipped;

  bool any_skipped() const {
    for (const auto& row : skipped) {
      for (bool s : row) {
        if (s) return true;
      }
    }
    return false;
  }

  Eigen::Index argmax() const {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < stim_power.size(); ++i) {
      if (stim_power(i) > stim_power(best) ||
          (stim_power(i) == stim_power(best) && stim_freqs[static_cast<std::size_t>(i)] <
                                                    stim_freqs[static_cast<std::size_t>(best)])) {
        best = i;
      }
    }
    return best;
  }

  /// The single value transmitted per channel in summary payload mode:
  /// the summed harmonic power of the strongest stimulus.
  double summary() const { return stim_power.size() == 0 ? 0.0 : stim_power(argmax()); }

  /// Rebuild from received per-harmonic powers (row-major, stimulus by harmonic).
  static ChannelBinPowers from_harmonics(std::vector<double> freqs, const Eigen::ArrayXXd& harmonic) {
    ChannelBinPowers c;
    c.stim_freqs = std::move(freqs);
    c.harmonic_power = harmonic;
    c.stim_power = harmonic.rowwise().sum();
    c.skipped.assign(c.stim_freqs.size(), {false, false, false});
    return c;
  }
};

/// Per-channel bin powers for one hop.
struct SsvepBinReport {
  std::vector<ChannelBinPowers> channels;
};

inline Eigen::Index nearest_bin(double f, double fs, Eigen::Index n) {
  return static_cast<Eigen::Index>(std::llround(f * static_cast<double>(n) / fs));
}

/// Harmonic bin powers of one channel's spectrum, using the nearest bin to
/// each of f, 2f and 3f.
template <typename Scalar>
ChannelBinPowers ssvep_bin_power(const Spectrum<Scalar>& spectrum, const std::vector<double>& stim_freqs,
                                 BinOptions options = {}) {
  const auto k_count = static_cast<Eigen::Index>(stim_freqs.size());
  ChannelBinPowers c;
  c.stim_freqs = stim_freqs;
  c.harmonic_power = Eigen::ArrayXXd::Zero(k_count, kHarmonics);
  c.skipped.assign(stim_freqs.size(), {false, false, false});
  const Eigen::Index last = spectrum.n / 2;
  auto mag2 = [&](Eigen::Index k) { return std::norm(std::complex<double>(spectrum.bins(k))); };
  for (Eigen::Index i = 0; i < k_count; ++i) {
    require(stim_freqs[static_cast<std::size_t>(i)] > 0.0, "stimulation frequency must be positive");
    for (int h = 0; h < kHarmonics; ++h) {
      const double f = stim_freqs[static_cast<std::size_t>(i)] * (h + 1);
      if (f >= spectrum.fs / 2.0) {
        c.skipped[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)] = true;
        continue;
      }
      const Eigen::Index k = nearest_bin(f, spectrum.fs, spectrum.n);
      double p = mag2(k);
      if (options.aggregate_neighbors) {
        if (k > 0) p += mag2(k - 1);
        if (k < last) p += mag2(k + 1);
      }
      c.harmonic_power(i, h) = p;
    }
  }
  c.stim_power = c.harmonic_power.rowwise().sum();
  return c;
}

/// Argmax stimulation frequency; ties resolve toward the lower frequency.
inline double classify_ssvep(const ChannelBinPowers& channel) {
  require(!channel.stim_freqs.empty(), "bin report has no stimulus entries");
  return channel.stim_freqs[static_cast<std::size_t>(channel.argmax())];
}

/// Classification over all channels of a report (harmonic powers summed).
inline double classify_ssvep(const SsvepBinReport& report) {
  require(!report.channels.empty(), "bin report has no channels");
  ChannelBinPowers total = report.channels.front();
  for (std::size_t c = 1; c < report.channels.size(); ++c) {
    total.harmonic_power += report.channels[c].harmonic_power;
  }
  total.stim_power = total.harmonic_power.rowwise().sum();
  return classify_ssvep(total);
}

}  // namespace wearsim::dsp
