#pragma once

#include <iomanip>
#include <ostream>

#include "wearsim/dsp/spectral.hpp"

namespace wearsim::dsp {

/// CSV with header `frequency,power`, one row per bin.
inline void write_psd_csv(std::ostream& os, const PowerSpectrum& p) {
  os << "frequency,power\n" << std::setprecision(10);
  for (Eigen::Index k = 0; k < p.frequency.size(); ++k) os << p.frequency(k) << ',' << p.power(k) << '\n';
}

/// CSV matrix: header row `time_s,<bin frequencies...>`, then one row per window.
inline void write_spectrogram_csv(std::ostream& os, const SpectrogramGrid& g) {
  os << "time_s" << std::setprecision(10);
  for (Eigen::Index k = 0; k < g.frequency.size(); ++k) os << ',' << g.frequency(k);
  os << '\n';
  for (Eigen::Index r = 0; r < g.power.rows(); ++r) {
    os << g.time(r);
    for (Eigen::Index k = 0; k < g.power.cols(); ++k) os << ',' << g.power(r, k);
    os << '\n';
  }
}

}  // namespace wearsim::dsp
