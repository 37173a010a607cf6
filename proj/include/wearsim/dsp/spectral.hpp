#pragma once

#include <Eigen/Core>

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>

#include "wearsim/dsp/fft.hpp"

namespace wearsim::dsp {

/// Cached per-thread FFT plan. Kernels stay reentrant: each thread owns
/// its cache and plans are immutable once built.
template <typename Scalar>
const RealFft<Scalar>& plan_for(Eigen::Index n) {
  thread_local std::map<Eigen::Index, std::unique_ptr<RealFft<Scalar>>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft<Scalar>>(n);
  return *slot;
}

/// One-sided complex spectrum of a real window.
template <typename Scalar>
struct Spectrum {
  ComplexArray<Scalar> bins;
  double fs = 0.0;
  Eigen::Index n = 0;

  double frequency(Eigen::Index k) const { return static_cast<double>(k) * fs / static_cast<double>(n); }
  double resolution() const { return fs / static_cast<double>(n); }
};

/// Forward real FFT of a power-of-two length window.
template <typename Derived>
Spectrum<typename Derived::Scalar> rfft(const Eigen::DenseBase<Derived>& window, double fs = 1.0) {
  using Scalar = typename Derived::Scalar;
  if (!is_power_of_two(window.size()) || window.size() < 2) {
    throw ParameterError("rfft length must be a power of two, got " + std::to_string(window.size()));
  }
  Spectrum<Scalar> s;
  s.bins = plan_for<Scalar>(window.size()).forward(window);
  s.fs = fs;
  s.n = window.size();
  return s;
}

/// Inverse of rfft().
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> irfft(const Spectrum<Scalar>& s) {
  return plan_for<Scalar>(s.n).inverse(s.bins);
}

/// Periodic Hann window of length n.
template <typename Scalar = double>
Eigen::Array<Scalar, Eigen::Dynamic, 1> hann(Eigen::Index n) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = static_cast<Scalar>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
  }
  return w;
}

/// Averaged one-sided power spectral density (V^2/Hz for volt input).
struct PowerSpectrum {
  Eigen::ArrayXd frequency;
  Eigen::ArrayXd power;
  double fs = 0.0;
  Eigen::Index window = 0;
  Eigen::Index overlap = 0;
  Eigen::Index segments = 0;

  double resolution() const { return fs / static_cast<double>(window); }

  /// Sum of power * df over bins whose frequency lies in [f_lo, f_hi].
  double band_power(double f_lo, double f_hi) const {
    double total = 0.0;
    for (Eigen::Index k = 0; k < frequency.size(); ++k) {
      if (frequency(k) >= f_lo && frequency(k) <= f_hi) total += power(k);
    }
    return total * resolution();
  }

  Eigen::Index peak_bin(double f_lo = 0.0, double f_hi = 1e300) const {
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < frequency.size(); ++k) {
      if (frequency(k) < f_lo || frequency(k) > f_hi) continue;
      if (best < 0 || power(k) > power(best)) best = k;
    }
    return best;
  }
};

/// Time-resolved PSD: one row per window position, one column per bin.
struct SpectrogramGrid {
  Eigen::MatrixXd power;
  Eigen::ArrayXd time;
  Eigen::ArrayXd frequency;
  double fs = 0.0;
  Eigen::Index window = 0;
  Eigen::Index overlap = 0;

  Eigen::Index hop() const { return window - overlap; }
  double resolution() const { return fs / static_cast<double>(window); }

  double band_power(Eigen::Index row, double f_lo, double f_hi) const {
    double total = 0.0;
    for (Eigen::Index k = 0; k < frequency.size(); ++k) {
      if (frequency(k) >= f_lo && frequency(k) <= f_hi) total += power(row, k);
    }
    return total * resolution();
  }
};

namespace detail {

inline void check_segmenting(Eigen::Index length, Eigen::Index window, Eigen::Index overlap, double fs) {
  require(fs > 0.0, "sample rate must be positive");
  require(is_power_of_two(window) && window >= 2, "window must be a power of two");
  require(overlap >= 0 && overlap < window, "overlap must satisfy 0 <= overlap < window");
  require(length >= window, "trace of " + std::to_string(length) + " samples is shorter than window " +
                                std::to_string(window));
}

inline Eigen::Index segment_count(Eigen::Index length, Eigen::Index window, Eigen::Index overlap) {
  return (length - window) / (window - overlap) + 1;
}

// Density of a single Hann-windowed segment starting at `start`.
template <typename Derived>
Eigen::ArrayXd segment_density(const Eigen::DenseBase<Derived>& x, Eigen::Index start, Eigen::Index window,
                               double fs) {
  using Scalar = typename Derived::Scalar;
  const auto w = hann<Scalar>(window);
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> seg = x.derived().segment(start, window).array() * w;
  const auto bins = plan_for<Scalar>(window).forward(seg);
  const double w_energy = w.template cast<double>().square().sum();
  Eigen::ArrayXd p(bins.size());
  for (Eigen::Index k = 0; k < bins.size(); ++k) {
    const double mag2 = std::norm(std::complex<double>(bins(k)));
    const double side = (k == 0 || k == bins.size() - 1) ? 1.0 : 2.0;
    p(k) = side * mag2 / (fs * w_energy);
  }
  return p;
}

inline Eigen::ArrayXd bin_frequencies(Eigen::Index window, double fs) {
  return Eigen::ArrayXd::LinSpaced(window / 2 + 1, 0.0, fs / 2.0);
}

}  // namespace detail

/// Welch-averaged PSD with a periodic Hann window.
///
/// Segments start every (window - overlap) samples; the count is
/// floor((len - window) / hop) + 1. Density is one-sided and normalised by
/// fs * sum(w^2), so integrating it over [0, fs/2] recovers the variance.
template <typename Derived>
PowerSpectrum psd(const Eigen::DenseBase<Derived>& x, double fs, Eigen::Index window, Eigen::Index overlap) {
  detail::check_segmenting(x.size(), window, overlap, fs);
  PowerSpectrum out;
  out.fs = fs;
  out.window = window;
  out.overlap = overlap;
  out.segments = detail::segment_count(x.size(), window, overlap);
  out.frequency = detail::bin_frequencies(window, fs);
  out.power = Eigen::ArrayXd::Zero(window / 2 + 1);
  const Eigen::Index hop = window - overlap;
  for (Eigen::Index s = 0; s < out.segments; ++s) {
    out.power += detail::segment_density(x, s * hop, window, fs);
  }
  out.power /= static_cast<double>(out.segments);
  return out;
}

/// Spectrogram with the same per-window density as psd().
template <typename Derived>
SpectrogramGrid spectrogram(const Eigen::DenseBase<Derived>& x, double fs, Eigen::Index window = 1024,
                            Eigen::Index overlap = 768) {
  detail::check_segmenting(x.size(), window, overlap, fs);
  const Eigen::Index rows = detail::segment_count(x.size(), window, overlap);
  const Eigen::Index hop = window - overlap;
  SpectrogramGrid g;
  g.fs = fs;
  g.window = window;
  g.overlap = overlap;
  g.frequency = detail::bin_frequencies(window, fs);
  g.power.resize(rows, window / 2 + 1);
  g.time.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    g.power.row(r) = detail::segment_density(x, r * hop, window, fs).matrix().transpose();
    g.time(r) = (static_cast<double>(r * hop) + static_cast<double>(window) / 2.0) / fs;
  }
  return g;
}

/// RMS amplitude of the band [f_lo, f_hi], from the integral of the PSD.
///
/// The Welch window is the shortest power of two resolving f_lo / 2,
/// capped at the trace length, with 50% overlap.
template <typename Derived>
double integrated_rms_noise(const Eigen::DenseBase<Derived>& x, double fs, double f_lo = 0.5,
                            double f_hi = 100.0) {
  require(fs > 0.0, "sample rate must be positive");
  require(f_lo > 0.0 && f_lo < f_hi, "band must satisfy 0 < f_lo < f_hi");
  require(f_hi <= fs / 2.0, "band upper edge exceeds Nyquist");
  const double duration = static_cast<double>(x.size()) / fs;
  require(duration >= 2.0 / f_lo, "trace must last at least 2 / f_lo seconds");
  Eigen::Index window = next_power_of_two(static_cast<Eigen::Index>(std::ceil(2.0 * fs / f_lo)));
  while (window > x.size()) window >>= 1;
  const PowerSpectrum p = psd(x, fs, window, window / 2);
  return std::sqrt(p.band_power(f_lo, f_hi));
}

}  // namespace wearsim::dsp
