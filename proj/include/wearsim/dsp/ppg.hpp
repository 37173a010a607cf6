#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "wearsim/core/error.hpp"

namespace wearsim::dsp {

namespace detail {

// Centered moving mean with the window shrinking at both ends.
template <typename Scalar>
Eigen::ArrayXd centered_mean(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& x, Eigen::Index width) {
  const Eigen::Index n = x.size();
  Eigen::ArrayXd prefix(n + 1);
  prefix(0) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + static_cast<double>(x(i));
  const Eigen::Index half = width / 2;
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(n, i + half + 1);
    out(i) = (prefix(hi) - prefix(lo)) / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace detail

/// Gaussian averaging kernel spanning `width` samples (sigma = width / 5),
/// normalised to unit sum.
inline Eigen::ArrayXd gaussian_kernel(Eigen::Index width) {
  const Eigen::Index half = width / 2;
  const double sigma = std::max(static_cast<double>(width) / 5.0, 0.5);
  Eigen::ArrayXd k(2 * half + 1);
  for (Eigen::Index j = -half; j <= half; ++j) {
    k(j + half) = std::exp(-0.5 * static_cast<double>(j * j) / (sigma * sigma));
  }
  return k / k.sum();
}

/// Moving-mean detrend followed by a Gaussian averaging filter.
///
/// Both stages use centered windows, so the output has no phase shift.
/// At the trace edges the Gaussian kernel is truncated and renormalised.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> ppg_filter(const Eigen::DenseBase<Derived>& input, double fs,
                                                                     double mean_window_s, double gauss_window_s = 0.1) {
  using Scalar = typename Derived::Scalar;
  require(fs > 0.0, "sample rate must be positive");
  const auto gauss_width = static_cast<Eigen::Index>(std::llround(gauss_window_s * fs));
  const auto mean_width = static_cast<Eigen::Index>(std::llround(mean_window_s * fs));
  require(gauss_window_s * fs >= 1.0, "Gaussian window must cover at least one sample");
  require(mean_width >= 1, "moving-mean window must cover at least one sample");
  require(mean_width <= input.size() && gauss_width <= input.size(), "filter window longer than trace");

  const Eigen::Array<Scalar, Eigen::Dynamic, 1> x = input.derived().template cast<Scalar>();
  const Eigen::ArrayXd detrended = x.template cast<double>() - detail::centered_mean(x, mean_width);

  const Eigen::ArrayXd k = gaussian_kernel(gauss_width);
  const Eigen::Index half = k.size() / 2;
  const Eigen::Index n = x.size();
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    double weight = 0.0;
    for (Eigen::Index j = -half; j <= half; ++j) {
      const Eigen::Index t = i + j;
      if (t < 0 || t >= n) continue;
      acc += k(j + half) * detrended(t);
      weight += k(j + half);
    }
    out(i) = static_cast<Scalar>(acc / weight);
  }
  return out;
}

/// Local maxima that dominate a +/- min_distance_s neighbourhood and exceed
/// `threshold`. Returned times (seconds) are refined by parabolic
/// interpolation over the three samples around each maximum.
template <typename Derived>
std::vector<double> detect_peaks(const Eigen::DenseBase<Derived>& x, double fs, double min_distance_s = 0.33,
                                 double threshold = 0.0) {
  require(fs > 0.0, "sample rate must be positive");
  const auto radius = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(min_distance_s * fs)));
  const Eigen::Index n = x.size();
  std::vector<double> peaks;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double v = static_cast<double>(x(i));
    if (v <= threshold) continue;
    bool dominant = true;
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - radius); j <= std::min(n - 1, i + radius) && dominant; ++j) {
      const double u = static_cast<double>(x(j));
      if (u > v || (u == v && j < i)) dominant = false;
    }
    if (!dominant) continue;
    const double a = static_cast<double>(x(i - 1));
    const double c = static_cast<double>(x(i + 1));
    const double denom = a - 2.0 * v + c;
    const double offset = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    peaks.push_back((static_cast<double>(i) + offset) / fs);
  }
  return peaks;
}

/// Successive differences of peak times.
inline std::vector<double> intervals(const std::vector<double>& times) {
  std::vector<double> d;
  for (std::size_t i = 1; i < times.size(); ++i) d.push_back(times[i] - times[i - 1]);
  return d;
}

}  // namespace wearsim::dsp
