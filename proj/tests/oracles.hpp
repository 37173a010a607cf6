#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "wearsim/device/command.hpp"

namespace oracle {

/// O(N^2) DFT in long double, bins 0..N/2.
template <typename Scalar>
std::vector<std::complex<long double>> naive_rdft(const Eigen::Array<Scalar, Eigen::Dynamic, 1>& x) {
  const auto n = static_cast<std::size_t>(x.size());
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  std::vector<std::complex<long double>> twiddle(n);
  for (std::size_t m = 0; m < n; ++m) {
    const long double a = -two_pi * static_cast<long double>(m) / static_cast<long double>(n);
    twiddle[m] = {std::cos(a), std::sin(a)};
  }
  std::vector<std::complex<long double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<long double> acc{0.0L, 0.0L};
    for (std::size_t i = 0; i < n; ++i) {
      acc += static_cast<long double>(x(static_cast<Eigen::Index>(i))) * twiddle[(k * i) % n];
    }
    out[k] = acc;
  }
  return out;
}

/// max_k |X_k - Y_k| / max_k |Y_k|.
template <typename Bins>
double max_relative_error(const Bins& got, const std::vector<std::complex<long double>>& ref) {
  long double scale = 0.0L;
  long double worst = 0.0L;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    scale = std::max(scale, std::abs(ref[k]));
    const std::complex<long double> g(static_cast<long double>(got(static_cast<Eigen::Index>(k)).real()),
                                      static_cast<long double>(got(static_cast<Eigen::Index>(k)).imag()));
    worst = std::max(worst, std::abs(g - ref[k]));
  }
  return scale == 0.0L ? 0.0 : static_cast<double>(worst / scale);
}

/// Parseval for a real signal from its half spectrum: sum x^2 = (|X0|^2 + 2 sum |Xk|^2 + |X_{N/2}|^2) / N.
template <typename Bins>
double half_spectrum_energy(const Bins& bins, Eigen::Index n) {
  double e = 0.0;
  for (Eigen::Index k = 0; k < bins.size(); ++k) {
    const double m = std::norm(std::complex<double>(bins(k)));
    e += (k == 0 || k == n / 2) ? m : 2.0 * m;
  }
  return e / static_cast<double>(n);
}

/// Legal-transition table written out by hand, independent of the firmware code.
/// `answered` is false for commands swallowed while asleep. `selected` is the
/// modality chosen by an earlier SET_MODE; `edge_ok` says whether the active
/// sample rate has a supported FFT size.
struct Expected {
  bool answered = true;
  bool accepted = false;
  wearsim::device::DeviceMode next = wearsim::device::DeviceMode::BOOT;
};

inline Expected expected_transition(wearsim::device::DeviceMode s, wearsim::device::CommandKind k,
                                    std::optional<wearsim::device::DeviceMode> mode,
                                    wearsim::device::DeviceMode selected, bool edge_ok) {
  using wearsim::device::CommandKind;
  using wearsim::device::DeviceMode;
  if (s == DeviceMode::SLEEP) return {false, false, DeviceMode::SLEEP};
  if (s == DeviceMode::BOOT) return {true, false, DeviceMode::BOOT};
  if (s == DeviceMode::STREAMING || s == DeviceMode::EDGE_COMPUTE) {
    if (k == CommandKind::STOP) return {true, true, DeviceMode::CONNECTED_IDLE};
    return {true, false, s};
  }
  // CONNECTED_IDLE
  switch (k) {
    case CommandKind::START: {
      const DeviceMode target = mode.value_or(selected);
      if (target == DeviceMode::EDGE_COMPUTE && !edge_ok) return {true, false, DeviceMode::CONNECTED_IDLE};
      return {true, true, target};
    }
    case CommandKind::SLEEP: return {true, true, DeviceMode::SLEEP};
    case CommandKind::STOP: return {true, false, DeviceMode::CONNECTED_IDLE};
    case CommandKind::SET_MODE:
    case CommandKind::SET_PARAMS: return {true, true, DeviceMode::CONNECTED_IDLE};
  }
  return {};
}

}  // namespace oracle
