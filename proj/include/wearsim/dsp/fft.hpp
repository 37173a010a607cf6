#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "wearsim/core/error.hpp"

namespace wearsim::dsp {

template <typename Scalar>
using ComplexArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline Eigen::Index next_power_of_two(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline int log2_exact(Eigen::Index n) {
  int k = 0;
  while ((Eigen::Index{1} << k) < n) ++k;
  return k;
}

/// Radix-2 real-input FFT plan.
///
/// A length-N real sequence is packed into an N/2-point complex sequence
/// (even samples in the real part, odd samples in the imaginary part),
/// transformed in place, then split into the N/2+1 non-negative frequency
/// bins. Twiddles are evaluated in double precision and rounded once to
/// Scalar, so a float plan only carries butterfly rounding error.
template <typename Scalar>
class RealFft {
 public:
  using Complex = std::complex<Scalar>;

  explicit RealFft(Eigen::Index n) : n_(n), half_(n / 2) {
    if (!is_power_of_two(n) || n < 2) {
      throw ParameterError("real FFT length must be a power of two >= 2, got " + std::to_string(n));
    }
    const double two_pi = 2.0 * std::numbers::pi;
    twiddle_.resize(static_cast<std::size_t>(half_ / 2 + 1));
    for (std::size_t k = 0; k < twiddle_.size(); ++k) {
      const double a = -two_pi * static_cast<double>(k) / static_cast<double>(half_);
      twiddle_[k] = Complex(static_cast<Scalar>(std::cos(a)), static_cast<Scalar>(std::sin(a)));
    }
    split_.resize(static_cast<std::size_t>(half_ + 1));
    for (Eigen::Index k = 0; k <= half_; ++k) {
      const double a = -two_pi * static_cast<double>(k) / static_cast<double>(n_);
      split_[static_cast<std::size_t>(k)] = Complex(static_cast<Scalar>(std::cos(a)), static_cast<Scalar>(std::sin(a)));
    }
    bitrev_.resize(static_cast<std::size_t>(half_));
    const int bits = log2_exact(half_);
    for (Eigen::Index i = 0; i < half_; ++i) {
      Eigen::Index r = 0;
      for (int b = 0; b < bits; ++b) {
        if (i & (Eigen::Index{1} << b)) r |= Eigen::Index{1} << (bits - 1 - b);
      }
      bitrev_[static_cast<std::size_t>(i)] = r;
    }
  }

  Eigen::Index size() const { return n_; }
  Eigen::Index bins() const { return half_ + 1; }

  /// Forward transform of a real sequence of length size().
  template <typename Derived>
  ComplexArray<Scalar> forward(const Eigen::DenseBase<Derived>& x) const {
    if (x.size() != n_) {
      throw ParameterError("FFT input length " + std::to_string(x.size()) + " does not match plan " +
                           std::to_string(n_));
    }
    ComplexArray<Scalar> z(half_);
    for (Eigen::Index i = 0; i < half_; ++i) {
      z(i) = Complex(static_cast<Scalar>(x(2 * i)), static_cast<Scalar>(x(2 * i + 1)));
    }
    transform(z, false);

    ComplexArray<Scalar> out(half_ + 1);
    const Complex half_i(0, Scalar(0.5));
    for (Eigen::Index k = 0; k <= half_; ++k) {
      const Complex zk = z(k % half_);
      const Complex zm = std::conj(z((half_ - k) % half_));
      const Complex even = (zk + zm) * Scalar(0.5);
      const Complex odd = (zk - zm) * -half_i;
      out(k) = even + split_[static_cast<std::size_t>(k)] * odd;
    }
    return out;
  }

  /// Inverse of forward(): N/2+1 bins back to N real samples.
  template <typename Derived>
  Eigen::Array<Scalar, Eigen::Dynamic, 1> inverse(const Eigen::DenseBase<Derived>& bins) const {
    if (bins.size() != half_ + 1) {
      throw ParameterError("inverse FFT expects " + std::to_string(half_ + 1) + " bins");
    }
    ComplexArray<Scalar> z(half_);
    const Complex i_unit(0, 1);
    for (Eigen::Index k = 0; k < half_; ++k) {
      const Complex xk = bins(k);
      const Complex xm = std::conj(static_cast<Complex>(bins(half_ - k)));
      const Complex even = (xk + xm) * Scalar(0.5);
      const Complex odd = (xk - xm) * Scalar(0.5) / split_[static_cast<std::size_t>(k)];
      z(k) = even + i_unit * odd;
    }
    transform(z, true);
    Eigen::Array<Scalar, Eigen::Dynamic, 1> x(n_);
    const Scalar scale = Scalar(1) / static_cast<Scalar>(half_);
    for (Eigen::Index i = 0; i < half_; ++i) {
      x(2 * i) = z(i).real() * scale;
      x(2 * i + 1) = z(i).imag() * scale;
    }
    return x;
  }

 private:
  // In-place iterative complex FFT of length half_.
  void transform(ComplexArray<Scalar>& z, bool inverse) const {
    for (Eigen::Index i = 0; i < half_; ++i) {
      const Eigen::Index r = bitrev_[static_cast<std::size_t>(i)];
      if (r > i) std::swap(z(i), z(r));
    }
    for (Eigen::Index len = 2; len <= half_; len <<= 1) {
      const Eigen::Index step = half_ / len;
      for (Eigen::Index start = 0; start < half_; start += len) {
        for (Eigen::Index j = 0; j < len / 2; ++j) {
          Complex w = twiddle_[static_cast<std::size_t>(j * step)];
          if (inverse) w = std::conj(w);
          const Complex u = z(start + j);
          const Complex v = z(start + j + len / 2) * w;
          z(start + j) = u + v;
          z(start + j + len / 2) = u - v;
        }
      }
    }
  }

  Eigen::Index n_;
  Eigen::Index half_;
  std::vector<Complex> twiddle_;
  std::vector<Complex> split_;
  std::vector<Eigen::Index> bitrev_;
};

}  // namespace wearsim::dsp
