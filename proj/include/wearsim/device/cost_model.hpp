#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace wearsim::device {

/// Cycle model of the eight-core compute cluster running real FFTs.
///
/// cycles(N) = cycles(1024) * N log2 N / (1024 * 10); the DMA overhead per
/// FFT scales the same way. A batch of `ffts` transforms costs
/// ffts * (fft + dma) cycles.
struct ClusterCostModel {
  double clock_hz = 240e6;
  double core_voltage = 0.65;
  std::int64_t parallel_cycles_1024 = 12000;
  std::int64_t dma_cycles_1024 = 750;
  double parallel_speedup = 5.3;
  double cluster_power_mw = 28.855;

  std::int64_t cycles_per_fft(Eigen::Index n, bool parallel = true) const;
  std::int64_t dma_cycles(Eigen::Index n) const;
  std::int64_t batch_cycles(int ffts, Eigen::Index n, bool parallel = true) const;
  double seconds(std::int64_t cycles) const { return static_cast<double>(cycles) / clock_hz; }

  /// Floating-point operations credited to one N-point real FFT.
  static double flops_per_fft(Eigen::Index n);
  static std::string flops_convention() { return "2.5*N*log2(N) flops per N-point real FFT"; }

  void validate() const;
};

struct CycleReport {
  std::int64_t cycles = 0;
  double seconds = 0.0;
  double energy_uj = 0.0;  // charged to DIGITAL_1V8
  bool overrun = false;
};

CycleReport edge_batch_cost(const ClusterCostModel& cost, int channels, Eigen::Index n, double hop_s);

/// Mflops/s/mW while the cluster runs `ffts` N-point transforms back to back.
double task_efficiency(const ClusterCostModel& cost, double cluster_power_mw, Eigen::Index n = 1024, int ffts = 8);

}  // namespace wearsim::device
