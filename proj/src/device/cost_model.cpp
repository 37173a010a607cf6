#include "wearsim/device/cost_model.hpp"

#include <cmath>

#include "wearsim/core/error.hpp"
#include "wearsim/dsp/fft.hpp"

namespace wearsim::device {

namespace {

std::int64_t scaled(std::int64_t at_1024, Eigen::Index n) {
  require(n >= 2 && dsp::is_power_of_two(n), "FFT size must be a power of two");
  const double work = static_cast<double>(n) * dsp::log2_exact(n);
  return std::llround(static_cast<double>(at_1024) * work / (1024.0 * 10.0));
}

}  // namespace

std::int64_t ClusterCostModel::cycles_per_fft(Eigen::Index n, bool parallel) const {
  const std::int64_t c = scaled(parallel_cycles_1024, n);
  return parallel ? c : std::llround(static_cast<double>(c) * parallel_speedup);
}

std::int64_t ClusterCostModel::dma_cycles(Eigen::Index n) const { return scaled(dma_cycles_1024, n); }

std::int64_t ClusterCostModel::batch_cycles(int ffts, Eigen::Index n, bool parallel) const {
  require(ffts >= 0, "FFT count must be non-negative");
  return static_cast<std::int64_t>(ffts) * (cycles_per_fft(n, parallel) + dma_cycles(n));
}

double ClusterCostModel::flops_per_fft(Eigen::Index n) {
  return 2.5 * static_cast<double>(n) * dsp::log2_exact(n);
}

void ClusterCostModel::validate() const {
  require(clock_hz > 0.0, "cluster clock must be positive");
  require(parallel_cycles_1024 > 0 && dma_cycles_1024 >= 0, "cycle counts must be non-negative");
  require(parallel_speedup >= 1.0, "parallel speedup must be at least 1");
  require(cluster_power_mw > 0.0, "cluster power must be positive");
}

CycleReport edge_batch_cost(const ClusterCostModel& cost, int channels, Eigen::Index n, double hop_s) {
  CycleReport r;
  r.cycles = cost.batch_cycles(channels, n);
  r.seconds = cost.seconds(r.cycles);
  r.energy_uj = cost.cluster_power_mw * r.seconds * 1000.0;
  r.overrun = r.seconds > hop_s;
  return r;
}

double task_efficiency(const ClusterCostModel& cost, double cluster_power_mw, Eigen::Index n, int ffts) {
  require(cluster_power_mw > 0.0, "cluster power must be positive");
  if (ffts == 0) return 0.0;
  const double t = cost.seconds(cost.batch_cycles(ffts, n));
  const double flops_per_s = ClusterCostModel::flops_per_fft(n) * ffts / t;
  return flops_per_s / 1e6 / cluster_power_mw;
}

}  // namespace wearsim::device
