#include "wearsim/device/energy.hpp"

#include <numeric>

#include "wearsim/link/bandwidth.hpp"

namespace wearsim::device {

std::string to_string(Domain d) {
  switch (d) {
    case Domain::DIGITAL_1V8: return "DIGITAL_1V8";
    case Domain::ANALOG_3V0: return "ANALOG_3V0";
    case Domain::LED_4V2: return "LED_4V2";
    case Domain::IMU_LDO: return "IMU_LDO";
    case Domain::RADIO: return "RADIO";
  }
  return "?";
}

double sum(const DomainValues& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

namespace {

DeviceConfig reference_config() {
  DeviceConfig cfg;
  cfg.eeg_channels = 8;
  cfg.fs = 1000;
  cfg.gain = 6;
  cfg.afe_mode = afe::AfeMode::HIGH_RESOLUTION;
  cfg.ppg.enabled = false;
  cfg.payload_mode = PayloadMode::SUMMARY_1FP;
  return cfg;
}

double edge_compute_mw(const DeviceConfig& cfg, const ClusterCostModel& cost) {
  if (cfg.eeg_channels == 0 || !cfg.edge_capable()) return 0.0;
  const CycleReport r = edge_batch_cost(cost, cfg.eeg_channels, cfg.fft_size(), cfg.hop_ms / 1000.0);
  return r.energy_uj / static_cast<double>(cfg.hop_ms);  // uJ per ms = mW
}

}  // namespace

PowerCalibration PowerCalibration::defaults(const ClusterCostModel& cost, double link_bps) {
  PowerCalibration cal;
  const DeviceConfig ref = reference_config();
  cal.digital_streaming_mw = cal.streaming_target_mw - sum(steady_state_power(DeviceMode::STREAMING, ref, cal, cost, link_bps));
  cal.digital_edge_mw = cal.edge_target_mw - sum(steady_state_power(DeviceMode::EDGE_COMPUTE, ref, cal, cost, link_bps));
  cal.validate();
  return cal;
}

void PowerCalibration::validate() const {
  for (double v : {imu_mw, radio_tx_mw, radio_rx_mw, digital_sleep_mw, digital_idle_mw, digital_streaming_mw,
                   digital_edge_mw, ppg_supply_v}) {
    require(v >= 0.0, "power calibration entries must be non-negative");
  }
}

DomainValues baseline_power(DeviceMode mode, const DeviceConfig& cfg, const PowerCalibration& cal) {
  DomainValues p{};
  at(p, Domain::IMU_LDO) = cal.imu_mw;
  switch (mode) {
    case DeviceMode::SLEEP: at(p, Domain::DIGITAL_1V8) = cal.digital_sleep_mw; return p;
    case DeviceMode::BOOT:
    case DeviceMode::CONNECTED_IDLE: at(p, Domain::DIGITAL_1V8) = cal.digital_idle_mw; return p;
    case DeviceMode::STREAMING: at(p, Domain::DIGITAL_1V8) = cal.digital_streaming_mw; break;
    case DeviceMode::EDGE_COMPUTE: at(p, Domain::DIGITAL_1V8) = cal.digital_edge_mw; break;
  }
  if (cfg.eeg_channels > 0) at(p, Domain::ANALOG_3V0) = afe::exg_power(cfg.afe_config(), cal.afe);
  if (mode == DeviceMode::STREAMING && cfg.ppg.enabled) at(p, Domain::LED_4V2) = cfg.ppg.supply_current_ma() * cal.ppg_supply_v;
  return p;
}

DomainValues steady_state_power(DeviceMode mode, const DeviceConfig& cfg, const PowerCalibration& cal,
                                const ClusterCostModel& cost, double link_bps) {
  require(link_bps > 0.0, "link throughput must be positive");
  DomainValues p = baseline_power(mode, cfg, cal);
  double bps = 0.0;
  if (mode == DeviceMode::STREAMING) bps = link::streaming_throughput(cfg);
  if (mode == DeviceMode::EDGE_COMPUTE) {
    bps = link::edge_throughput(cfg);
    at(p, Domain::DIGITAL_1V8) += edge_compute_mw(cfg, cost);
  }
  at(p, Domain::RADIO) = std::min(1.0, bps / link_bps) * cal.radio_tx_mw;
  return p;
}

EnergyLedger energy_step(EnergyLedger ledger, const DomainValues& power_mw, SimTime dt, const DomainValues& burst_uj) {
  require(dt.ns >= 0, "time step must be non-negative");
  if (dt.ns == 0) return ledger;
  const double s = dt.seconds();
  for (std::size_t d = 0; d < kDomainCount; ++d) {
    require(power_mw[d] >= 0.0 && burst_uj[d] >= 0.0, "power and burst energy must be non-negative");
    const double e = power_mw[d] * s * 1000.0 + burst_uj[d];
    ledger.energy_uj[d] += e;
    ledger.power_mw[d] = e / s / 1000.0;
  }
  ledger.elapsed_s += s;
  return ledger;
}

EnergyLedger energy_step(EnergyLedger ledger, DeviceMode mode, const DeviceConfig& cfg, const PowerCalibration& cal,
                         SimTime dt) {
  return energy_step(std::move(ledger), baseline_power(mode, cfg, cal), dt);
}

double battery_lifetime_h(double rate_mw, double capacity_mah, double v_nom) {
  require(rate_mw > 0.0, "power draw must be positive");
  require(capacity_mah > 0.0 && v_nom > 0.0, "battery capacity and voltage must be positive");
  return capacity_mah * v_nom / rate_mw;
}

double energy_per_sample_uj(double power_mw, double fs, int channels) {
  require(power_mw >= 0.0 && fs >= 0.0 && channels >= 0, "arguments must be non-negative");
  const double rate = fs * channels;
  if (power_mw == 0.0 || rate == 0.0) return 0.0;
  return power_mw / rate * 1000.0;
}

}  // namespace wearsim::device
