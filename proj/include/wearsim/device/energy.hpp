#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "wearsim/afe/power_table.hpp"
#include "wearsim/core/time.hpp"
#include "wearsim/device/config.hpp"
#include "wearsim/device/cost_model.hpp"

namespace wearsim::device {

enum class Domain : std::size_t { DIGITAL_1V8 = 0, ANALOG_3V0 = 1, LED_4V2 = 2, IMU_LDO = 3, RADIO = 4 };

inline constexpr std::size_t kDomainCount = 5;
inline constexpr Domain kAllDomains[] = {Domain::DIGITAL_1V8, Domain::ANALOG_3V0, Domain::LED_4V2, Domain::IMU_LDO,
                                         Domain::RADIO};

using DomainValues = std::array<double, kDomainCount>;

std::string to_string(Domain d);

inline double& at(DomainValues& v, Domain d) { return v[static_cast<std::size_t>(d)]; }
inline double at(const DomainValues& v, Domain d) { return v[static_cast<std::size_t>(d)]; }
double sum(const DomainValues& v);

/// Accumulated energy per supply rail.
struct EnergyLedger {
  DomainValues energy_uj{};
  DomainValues power_mw{};  // average over the most recent step
  double elapsed_s = 0.0;

  double total_uj() const { return sum(energy_uj); }
  double total_power_mw() const { return sum(power_mw); }
  /// Mean total power since the ledger started.
  double average_power_mw() const { return elapsed_s > 0.0 ? total_uj() / elapsed_s / 1000.0 : 0.0; }
};

/// Power figures for each rail. The streaming and edge digital baselines
/// are solved from the system totals at the reference configuration
/// (8 ch, 1 kSPS, gain 6, high resolution, PPG off).
struct PowerCalibration {
  afe::AfePowerTable afe;
  double imu_mw = 0.0468;  // 26 uA at 1.8 V
  double radio_tx_mw = 13.8;
  double radio_rx_mw = 15.6;
  double digital_sleep_mw = 0.05;
  double digital_idle_mw = 0.9;
  double digital_streaming_mw = 0.0;
  double digital_edge_mw = 0.0;
  double ppg_supply_v = 1.8;

  double streaming_target_mw = 28.8;
  double edge_target_mw = 17.6;
  /// Whole-system budget used for the wearable battery-life figure.
  double edge_system_budget_mw = 18.2;

  static PowerCalibration defaults(const ClusterCostModel& cost = {}, double link_bps = 330000.0);
  void validate() const;
};

/// Continuous draw per rail in a mode, excluding radio air time and
/// cluster compute bursts.
DomainValues baseline_power(DeviceMode mode, const DeviceConfig& cfg, const PowerCalibration& cal);

/// Long-run average per rail: the baseline plus radio duty cycle and, in
/// EDGE_COMPUTE, cluster duty cycle.
DomainValues steady_state_power(DeviceMode mode, const DeviceConfig& cfg, const PowerCalibration& cal,
                                const ClusterCostModel& cost = {}, double link_bps = 330000.0);

/// Add power * dt per rail plus one-off burst energies inside the step.
EnergyLedger energy_step(EnergyLedger ledger, const DomainValues& power_mw, SimTime dt,
                         const DomainValues& burst_uj = {});
EnergyLedger energy_step(EnergyLedger ledger, DeviceMode mode, const DeviceConfig& cfg, const PowerCalibration& cal,
                         SimTime dt);

double battery_lifetime_h(double rate_mw, double capacity_mah = 75.0, double v_nom = 3.7);
double energy_per_sample_uj(double power_mw, double fs, int channels);

}  // namespace wearsim::device
