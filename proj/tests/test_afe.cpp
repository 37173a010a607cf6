#include <doctest.h>

#include <sstream>

#include "wearsim/afe/exg.hpp"
#include "wearsim/afe/imu.hpp"
#include "wearsim/afe/impedance.hpp"
#include "wearsim/afe/power_table.hpp"
#include "wearsim/afe/ppg_sensor.hpp"
#include "wearsim/dsp/spectral.hpp"

using namespace wearsim;

TEST_CASE("ExG quantizer scale and extremes") {
  afe::ExgAfeConfig cfg;
  CHECK(cfg.full_scale() == doctest::Approx(0.4));
  CHECK(cfg.lsb() == doctest::Approx(4.76837158203125e-08));
  bool sat = true;
  CHECK(afe::quantize(0.0, cfg, &sat) == 0);
  CHECK_FALSE(sat);
  CHECK(afe::quantize(cfg.lsb() * 8388607.0, cfg, &sat) == 8388607);
  CHECK_FALSE(sat);
  CHECK(afe::quantize(-0.4, cfg, &sat) == -8388608);
  CHECK_FALSE(sat);
  CHECK(afe::quantize(0.4, cfg, &sat) == afe::kCodeMax);
  CHECK(sat);
  CHECK(afe::quantize(-1.0, cfg, &sat) == afe::kCodeMin);
  CHECK(sat);
  CHECK(afe::quantize(1e-3, cfg) == 20972);
}

TEST_CASE("dequantize inverts quantize within half an LSB") {
  afe::ExgAfeConfig cfg;
  cfg.gain = 12;
  for (double v : {-0.19, -1e-5, 3.3e-7, 0.1, 0.1999}) {
    CHECK(std::abs(afe::dequantize(afe::quantize(v, cfg), cfg) - v) <= 0.5 * cfg.lsb() + 1e-18);
  }
}

TEST_CASE("supported gains and data rates") {
  for (int g : {1, 2, 3, 4, 6, 8, 12}) CHECK(afe::is_supported_gain(g));
  for (int g : {0, 5, 7, 24}) CHECK_FALSE(afe::is_supported_gain(g));
  for (int r : {250, 500, 1000, 2000, 4000}) CHECK(afe::is_supported_data_rate(r));
  for (int r : {0, 100, 1500}) CHECK_FALSE(afe::is_supported_data_rate(r));
  afe::ExgAfeConfig cfg;
  cfg.gain = 5;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.gain = 6;
  cfg.active_channels = 9;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("AFE anti-alias filter step response") {
  afe::ExgAfeConfig cfg;
  cfg.noise_enabled = false;
  cfg.active_channels = 1;
  CHECK(cfg.cutoff_hz() == doctest::Approx(262.0));
  afe::ExgAfe a(cfg, 1);
  const std::vector<double> zero{0.0};
  const std::vector<double> step{0.1};
  CHECK(a.sample_voltages(zero, SimTime{}).eeg[0] == 0);
  const auto f1 = a.sample_voltages(step, SimTime::from_ms(1));
  CHECK(afe::dequantize(f1.eeg[0], cfg) == doctest::Approx(0.1 * 0.8072178628010696).epsilon(1e-6));
  const auto f2 = a.sample_voltages(step, SimTime::from_ms(2));
  CHECK(afe::dequantize(f2.eeg[0], cfg) ==
        doctest::Approx(0.1 * (1.0 - 0.1927821371989305 * 0.1927821371989305)).epsilon(1e-6));
  CHECK(f2.sequence == 2);
  CHECK(a.next_sequence() == 3);
}

TEST_CASE("AFE passes a constant exactly when primed and noiseless") {
  afe::ExgAfeConfig cfg;
  cfg.noise_enabled = false;
  afe::ExgAfe a(cfg, 1);
  const std::vector<double> v(8, 2e-3);
  for (int i = 0; i < 5; ++i) {
    const auto f = a.sample_voltages(v, SimTime::from_ms(i));
    CHECK(f.eeg.size() == 8);
    for (auto code : f.eeg) CHECK(code == afe::quantize(2e-3, cfg));
  }
}

TEST_CASE("AFE saturation flag") {
  afe::ExgAfeConfig cfg;
  cfg.noise_enabled = false;
  cfg.active_channels = 2;
  afe::ExgAfe a(cfg, 1);
  const std::vector<double> v{0.0, 0.5};
  CHECK(a.sample_voltages(v, SimTime{}).saturated);
}

TEST_CASE("AFE input-referred noise floor") {
  for (auto mode : {afe::AfeMode::HIGH_RESOLUTION, afe::AfeMode::LOW_POWER}) {
    afe::ExgAfeConfig cfg;
    cfg.active_channels = 1;
    cfg.mode = mode;
    afe::ExgAfe a(cfg, 17);
    const std::vector<double> zero{0.0};
    Eigen::ArrayXd x(30000);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x(i) = afe::dequantize(a.sample_voltages(zero, SimTime::from_ms(i)).eeg[0], cfg);
    }
    const double expected = mode == afe::AfeMode::LOW_POWER ? 0.94e-6 : 0.47e-6;
    CHECK(dsp::integrated_rms_noise(x, 1000.0) == doctest::Approx(expected).epsilon(0.1));
  }
}

TEST_CASE("PPG quantizer") {
  afe::PpgConfig cfg;
  cfg.enabled = true;
  bool sat = true;
  CHECK(afe::ppg_quantize(0.0, cfg, &sat) == 128);
  CHECK_FALSE(sat);
  CHECK(afe::ppg_quantize(1.0, cfg, &sat) == afe::kPpgCodeMax);
  CHECK_FALSE(sat);
  CHECK(afe::ppg_quantize(1.2, cfg, &sat) == afe::kPpgCodeMax);
  CHECK(sat);
  CHECK(afe::ppg_quantize(-1.0, cfg, &sat) == 0);
  CHECK(sat);
  const auto code = afe::ppg_quantize(0.4, cfg);
  CHECK(afe::ppg_dequantize(code, cfg) == doctest::Approx(0.4).epsilon(1e-5));
}

TEST_CASE("PPG configuration") {
  afe::PpgConfig cfg;
  CHECK(cfg.supply_current_ma() == 0.0);
  cfg.enabled = true;
  CHECK(cfg.led_count() == 2);
  CHECK(cfg.supply_current_ma() == doctest::Approx(1.15));
  cfg.rate = 10;
  CHECK(cfg.supply_current_ma() == doctest::Approx(0.48));
  cfg.rate = 50;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.rate = 100;
  cfg.red = cfg.ir = false;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("PPG sample staggers the IR conversion by half a period") {
  synth::AnalogTrace red;
  red.sample_rate = 1000.0;
  red.kind = synth::TraceKind::PPG_RED;
  red.values = Eigen::ArrayXd::LinSpaced(1000, 0.0, 0.999);
  synth::AnalogTrace ir = red;
  ir.kind = synth::TraceKind::PPG_IR;
  afe::PpgConfig cfg;
  cfg.enabled = true;
  const auto s = afe::ppg_sample(red, ir, cfg, SimTime::from_ms(100));
  REQUIRE(s.codes.size() == 2);
  CHECK(afe::ppg_dequantize(s.codes[0], cfg) == doctest::Approx(0.100).epsilon(1e-4));
  CHECK(afe::ppg_dequantize(s.codes[1], cfg) == doctest::Approx(0.105).epsilon(1e-4));
}

TEST_CASE("AFE power table is monotone and accepts overrides") {
  afe::AfePowerTable t;
  const int rates[] = {250, 500, 1000, 2000, 4000};
  for (auto mode : {afe::AfeMode::HIGH_RESOLUTION, afe::AfeMode::LOW_POWER}) {
    for (int ch = 0; ch < 8; ++ch) {
      for (int r : rates) CHECK(t.lookup(ch + 1, r, mode) >= t.lookup(ch, r, mode));
    }
    for (int i = 1; i < 5; ++i) CHECK(t.lookup(8, rates[i], mode) >= t.lookup(8, rates[i - 1], mode));
  }
  CHECK(t.lookup(8, 1000, afe::AfeMode::LOW_POWER) < t.lookup(8, 1000, afe::AfeMode::HIGH_RESOLUTION));
  CHECK(t.lookup(8, 1000, afe::AfeMode::HIGH_RESOLUTION) == doctest::Approx(6.4));

  std::istringstream is("# overrides\n8 1000 HR = 5.5\n4 250 LP = 0.9\n");
  const auto p = afe::AfePowerTable::parse(is);
  CHECK(p.override_count() == 2);
  CHECK(p.lookup(8, 1000, afe::AfeMode::HIGH_RESOLUTION) == 5.5);
  std::istringstream bad("8 1000 HR 5.5\n");
  CHECK_THROWS_WITH_AS(afe::AfePowerTable::parse(bad), doctest::Contains("line 1"), ParameterError);
}

TEST_CASE("IMU double-tap schedule") {
  const auto w = afe::imu_double_tap({SimTime::from_ms(5), SimTime::from_ms(9)});
  REQUIRE(w.size() == 2);
  CHECK(w[1].time == SimTime::from_ms(9));
  CHECK_THROWS_AS(afe::imu_double_tap({SimTime::from_ms(9), SimTime::from_ms(5)}), ParameterError);
}

TEST_CASE("electrode impedance check") {
  afe::ImpedanceModel m;
  m.ohms[2] = 80e3;
  CHECK(m.check(0, 8).good);
  CHECK_FALSE(m.check(2, 8).good);
  CHECK(m.check(2, 8).ohms == 80e3);
  CHECK_THROWS_AS(m.check(5, 4), ParameterError);
}
