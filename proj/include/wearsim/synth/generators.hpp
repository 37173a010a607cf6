#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wearsim/synth/trace.hpp"

namespace wearsim::synth {

/// Independent, reproducible random stream `stream` derived from `seed`.
std::mt19937_64 random_stream(std::uint64_t seed, std::uint64_t stream);

/// Background EEG: 1/f^exponent noise flattened below corner_hz, plus white
/// noise carrying `white_fraction` of the variance.
struct BackgroundModel {
  double exponent = 1.0;
  double white_fraction = 0.2;
  double corner_hz = 0.5;
};

/// Zero-mean, unit-variance background noise of n samples.
Eigen::ArrayXd background_noise(Eigen::Index n, double fs, const BackgroundModel& model, std::mt19937_64& rng);

/// Mean of per-second peak-to-peak amplitudes (the whole trace when shorter
/// than one second). This is the amplitude the alpha generator targets.
double epoch_peak_to_peak(const Eigen::ArrayXd& values, double fs);

enum class EyeState { EYES_OPEN, EYES_CLOSED };

struct AlphaParams {
  double center_hz = 10.0;
  double bandwidth_hz = 0.8;  // Gaussian spectral std of the rhythm
  double open_vpp = 13e-6;
  double closed_vpp = 37e-6;
  BackgroundModel background;
};

/// Resting EEG with or without the alpha rhythm. The background is scaled
/// to open_vpp; with eyes closed a narrowband rhythm at center_hz is added
/// on top of the same background with its gain solved to reach closed_vpp.
AnalogTrace gen_alpha_eeg(EyeState state, double duration_s, double fs, std::uint64_t seed,
                          const AlphaParams& params = {});

struct SsvepStimulus {
  std::vector<double> frequencies{1.0, 3.125, 7.8125, 10.6125};
  double trial_s = 25.0;
  double rest_s = 10.0;
  int repetitions = 3;
  std::uint64_t order_seed = 0;

  /// Randomised presentation order; each frequency appears `repetitions` times.
  std::vector<double> presentation_order() const;
};

struct SsvepParams {
  double harmonic_decay = 0.5;
  double background_rms = 5e-6;
  BackgroundModel background;
};

struct SsvepSegment {
  AnalogTrace trace;
  double label_hz = 0.0;  // 0 marks a rest segment
  double start_s = 0.0;

  bool is_trial() const { return label_hz > 0.0; }
};

struct SsvepSession {
  std::vector<SsvepSegment> segments;
  /// Set when snr_db < -20: classification is not expected to succeed.
  bool low_snr_warning = false;

  AnalogTrace concatenated() const;
  std::size_t trial_count() const;
};

/// Stimulation session: each trial is followed by a rest. Trials carry the
/// stimulus and its 2nd/3rd harmonics (amplitude ratio harmonic_decay per
/// step) at `snr_db` relative to the background variance.
SsvepSession gen_ssvep_session(const SsvepStimulus& stimulus, double fs, double snr_db, std::uint64_t seed,
                               const SsvepParams& params = {});

enum class PpgLed { RED, IR };

struct PpgParams {
  double red_dc = 0.40;
  double ir_to_red_dc = 1.5;
  double pulse_fraction = 0.02;   // pulse amplitude relative to DC
  double wander_fraction = 0.01;  // baseline wander amplitude relative to DC
  double wander_hz = 0.2;
  double noise_fraction = 0.0005;
  double beat_jitter = 0.01;      // relative std of beat-to-beat period
};

/// Finger PPG: a two-Gaussian pulse per beat (systolic peak and dicrotic
/// wave, separated by the notch) on a DC level with slow wander and noise.
AnalogTrace gen_ppg(double heart_rate_bpm, double duration_s, double fs, PpgLed led, std::uint64_t seed,
                    const PpgParams& params = {});

/// Background-only EEG at a given RMS.
AnalogTrace gen_background_eeg(double duration_s, double fs, double rms, std::uint64_t seed,
                               const BackgroundModel& model = {});

}  // namespace wearsim::synth
