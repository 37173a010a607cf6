#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wearsim/dsp/spectral.hpp"
#include "wearsim/host/session_log.hpp"

namespace wearsim::host {

/// Uniformly resampled channel from logged samples of one configuration.
/// Samples missing from the log (lost packets) are filled by holding the
/// previous value and counted in `filled`.
struct ChannelSeries {
  Eigen::ArrayXd values;
  double fs = 0.0;
  SimTime start;
  std::uint8_t config_id = 0;
  std::size_t filled = 0;

  double time_of(Eigen::Index i) const { return start.seconds() + static_cast<double>(i) / fs; }
};

/// EEG channel in volts. Uses the configuration of the first sample record
/// unless `config_id` is given.
ChannelSeries eeg_series(const SessionLog& log, int channel, std::optional<std::uint8_t> config_id = std::nullopt);

/// PPG LED (0 = first enabled LED) as normalised reflectance, fresh
/// conversions only.
ChannelSeries ppg_series(const SessionLog& log, int led = 0, std::optional<std::uint8_t> config_id = std::nullopt);

struct AlphaReport {
  double band_lo = 8.0;
  double band_hi = 12.0;
  double open_band_power = 0.0;
  double closed_band_power = 0.0;
  double ratio = 0.0;
  dsp::PowerSpectrum open_psd;
  dsp::PowerSpectrum closed_psd;
  dsp::SpectrogramGrid spectrogram;
  Eigen::ArrayXd band_track;  // alpha band power per spectrogram row
  double threshold = 0.0;     // geometric mean of the open and closed medians
  std::optional<double> transition_s;
  double expected_transition_s = 0.0;
};

/// Alpha band power of an eyes-open and an eyes-closed epoch, plus the
/// spectrogram (1024-point window, 768 overlap at 1 kSPS, scaled with fs)
/// and the first spectrogram time after which the band power stays above
/// the threshold.
AlphaReport analyze_alpha(const ChannelSeries& x, double open_start_s, double open_end_s, double closed_start_s,
                          double closed_end_s);
/// Uses the eyes_open / eyes_closed marks of the log.
AlphaReport analyze_alpha(const SessionLog& log, int channel = 0);

struct TrialResult {
  double start_s = 0.0;
  double end_s = 0.0;
  double label_hz = 0.0;
  double predicted_hz = 0.0;
  std::size_t windows = 0;
  Eigen::ArrayXd stim_power;
  bool correct() const { return windows > 0 && predicted_hz == label_hz; }
};

struct SsvepReport {
  std::vector<double> stim_freqs;
  std::vector<TrialResult> trials;
  std::string source;  // "edge" or "host"

  std::size_t correct() const;
  double accuracy() const { return trials.empty() ? 0.0 : static_cast<double>(correct()) / trials.size(); }
};

/// Per-trial classification. Bin powers of every window lying wholly
/// inside a trial are summed over windows and channels; the argmax
/// stimulus is the prediction. Edge bin records are used when present,
/// otherwise the host repeats the device computation on logged samples.
SsvepReport classify_trials(const SessionLog& log);

struct PpgReport {
  std::vector<double> beats_s;
  std::vector<double> intervals_s;
  double mean_interval_s = 0.0;
  double heart_rate_bpm = 0.0;
};

PpgReport analyze_ppg(const ChannelSeries& x, double mean_window_s = 1.0, double gauss_window_s = 0.1,
                      double min_distance_s = 0.33);
PpgReport analyze_ppg(const SessionLog& log, int led = 0);

void write_alpha_report(std::ostream& os, const AlphaReport& r);
void write_ssvep_report(std::ostream& os, const SsvepReport& r);
void write_ppg_report(std::ostream& os, const PpgReport& r);

}  // namespace wearsim::host
