#include "wearsim/host/analysis.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <ostream>

#include "wearsim/afe/ppg_sensor.hpp"
#include "wearsim/dsp/ppg.hpp"
#include "wearsim/dsp/ssvep.hpp"

namespace wearsim::host {

namespace {

template <typename Pick>
ChannelSeries build_series(const SessionLog& log, std::uint8_t cid, double fs, Pick pick) {
  ChannelSeries s;
  s.fs = fs;
  s.config_id = cid;
  std::vector<std::pair<Eigen::Index, double>> points;
  for (const auto& rec : log.samples) {
    if (rec.config_id != cid) continue;
    const std::optional<double> v = pick(rec);
    if (!v) continue;
    if (points.empty()) s.start = rec.time;
    const auto idx = static_cast<Eigen::Index>(std::llround((rec.time - s.start).seconds() * fs));
    if (!points.empty() && idx <= points.back().first) continue;
    points.emplace_back(idx, *v);
  }
  if (points.empty()) throw ParameterError("session log has no samples for the requested channel");
  s.values.resize(points.back().first + 1);
  Eigen::Index next = 0;
  for (const auto& [idx, v] : points) {
    for (; next < idx; ++next) {
      s.values(next) = next > 0 ? s.values(next - 1) : v;
      ++s.filled;
    }
    s.values(next++) = v;
  }
  return s;
}

std::uint8_t pick_config(const SessionLog& log, std::optional<std::uint8_t> id) {
  if (id) return *id;
  if (log.samples.empty()) throw ParameterError("session log has no samples");
  return log.samples.front().config_id;
}

std::optional<double> numeric_label(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || v <= 0.0) return std::nullopt;
  return v;
}

const MarkRecord* find_mark(const SessionLog& log, const std::string& label) {
  for (const auto& m : log.marks) {
    if (m.label == label) return &m;
  }
  return nullptr;
}

Eigen::ArrayXd slice(const ChannelSeries& x, double from_s, double to_s) {
  const auto a = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((from_s - x.start.seconds()) * x.fs - 1e-9)));
  const auto b = std::min<Eigen::Index>(x.values.size(), static_cast<Eigen::Index>(std::floor((to_s - x.start.seconds()) * x.fs + 1e-9)));
  require(b > a, "epoch lies outside the logged samples");
  return x.values.segment(a, b - a);
}

}  // namespace

ChannelSeries eeg_series(const SessionLog& log, int channel, std::optional<std::uint8_t> config_id) {
  const std::uint8_t cid = pick_config(log, config_id);
  const device::DeviceConfig& cfg = log.config(cid);
  require(channel >= 0 && channel < cfg.eeg_channels, "EEG channel not active in this configuration");
  const afe::ExgAfeConfig afe_cfg = cfg.afe_config();
  return build_series(log, cid, cfg.fs, [&](const SampleRecord& r) -> std::optional<double> {
    return afe::dequantize(r.eeg.at(static_cast<std::size_t>(channel)), afe_cfg);
  });
}

ChannelSeries ppg_series(const SessionLog& log, int led, std::optional<std::uint8_t> config_id) {
  const std::uint8_t cid = pick_config(log, config_id);
  const device::DeviceConfig& cfg = log.config(cid);
  require(cfg.ppg.enabled && led >= 0 && led < cfg.ppg.led_count(), "PPG LED not active in this configuration");
  return build_series(log, cid, cfg.ppg.rate, [&](const SampleRecord& r) -> std::optional<double> {
    if (!r.ppg_fresh || r.ppg.size() <= static_cast<std::size_t>(led)) return std::nullopt;
    return afe::ppg_dequantize(r.ppg[static_cast<std::size_t>(led)], cfg.ppg);
  });
}

AlphaReport analyze_alpha(const ChannelSeries& x, double open_start_s, double open_end_s, double closed_start_s,
                          double closed_end_s) {
  AlphaReport r;
  const Eigen::Index n = dsp::next_power_of_two(static_cast<Eigen::Index>(std::llround(x.fs)));
  const Eigen::ArrayXd open = slice(x, open_start_s, open_end_s);
  const Eigen::ArrayXd closed = slice(x, closed_start_s, closed_end_s);
  r.open_psd = dsp::psd(open, x.fs, n, n / 2);
  r.closed_psd = dsp::psd(closed, x.fs, n, n / 2);
  r.open_band_power = r.open_psd.band_power(r.band_lo, r.band_hi);
  r.closed_band_power = r.closed_psd.band_power(r.band_lo, r.band_hi);
  r.ratio = r.closed_band_power / r.open_band_power;

  r.spectrogram = dsp::spectrogram(x.values, x.fs, n, 3 * n / 4);
  const auto& g = r.spectrogram;
  r.band_track.resize(g.power.rows());
  std::vector<double> open_rows;
  std::vector<double> closed_rows;
  const double half = static_cast<double>(n) / 2.0 / x.fs;
  for (Eigen::Index row = 0; row < g.power.rows(); ++row) {
    r.band_track(row) = g.band_power(row, r.band_lo, r.band_hi);
    const double t = x.start.seconds() + g.time(row);
    if (t - half >= open_start_s && t + half <= open_end_s) open_rows.push_back(r.band_track(row));
    if (t - half >= closed_start_s && t + half <= closed_end_s) closed_rows.push_back(r.band_track(row));
  }
  r.expected_transition_s = closed_start_s;
  if (open_rows.empty() || closed_rows.empty()) return r;
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  r.threshold = std::sqrt(median(open_rows) * median(closed_rows));
  Eigen::Index last = -1;
  for (Eigen::Index row = 0; row < g.power.rows(); ++row) {
    if (x.start.seconds() + g.time(row) + half <= closed_end_s) last = row;
  }
  Eigen::Index first = last;
  while (first >= 0 && r.band_track(first) > r.threshold) --first;
  if (first < last) r.transition_s = x.start.seconds() + g.time(first + 1);
  return r;
}

AlphaReport analyze_alpha(const SessionLog& log, int channel) {
  const MarkRecord* open = find_mark(log, "eyes_open");
  const MarkRecord* closed = find_mark(log, "eyes_closed");
  require(open && closed, "session log has no eyes_open / eyes_closed marks");
  const ChannelSeries x = eeg_series(log, channel);
  return analyze_alpha(x, open->start.seconds(), open->end.seconds(), closed->start.seconds(), closed->end.seconds());
}

std::size_t SsvepReport::correct() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return t.correct(); }));
}

SsvepReport classify_trials(const SessionLog& log) {
  SsvepReport rep;
  bool have_bins = false;
  for (const auto& b : log.bins) {
    if (b.harmonics.empty()) {
      throw ParameterError("summary payload carries no per-frequency powers; use payload BINS_12FP");
    }
    have_bins = true;
  }
  const std::uint8_t cid = have_bins ? log.bins.front().config_id : pick_config(log, std::nullopt);
  const device::DeviceConfig& cfg = log.config(cid);
  rep.stim_freqs = cfg.stim_freqs;
  rep.source = have_bins ? "edge" : "host";
  const Eigen::Index n = cfg.fft_size();
  const double span = static_cast<double>(n - 1) / cfg.fs;

  std::vector<ChannelSeries> series;
  if (!have_bins) {
    for (int c = 0; c < cfg.eeg_channels; ++c) series.push_back(eeg_series(log, c, cid));
  }

  for (const auto& m : log.marks) {
    const auto label = numeric_label(m.label);
    if (!label) continue;
    TrialResult t;
    t.start_s = m.start.seconds();
    t.end_s = m.end.seconds();
    t.label_hz = *label;
    Eigen::ArrayXXd total = Eigen::ArrayXXd::Zero(static_cast<Eigen::Index>(cfg.stim_freqs.size()), dsp::kHarmonics);
    if (have_bins) {
      for (const auto& b : log.bins) {
        if (b.config_id != cid) continue;
        const double last = b.time.seconds();
        if (last - span < t.start_s || last + 1e-3 > t.end_s) continue;
        for (const auto& ch : unflatten_harmonics(b, cfg)) total += ch.harmonic_power;
        ++t.windows;
      }
    } else if (!series.empty()) {
      const Eigen::ArrayXd taper = dsp::hann<double>(n);
      const ChannelSeries& ref = series.front();
      const auto first = static_cast<Eigen::Index>(std::ceil((t.start_s - ref.start.seconds()) * ref.fs - 1e-9));
      const Eigen::Index hop = cfg.hop_samples();
      for (Eigen::Index s = std::max<Eigen::Index>(first, 0); s + n <= ref.values.size(); s += hop) {
        if (ref.time_of(s + n - 1) >= t.end_s) break;
        for (const auto& ch : series) {
          const Eigen::ArrayXd w = ch.values.segment(s, n) * taper;
          total += dsp::ssvep_bin_power(dsp::rfft(w, ref.fs), cfg.stim_freqs).harmonic_power;
        }
        ++t.windows;
      }
    }
    const auto combined = dsp::ChannelBinPowers::from_harmonics(cfg.stim_freqs, total);
    t.stim_power = combined.stim_power;
    if (t.windows > 0) t.predicted_hz = dsp::classify_ssvep(combined);
    rep.trials.push_back(std::move(t));
  }
  return rep;
}

PpgReport analyze_ppg(const ChannelSeries& x, double mean_window_s, double gauss_window_s, double min_distance_s) {
  PpgReport r;
  const Eigen::ArrayXd filtered = dsp::ppg_filter(x.values, x.fs, mean_window_s, gauss_window_s);
  for (double t : dsp::detect_peaks(filtered, x.fs, min_distance_s, 0.0)) r.beats_s.push_back(x.start.seconds() + t);
  r.intervals_s = dsp::intervals(r.beats_s);
  if (!r.intervals_s.empty()) {
    for (double d : r.intervals_s) r.mean_interval_s += d;
    r.mean_interval_s /= static_cast<double>(r.intervals_s.size());
    r.heart_rate_bpm = 60.0 / r.mean_interval_s;
  }
  return r;
}

PpgReport analyze_ppg(const SessionLog& log, int led) { return analyze_ppg(ppg_series(log, led)); }

void write_alpha_report(std::ostream& os, const AlphaReport& r) {
  os << std::setprecision(10) << "metric,value\n";
  os << "band_lo_hz," << r.band_lo << '\n' << "band_hi_hz," << r.band_hi << '\n';
  os << "open_band_power_v2," << r.open_band_power << '\n' << "closed_band_power_v2," << r.closed_band_power << '\n';
  os << "ratio," << r.ratio << '\n' << "threshold_v2," << r.threshold << '\n';
  os << "transition_s,";
  if (r.transition_s) os << *r.transition_s;
  os << '\n' << "expected_transition_s," << r.expected_transition_s << '\n';
}

void write_ssvep_report(std::ostream& os, const SsvepReport& r) {
  os << std::setprecision(10) << "trial,start_s,end_s,label_hz,predicted_hz,windows,correct";
  for (double f : r.stim_freqs) os << ",power_" << f;
  os << '\n';
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const TrialResult& t = r.trials[i];
    os << i + 1 << ',' << t.start_s << ',' << t.end_s << ',' << t.label_hz << ',' << t.predicted_hz << ','
       << t.windows << ',' << (t.correct() ? 1 : 0);
    for (Eigen::Index k = 0; k < t.stim_power.size(); ++k) os << ',' << t.stim_power(k);
    os << '\n';
  }
}

void write_ppg_report(std::ostream& os, const PpgReport& r) {
  os << std::setprecision(10) << "beat,time_s,interval_s\n";
  for (std::size_t i = 0; i < r.beats_s.size(); ++i) {
    os << i + 1 << ',' << r.beats_s[i] << ',';
    if (i > 0) os << r.intervals_s[i - 1];
    os << '\n';
  }
}

}  // namespace wearsim::host
