#include "wearsim/synth/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wearsim/dsp/fft.hpp"

namespace wearsim::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Random-phase noise with power spectrum `shape(f)`, normalised to zero mean
// and unit variance over the returned n samples.
template <typename Shape>
Eigen::ArrayXd shaped_noise(Eigen::Index n, double fs, Shape shape, std::mt19937_64& rng) {
  if (n == 0) return Eigen::ArrayXd();
  const Eigen::Index m = std::max<Eigen::Index>(dsp::next_power_of_two(n), 4);
  dsp::RealFft<double> plan(m);
  std::normal_distribution<double> normal;
  dsp::ComplexArray<double> bins(m / 2 + 1);
  bins(0) = 0.0;
  for (Eigen::Index k = 1; k <= m / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(m);
    const double amp = std::sqrt(std::max(shape(f), 0.0));
    const double re = normal(rng);
    const double im = (k == m / 2) ? 0.0 : normal(rng);
    bins(k) = std::complex<double>(re, im) * amp;
  }
  Eigen::ArrayXd x = plan.inverse(bins).head(n);
  x -= x.mean();
  const double sd = std::sqrt(x.square().mean());
  if (sd > 0.0) x /= sd;
  return x;
}

Eigen::ArrayXd white_noise(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::ArrayXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
  if (n > 1) {
    x -= x.mean();
    const double sd = std::sqrt(x.square().mean());
    if (sd > 0.0) x /= sd;
  }
  return x;
}

void check_rate_duration(double duration_s, double fs) {
  require(fs > 0.0 && std::isfinite(fs), "sample rate must be positive");
  require(duration_s >= 0.0 && std::isfinite(duration_s), "duration must be non-negative");
}

}  // namespace

std::mt19937_64 random_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x51ed270b27aULL)));
}

Eigen::ArrayXd background_noise(Eigen::Index n, double fs, const BackgroundModel& model, std::mt19937_64& rng) {
  require(model.white_fraction >= 0.0 && model.white_fraction <= 1.0, "white_fraction must lie in [0, 1]");
  require(model.corner_hz > 0.0, "corner frequency must be positive");
  if (n == 0) return Eigen::ArrayXd();
  const Eigen::ArrayXd pink = shaped_noise(
      n, fs, [&](double f) { return std::pow(std::max(f, model.corner_hz), -model.exponent); }, rng);
  const Eigen::ArrayXd white = white_noise(n, rng);
  Eigen::ArrayXd x = std::sqrt(1.0 - model.white_fraction) * pink + std::sqrt(model.white_fraction) * white;
  x -= x.mean();
  return x;
}

double epoch_peak_to_peak(const Eigen::ArrayXd& values, double fs) {
  if (values.size() == 0) return 0.0;
  const auto epoch = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(fs)));
  if (values.size() < epoch) return values.maxCoeff() - values.minCoeff();
  const Eigen::Index count = values.size() / epoch;
  double sum = 0.0;
  for (Eigen::Index e = 0; e < count; ++e) {
    const auto seg = values.segment(e * epoch, epoch);
    sum += seg.maxCoeff() - seg.minCoeff();
  }
  return sum / static_cast<double>(count);
}

AnalogTrace gen_alpha_eeg(EyeState state, double duration_s, double fs, std::uint64_t seed,
                          const AlphaParams& params) {
  require(fs >= 250.0, "alpha EEG requires fs >= 250 Hz");
  check_rate_duration(duration_s, fs);
  AnalogTrace t;
  t.sample_rate = fs;
  t.kind = TraceKind::EEG;
  const Eigen::Index n = sample_count(duration_s, fs);
  if (n == 0) return t;

  auto bg_rng = random_stream(seed, 1);
  Eigen::ArrayXd bg = background_noise(n, fs, params.background, bg_rng);
  const double bg_pp = epoch_peak_to_peak(bg, fs);
  if (bg_pp > 0.0) bg *= params.open_vpp / bg_pp;
  if (state == EyeState::EYES_OPEN) {
    t.values = bg;
    return t;
  }

  auto alpha_rng = random_stream(seed, 2);
  const double sigma = params.bandwidth_hz;
  const Eigen::ArrayXd rhythm = shaped_noise(
      n, fs, [&](double f) { return std::exp(-0.5 * (f - params.center_hz) * (f - params.center_hz) / (sigma * sigma)); },
      alpha_rng);

  // Bisection on the rhythm gain until the epoch amplitude hits the target.
  auto amplitude = [&](double g) { return epoch_peak_to_peak(bg + g * rhythm, fs); };
  double lo = 0.0;
  double hi = params.closed_vpp;
  while (amplitude(hi) < params.closed_vpp && hi < 1.0) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (amplitude(mid) < params.closed_vpp ? lo : hi) = mid;
  }
  t.values = bg + 0.5 * (lo + hi) * rhythm;
  return t;
}

std::vector<double> SsvepStimulus::presentation_order() const {
  std::vector<double> order;
  for (int r = 0; r < repetitions; ++r) order.insert(order.end(), frequencies.begin(), frequencies.end());
  auto rng = random_stream(order_seed, 7);
  // Fisher-Yates with explicit modulo draws so the order is the same on every standard library.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

AnalogTrace SsvepSession::concatenated() const {
  AnalogTrace out;
  if (segments.empty()) return out;
  out.sample_rate = segments.front().trace.sample_rate;
  out.kind = segments.front().trace.kind;
  Eigen::Index total = 0;
  for (const auto& s : segments) total += s.trace.size();
  out.values.resize(total);
  Eigen::Index pos = 0;
  for (const auto& s : segments) {
    out.values.segment(pos, s.trace.size()) = s.trace.values;
    pos += s.trace.size();
  }
  return out;
}

std::size_t SsvepSession::trial_count() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const SsvepSegment& s) { return s.is_trial(); }));
}

SsvepSession gen_ssvep_session(const SsvepStimulus& stimulus, double fs, double snr_db, std::uint64_t seed,
                               const SsvepParams& params) {
  require(fs >= 250.0, "SSVEP session requires fs >= 250 Hz");
  require(stimulus.trial_s > 0.0 && stimulus.rest_s > 0.0, "trial and rest durations must be positive");
  require(stimulus.repetitions > 0, "repetitions must be positive");
  for (double f : stimulus.frequencies) require(f > 0.0, "stimulation frequency must be positive");

  SsvepSession session;
  session.low_snr_warning = snr_db < -20.0;
  const double bg_power = params.background_rms * params.background_rms;
  const double signal_power = bg_power * std::pow(10.0, snr_db / 10.0);

  double start = 0.0;
  std::uint64_t segment_index = 0;
  auto make_background = [&](double duration) {
    auto rng = random_stream(seed, 100 + 2 * segment_index);
    return Eigen::ArrayXd(background_noise(sample_count(duration, fs), fs, params.background, rng) *
                          params.background_rms);
  };

  for (double f : stimulus.presentation_order()) {
    SsvepSegment trial;
    trial.label_hz = f;
    trial.start_s = start;
    trial.trace.sample_rate = fs;
    trial.trace.values = make_background(stimulus.trial_s);

    double weight = 0.0;
    for (int h = 0; h < 3; ++h) {
      if (f * (h + 1) < fs / 2.0) weight += std::pow(params.harmonic_decay, 2 * h);
    }
    const double a0 = std::sqrt(2.0 * signal_power / weight);
    auto phase_rng = random_stream(seed, 101 + 2 * segment_index);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int h = 0; h < 3; ++h) {
      const double fh = f * (h + 1);
      const double p = phase(phase_rng);
      if (fh >= fs / 2.0) continue;
      const double a = a0 * std::pow(params.harmonic_decay, h);
      for (Eigen::Index i = 0; i < trial.trace.size(); ++i) {
        trial.trace.values(i) += a * std::sin(2.0 * std::numbers::pi * fh * static_cast<double>(i) / fs + p);
      }
    }
    start += trial.trace.duration();
    ++segment_index;
    session.segments.push_back(std::move(trial));

    SsvepSegment rest;
    rest.start_s = start;
    rest.trace.sample_rate = fs;
    rest.trace.values = make_background(stimulus.rest_s);
    start += rest.trace.duration();
    ++segment_index;
    session.segments.push_back(std::move(rest));
  }
  return session;
}

AnalogTrace gen_ppg(double heart_rate_bpm, double duration_s, double fs, PpgLed led, std::uint64_t seed,
                    const PpgParams& params) {
  require(heart_rate_bpm >= 30.0 && heart_rate_bpm <= 220.0, "heart rate must lie in [30, 220] bpm");
  check_rate_duration(duration_s, fs);
  AnalogTrace t;
  t.sample_rate = fs;
  t.kind = led == PpgLed::RED ? TraceKind::PPG_RED : TraceKind::PPG_IR;
  const Eigen::Index n = sample_count(duration_s, fs);
  if (n == 0) return t;

  const double dc = led == PpgLed::RED ? params.red_dc : params.red_dc * params.ir_to_red_dc;
  const double period = 60.0 / heart_rate_bpm;

  // Beat schedule shared by both LEDs (same seed, same heart).
  auto beat_rng = random_stream(seed, 11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> onsets{-unit(beat_rng) * period};
  while (onsets.back() < duration_s) {
    const double jitter = std::clamp(params.beat_jitter * normal(beat_rng), -0.2, 0.2);
    onsets.push_back(onsets.back() + period * (1.0 + jitter));
  }

  auto pulse = [](double phase) {
    auto bump = [](double x, double mu, double sd) { return std::exp(-0.5 * (x - mu) * (x - mu) / (sd * sd)); };
    return bump(phase, 0.25, 0.07) + 0.35 * bump(phase, 0.55, 0.08);
  };

  auto wander_rng = random_stream(seed, 12 + (led == PpgLed::IR ? 1 : 0));
  const double wander_phase = unit(wander_rng) * 2.0 * std::numbers::pi;
  auto noise_rng = random_stream(seed, 14 + (led == PpgLed::IR ? 1 : 0));

  Eigen::ArrayXd ac(n);
  std::size_t beat = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) / fs;
    while (beat + 1 < onsets.size() && onsets[beat + 1] <= time) ++beat;
    const double phase = (time - onsets[beat]) / (onsets[beat + 1] - onsets[beat]);
    ac(i) = dc * params.pulse_fraction * pulse(phase) +
            dc * params.wander_fraction * std::sin(2.0 * std::numbers::pi * params.wander_hz * time + wander_phase) +
            dc * params.noise_fraction * normal(noise_rng);
  }
  ac -= ac.mean();
  t.values = ac + dc;
  return t;
}

AnalogTrace gen_background_eeg(double duration_s, double fs, double rms, std::uint64_t seed,
                               const BackgroundModel& model) {
  check_rate_duration(duration_s, fs);
  AnalogTrace t;
  t.sample_rate = fs;
  auto rng = random_stream(seed, 21);
  t.values = background_noise(sample_count(duration_s, fs), fs, model, rng) * rms;
  return t;
}

}  // namespace wearsim::synth
