#include "tunefp/rhythm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tunefp/error.hpp"

namespace tunefp {

namespace {

// A divisor lag must keep this fraction of the peak autocorrelation.
constexpr double kSubharmonicRatio = 0.8;

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

EnvelopeTiming envelope_timing(const StftConfig& cfg, int sample_rate) {
  return {static_cast<double>(sample_rate) / static_cast<double>(cfg.hop),
          static_cast<double>(cfg.frame_size) / sample_rate};
}

OnsetEnvelope onset_envelope(const MelSpectrogram& mel, EnvelopeTiming timing) {
  const std::size_t frames = mel.values.rows();
  if (frames < 2) {
    throw Error(ErrorKind::InsufficientAudio, "onset envelope needs at least 2 frames, got " +
                                                  std::to_string(frames));
  }
  OnsetEnvelope env{std::vector<double>(frames - 1), timing.frame_rate, timing.time_offset_s};
  for (std::size_t n = 1; n < frames; ++n) {
    const auto cur = mel.values.row(n);
    const auto prev = mel.values.row(n - 1);
    double flux = 0.0;
    for (std::size_t m = 0; m < cur.size(); ++m) {
      flux += std::max(0.0, std::log(cur[m] + kLogFloor) - std::log(prev[m] + kLogFloor));
    }
    env.values[n - 1] = flux;
  }
  return env;
}

TempoEstimate estimate_tempo(const OnsetEnvelope& env, BpmRange range) {
  if (!(range.min_bpm > 0.0) || !(range.max_bpm > range.min_bpm)) {
    throw Error(ErrorKind::DomainError, "bpm range must satisfy 0 < min < max");
  }
  const auto& raw = env.values;
  if (std::none_of(raw.begin(), raw.end(), [](double v) { return v != 0.0; })) {
    throw Error(ErrorKind::NoOnsets, "onset envelope is all zero");
  }

  const double mu = mean_of(raw);
  std::vector<double> centered(raw.size());
  std::transform(raw.begin(), raw.end(), centered.begin(), [mu](double v) { return v - mu; });

  const std::size_t n = centered.size();
  const auto lag_min = std::max<std::ptrdiff_t>(
      1, static_cast<std::ptrdiff_t>(std::floor(60.0 * env.frame_rate / range.max_bpm)));
  const auto lag_max = std::min<std::ptrdiff_t>(
      static_cast<std::ptrdiff_t>(n) - 2,
      static_cast<std::ptrdiff_t>(std::ceil(60.0 * env.frame_rate / range.min_bpm)));
  if (lag_min > lag_max) {
    throw Error(ErrorKind::InsufficientAudio, "envelope of " + std::to_string(n) +
                                                  " frames is too short for the bpm range");
  }

  // Biased autocorrelation for lags 0..lag_max + 1; the (n - lag) taper
  // favours the shortest period among equally strong harmonics.
  std::vector<double> ac(static_cast<std::size_t>(lag_max) + 2, 0.0);
  for (std::size_t lag = 0; lag < ac.size(); ++lag) {
    for (std::size_t t = 0; t + lag < n; ++t) ac[lag] += centered[t] * centered[t + lag];
  }
  // A fractional period splits each peak over two neighbouring lags, so lags
  // are scored by the 3-lag sum around them.
  auto strength = [&](std::ptrdiff_t lag) {
    const auto l = static_cast<std::size_t>(lag);
    return ac[l - 1] + ac[l] + ac[l + 1];
  };
  auto strongest = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    std::ptrdiff_t arg = lo;
    for (std::ptrdiff_t lag = lo + 1; lag <= hi; ++lag) {
      if (strength(lag) > strength(arg)) arg = lag;
    }
    return arg;
  };

  std::ptrdiff_t best_lag = strongest(lag_min, lag_max);
  const double best = strength(best_lag);
  if (!(best > 0.0)) throw Error(ErrorKind::NoOnsets, "no periodicity in onset envelope");

  // Spikes can line up better at a multiple of the period than at the period
  // itself, making the global peak a sub-harmonic. Take the shortest divisor
  // of the peak lag that keeps most of its strength.
  for (int m = 4; m >= 2; --m) {
    const double guess = static_cast<double>(best_lag) / m;
    const auto lo = std::max<std::ptrdiff_t>(lag_min, static_cast<std::ptrdiff_t>(std::floor(guess - 1.0)));
    const auto hi = std::min<std::ptrdiff_t>(lag_max, static_cast<std::ptrdiff_t>(std::ceil(guess + 1.0)));
    if (lo > hi) continue;
    const auto candidate = strongest(lo, hi);
    if (strength(candidate) >= kSubharmonicRatio * best) {
      best_lag = candidate;
      break;
    }
  }

  // Centroid of the positive correlation around the peak.
  double weight = 0.0;
  double moment = 0.0;
  for (std::ptrdiff_t lag = best_lag - 1; lag <= best_lag + 1; ++lag) {
    const double w = std::max(0.0, ac[static_cast<std::size_t>(lag)]);
    weight += w;
    moment += w * static_cast<double>(lag);
  }
  double period = weight > 0.0 ? moment / weight : static_cast<double>(best_lag);
  period = std::clamp(period, 60.0 * env.frame_rate / range.max_bpm,
                      60.0 * env.frame_rate / range.min_bpm);
  return {60.0 * env.frame_rate / period, period};
}

double interval_penalty(double delta, double period) {
  const double r = std::log(delta / period);
  return -r * r;
}

BeatSequence track_beats(const OnsetEnvelope& env, double period_frames, double alpha) {
  if (env.values.empty()) throw Error(ErrorKind::NoOnsets, "empty onset envelope");
  if (!(period_frames >= 1.0)) {
    throw Error(ErrorKind::DomainError, "beat period must be at least one frame");
  }

  const std::size_t n = env.values.size();
  std::vector<double> onset = env.values;
  if (const double sd = population_std(onset); sd > 0.0) {
    for (double& v : onset) v /= sd;
  }

  std::vector<double> score(n);
  std::vector<std::ptrdiff_t> backlink(n, -1);
  for (std::size_t t = 0; t < n; ++t) {
    const double tt = static_cast<double>(t);
    const auto hi = static_cast<std::ptrdiff_t>(std::floor(tt - period_frames / 2.0));
    const auto lo = std::max<std::ptrdiff_t>(
        0, static_cast<std::ptrdiff_t>(std::ceil(tt - 2.0 * period_frames)));
    score[t] = onset[t];
    if (hi < lo) continue;

    double best = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t best_prev = -1;
    for (std::ptrdiff_t prev = lo; prev <= hi; ++prev) {
      const double candidate =
          alpha * interval_penalty(tt - static_cast<double>(prev), period_frames) +
          score[static_cast<std::size_t>(prev)];
      if (candidate > best) {
        best = candidate;
        best_prev = prev;
      }
    }
    score[t] += best;
    backlink[t] = best_prev;
  }

  auto end = static_cast<std::ptrdiff_t>(std::max_element(score.begin(), score.end()) - score.begin());
  BeatSequence beats;
  for (std::ptrdiff_t t = end; t >= 0; t = backlink[static_cast<std::size_t>(t)]) {
    beats.beat_frames.push_back(static_cast<std::size_t>(t));
  }
  std::reverse(beats.beat_frames.begin(), beats.beat_frames.end());
  beats.beat_times.reserve(beats.beat_frames.size());
  for (auto f : beats.beat_frames) beats.beat_times.push_back(env.time_of(f));
  beats.tempo_bpm = 60.0 * env.frame_rate / period_frames;
  return beats;
}

TempoBlock tempo_block(const BeatSequence& beats, const OnsetEnvelope& env) {
  TempoBlock block{};
  if (beats.beat_frames.empty()) return block;

  block[0] = beats.tempo_bpm;
  block[1] = static_cast<double>(beats.beat_frames.size());

  if (beats.beat_times.size() >= 2) {
    std::vector<double> ibi;
    ibi.reserve(beats.beat_times.size() - 1);
    for (std::size_t i = 1; i < beats.beat_times.size(); ++i) {
      ibi.push_back(beats.beat_times[i] - beats.beat_times[i - 1]);
    }
    block[2] = mean_of(ibi);
    block[3] = population_std(ibi);
    block[4] = *std::min_element(ibi.begin(), ibi.end());
    block[5] = *std::max_element(ibi.begin(), ibi.end());
    block[6] = median_of(ibi);
  }

  if (!env.values.empty()) {
    block[7] = mean_of(env.values);
    block[8] = population_std(env.values);
    block[9] = *std::max_element(env.values.begin(), env.values.end());
  }

  std::vector<double> strength;
  strength.reserve(beats.beat_frames.size());
  for (auto f : beats.beat_frames) {
    if (f < env.values.size()) strength.push_back(env.values[f]);
  }
  block[10] = mean_of(strength);
  block[11] = population_std(strength);
  return block;
}

}  // namespace tunefp
