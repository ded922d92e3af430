#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tunefp/spectral.hpp"
#include "tunefp/timbre.hpp"

namespace tunefp {

/// Half-wave-rectified log-mel spectral flux, one value per pair of
/// consecutive STFT frames. Index i compares frame i + 1 against frame i and
/// is stamped at time_offset_s + i / frame_rate.
struct OnsetEnvelope {
  std::vector<double> values;
  double frame_rate = 0.0;
  double time_offset_s = 0.0;

  double time_of(std::size_t index) const {
    return time_offset_s + static_cast<double>(index) / frame_rate;
  }
};

/// Envelope timing for a given STFT framing: frame_rate = sr / hop, and index
/// i is stamped where frame i + 1's newest hop of samples begins, i.e.
/// i * hop + frame_size samples into the signal.
struct EnvelopeTiming {
  double frame_rate;
  double time_offset_s;
};
EnvelopeTiming envelope_timing(const StftConfig& cfg, int sample_rate);

OnsetEnvelope onset_envelope(const MelSpectrogram& mel, EnvelopeTiming timing);

struct TempoEstimate {
  double bpm = 0.0;
  double period_frames = 0.0;  // ideal beat spacing in envelope frames
};

struct BpmRange {
  double min_bpm = 30.0;
  double max_bpm = 240.0;

  bool operator==(const BpmRange&) const = default;
};

/// Picks the autocorrelation peak of the mean-removed envelope within the
/// lag range implied by bpm_range, refined to a fractional lag.
TempoEstimate estimate_tempo(const OnsetEnvelope& env, BpmRange range = {});

struct BeatSequence {
  std::vector<std::size_t> beat_frames;  // strictly increasing envelope indices
  std::vector<double> beat_times;        // seconds, via OnsetEnvelope::time_of
  double tempo_bpm = 0.0;
};

inline constexpr double kDefaultBeatAlpha = 680.0;

/// Interval penalty -(log(delta / period))^2; zero at delta == period.
double interval_penalty(double delta, double period);

/// Dynamic-programming beat tracker over the unit-std normalized envelope.
/// Predecessors of frame t are searched in [t - 2 period, t - period / 2];
/// the chain ends at the first argmax of the cumulative score.
BeatSequence track_beats(const OnsetEnvelope& env, double period_frames,
                         double alpha = kDefaultBeatAlpha);

inline constexpr std::size_t kTempoBlockSize = 12;

/// [tempo_bpm, beat_count, mean_ibi, std_ibi, min_ibi, max_ibi, median_ibi,
///  onset_mean, onset_std, onset_max, beat_strength_mean, beat_strength_std]
using TempoBlock = std::array<double, kTempoBlockSize>;

TempoBlock tempo_block(const BeatSequence& beats, const OnsetEnvelope& env);

}  // namespace tunefp
