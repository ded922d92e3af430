#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "tunefp/audio_io.hpp"
#include "tunefp/fingerprint.hpp"
#include "tunefp/harmony.hpp"
#include "tunefp/rhythm.hpp"
#include "tunefp/spectral.hpp"
#include "tunefp/timbre.hpp"

namespace tunefp {

struct PipelineConfig {
  int sample_rate = 22050;
  std::size_t frame_size = 2048;
  std::size_t hop = 512;
  WindowKind window = WindowKind::Hann;
  std::size_t n_mels = 26;
  std::size_t n_mfcc = 13;
  double segment_start_s = 60.0;
  double segment_dur_s = 60.0;
  double variance_target = 0.95;
  std::size_t k = 3;
  double alpha = kDefaultBeatAlpha;
  BpmRange bpm_range{};

  StftConfig stft() const { return {frame_size, hop, window}; }
  bool operator==(const PipelineConfig&) const = default;
};

/// Every intermediate of one track's analysis, kept for inspection.
struct TrackFeatures {
  Spectrogram spectrogram;
  MelSpectrogram mel;
  MfccMatrix mfcc;
  PitchSpectrogram pitch;
  ChromaMatrix chroma;
  OnsetEnvelope onset;
  BeatSequence beats;
  TempoBlock tempo{};
};

/// Mono mixdown, resampling to the analysis rate, and segment extraction.
AudioClip prepare_clip(const MultiChannelClip& decoded, const PipelineConfig& cfg);

/// Features of an already prepared segment. A track with no usable onsets
/// gets no beats and an all-zero tempo block.
TrackFeatures analyze_segment(const AudioClip& segment, const PipelineConfig& cfg);

Fingerprint fingerprint_features(std::string track_id, const TrackFeatures& features);

Fingerprint fingerprint_file(const std::filesystem::path& path, std::string track_id,
                             const PipelineConfig& cfg);

}  // namespace tunefp
