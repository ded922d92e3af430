#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tunefp {

/// Mono signal normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Decoded audio before mixdown; all channels have equal length.
struct MultiChannelClip {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Decodes a RIFF/WAVE byte stream: 16/24-bit integer PCM or 32-bit float,
/// including WAVE_FORMAT_EXTENSIBLE wrappers of those. Integer PCM is
/// normalized by 2^(bits-1).
MultiChannelClip decode_wav(std::span<const std::uint8_t> bytes);
MultiChannelClip decode_wav_file(const std::filesystem::path& path);

/// 16-bit PCM WAVE encoding, used for fixtures and synthetic corpora.
std::vector<std::uint8_t> encode_wav16(const MultiChannelClip& clip);
std::vector<std::uint8_t> encode_wav16(const AudioClip& clip);
void write_wav16_file(const std::filesystem::path& path, const AudioClip& clip);

AudioClip to_mono(const MultiChannelClip& clip);

/// Linear-interpolation resampler; output length is round(len * target / source).
AudioClip resample(const AudioClip& clip, int target_rate);

/// Cuts round(dur_s * rate) samples starting at start_s. When the clip ends
/// inside the window the window slides left to the last position that fits.
AudioClip extract_segment(const AudioClip& clip, double start_s, double dur_s);

}  // namespace tunefp
