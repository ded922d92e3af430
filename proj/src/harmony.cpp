#include "tunefp/harmony.hpp"

#include <cmath>
#include <vector>

namespace tunefp {

std::optional<int> bin_to_midi(std::size_t bin, std::size_t frame_size, int sample_rate) {
  if (bin == 0) return std::nullopt;
  const double hz = static_cast<double>(bin) * sample_rate / static_cast<double>(frame_size);
  const double pitch = std::round(69.0 + 12.0 * std::log2(hz / 440.0));
  if (pitch < 0.0 || pitch > 127.0) return std::nullopt;
  return static_cast<int>(pitch);
}

PitchSpectrogram log_freq_spectrogram(const Spectrogram& spec) {
  std::vector<int> pitch_of(spec.bins(), -1);
  for (std::size_t k = 0; k < spec.bins(); ++k) {
    if (auto p = bin_to_midi(k, spec.config.frame_size, spec.sample_rate)) pitch_of[k] = *p;
  }

  PitchSpectrogram out{Matrix(spec.frames(), kMidiPitches)};
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    const auto frame = spec.power.row(f);
    auto dst = out.values.row(f);
    for (std::size_t k = 0; k < frame.size(); ++k) {
      if (pitch_of[k] >= 0) dst[static_cast<std::size_t>(pitch_of[k])] += frame[k];
    }
  }
  return out;
}

ChromaMatrix chromagram(const PitchSpectrogram& pitch) {
  ChromaMatrix out{Matrix(pitch.values.rows(), kChromaClasses)};
  for (std::size_t f = 0; f < pitch.values.rows(); ++f) {
    const auto src = pitch.values.row(f);
    auto dst = out.values.row(f);
    for (std::size_t p = 0; p < src.size(); ++p) dst[p % kChromaClasses] += src[p];
  }
  return out;
}

}  // namespace tunefp
