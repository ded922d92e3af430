#pragma once

#include <cstddef>
#include <optional>

#include "tunefp/matrix.hpp"
#include "tunefp/spectral.hpp"

namespace tunefp {

inline constexpr std::size_t kMidiPitches = 128;
inline constexpr std::size_t kChromaClasses = 12;

/// Equal-tempered A440 pitch of an STFT bin; nullopt for DC and for pitches
/// outside the MIDI range.
std::optional<int> bin_to_midi(std::size_t bin, std::size_t frame_size, int sample_rate);

struct PitchSpectrogram {
  Matrix values;  // [frame][midi pitch], 128 columns
};

struct ChromaMatrix {
  Matrix values;  // [frame][pitch class], 12 columns, C = 0
};

PitchSpectrogram log_freq_spectrogram(const Spectrogram& spec);
ChromaMatrix chromagram(const PitchSpectrogram& pitch);

}  // namespace tunefp
