#pragma once

#include <cstddef>
#include <vector>

#include "tunefp/matrix.hpp"
#include "tunefp/spectral.hpp"

namespace tunefp {

inline constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters equally spaced on the mel scale from 0 to sr/2.
struct MelFilterBank {
  Matrix weights;                    // [filter][bin]
  std::vector<double> center_freqs;  // Hz
  std::vector<double> boundary_mels; // num_filters + 2 points

  std::size_t num_filters() const { return weights.rows(); }
  std::size_t bins() const { return weights.cols(); }
};

MelFilterBank build_mel_filterbank(std::size_t num_filters, std::size_t frame_size, int sample_rate);

/// [frame][filter] filterbank energies.
struct MelSpectrogram {
  Matrix values;
};

/// [frame][coefficient] cepstra.
struct MfccMatrix {
  Matrix values;
};

MelSpectrogram mel_energies(const Spectrogram& spec, const MelFilterBank& bank);

/// DCT-II of log(S + 1e-10) per frame, keeping the first n_coeffs terms.
MfccMatrix mfcc(const MelSpectrogram& mel, std::size_t n_coeffs = 13);

}  // namespace tunefp
