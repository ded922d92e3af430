#include "tunefp/timbre.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tunefp/error.hpp"

namespace tunefp {

double hz_to_mel(double hz) {
  if (!(hz >= 0.0)) throw Error(ErrorKind::DomainError, "negative frequency " + std::to_string(hz));
  return 1127.0 * std::log1p(hz / 700.0);
}

double mel_to_hz(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

MelFilterBank build_mel_filterbank(std::size_t num_filters, std::size_t frame_size, int sample_rate) {
  if (num_filters == 0) throw Error(ErrorKind::DomainError, "need at least one mel filter");
  if (sample_rate <= 0) throw Error(ErrorKind::DomainError, "sample rate must be positive");
  StftConfig{frame_size, frame_size, WindowKind::Hann}.validate();

  const std::size_t bins = frame_size / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  const std::size_t points = num_filters + 2;

  MelFilterBank bank;
  bank.weights = Matrix(num_filters, bins);
  bank.boundary_mels.resize(points);
  std::vector<double> edges(points);  // fractional bin positions
  for (std::size_t i = 0; i < points; ++i) {
    bank.boundary_mels[i] = mel_max * static_cast<double>(i) / static_cast<double>(points - 1);
    edges[i] = mel_to_hz(bank.boundary_mels[i]) * static_cast<double>(frame_size) / sample_rate;
  }

  bank.center_freqs.resize(num_filters);
  for (std::size_t m = 0; m < num_filters; ++m) {
    const double lower = edges[m];
    const double center = edges[m + 1];
    const double upper = edges[m + 2];
    bank.center_freqs[m] = center * sample_rate / static_cast<double>(frame_size);
    for (std::size_t k = 0; k < bins; ++k) {
      const double x = static_cast<double>(k);
      double w = 0.0;
      if (x > lower && x <= center) {
        w = (x - lower) / (center - lower);
      } else if (x > center && x < upper) {
        w = (upper - x) / (upper - center);
      }
      bank.weights(m, k) = w;
    }
  }
  return bank;
}

MelSpectrogram mel_energies(const Spectrogram& spec, const MelFilterBank& bank) {
  if (spec.bins() != bank.bins()) {
    throw Error(ErrorKind::ShapeError, "spectrogram has " + std::to_string(spec.bins()) +
                                           " bins, filterbank expects " + std::to_string(bank.bins()));
  }
  MelSpectrogram out{Matrix(spec.frames(), bank.num_filters())};
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    const auto frame = spec.power.row(f);
    for (std::size_t m = 0; m < bank.num_filters(); ++m) {
      const auto w = bank.weights.row(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < frame.size(); ++k) acc += frame[k] * w[k];
      out.values(f, m) = acc;
    }
  }
  return out;
}

MfccMatrix mfcc(const MelSpectrogram& mel, std::size_t n_coeffs) {
  const std::size_t filters = mel.values.cols();
  if (n_coeffs > filters) {
    throw Error(ErrorKind::DomainError, std::to_string(n_coeffs) + " coefficients requested from " +
                                            std::to_string(filters) + " filters");
  }

  Matrix basis(n_coeffs, filters);
  for (std::size_t n = 0; n < n_coeffs; ++n) {
    for (std::size_t m = 0; m < filters; ++m) {
      basis(n, m) = std::cos(std::numbers::pi * static_cast<double>(n) *
                             (static_cast<double>(m) + 0.5) / static_cast<double>(filters));
    }
  }

  MfccMatrix out{Matrix(mel.values.rows(), n_coeffs)};
  std::vector<double> log_energy(filters);
  for (std::size_t f = 0; f < mel.values.rows(); ++f) {
    const auto frame = mel.values.row(f);
    for (std::size_t m = 0; m < filters; ++m) log_energy[m] = std::log(frame[m] + kLogFloor);
    for (std::size_t n = 0; n < n_coeffs; ++n) {
      const auto b = basis.row(n);
      double acc = 0.0;
      for (std::size_t m = 0; m < filters; ++m) acc += log_energy[m] * b[m];
      out.values(f, n) = acc;
    }
  }
  return out;
}

}  // namespace tunefp
