#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tunefp/audio_io.hpp"
#include "tunefp/matrix.hpp"

namespace tunefp {

enum class WindowKind { Hann, Rectangular };

struct StftConfig {
  std::size_t frame_size = 2048;
  std::size_t hop = 512;
  WindowKind window = WindowKind::Hann;

  std::size_t bins() const { return frame_size / 2 + 1; }
  /// Throws DomainError unless frame_size is a power of two >= 2 and 0 < hop <= frame_size.
  void validate() const;
};

/// Periodic hann, w(n) = 0.5 (1 - cos(2 pi n / N)), or all ones.
std::vector<double> make_window(WindowKind kind, std::size_t length);

/// Real-input forward DFT of a fixed power-of-two size, bins 0..size/2.
/// One instance per thread; instances are independent.
class Fft {
 public:
  explicit Fft(std::size_t size);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return size_; }
  void forward(std::span<const double> input, std::span<std::complex<double>> output);

 private:
  struct Plan;
  std::size_t size_;
  std::unique_ptr<Plan> plan_;
};

struct ComplexSpectrum {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> values;  // [frame][bin]
  std::vector<double> frame_times;           // m * hop / sample_rate
  int sample_rate = 0;
  StftConfig config;

  std::complex<double> at(std::size_t frame, std::size_t bin) const {
    return values[frame * bins + bin];
  }
};

/// Power spectrogram, [frame][bin], bins = frame_size / 2 + 1.
struct Spectrogram {
  Matrix power;
  std::vector<double> frame_times;
  int sample_rate = 0;
  StftConfig config;

  std::size_t frames() const { return power.rows(); }
  std::size_t bins() const { return power.cols(); }
};

/// Number of frames fully inside a signal of the given length (no padding).
std::size_t frame_count(std::size_t signal_length, const StftConfig& cfg);

ComplexSpectrum stft(const AudioClip& signal, const StftConfig& cfg);
Spectrogram power_spectrogram(const ComplexSpectrum& spec);

}  // namespace tunefp
