#include "tunefp/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "tunefp/error.hpp"

namespace tunefp {

void StftConfig::validate() const {
  if (frame_size < 2 || !std::has_single_bit(frame_size)) {
    throw Error(ErrorKind::DomainError,
                "frame size " + std::to_string(frame_size) + " is not a power of two >= 2");
  }
  if (hop == 0 || hop > frame_size) {
    throw Error(ErrorKind::DomainError, "hop must satisfy 0 < hop <= frame size");
  }
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
  if (length < 2) throw Error(ErrorKind::DomainError, "window length must be >= 2");
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::Hann) {
    const double n_total = static_cast<double>(length);
    for (std::size_t n = 0; n < length; ++n) {
      w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / n_total));
    }
  }
  return w;
}

namespace {

// Planning in FFTW is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft::Plan {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
};

Fft::Fft(std::size_t size) : size_(size), plan_(std::make_unique<Plan>()) {
  if (size == 0 || !std::has_single_bit(size)) {
    throw Error(ErrorKind::DomainError, "FFT size must be a power of two");
  }
  std::lock_guard lock(planner_mutex());
  plan_->in = fftw_alloc_real(size);
  plan_->out = fftw_alloc_complex(size / 2 + 1);
  plan_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(size), plan_->in, plan_->out, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_->plan);
  fftw_free(plan_->in);
  fftw_free(plan_->out);
}

void Fft::forward(std::span<const double> input, std::span<std::complex<double>> output) {
  std::copy_n(input.begin(), size_, plan_->in);
  fftw_execute(plan_->plan);
  for (std::size_t k = 0; k <= size_ / 2; ++k) output[k] = {plan_->out[k][0], plan_->out[k][1]};
}

std::size_t frame_count(std::size_t signal_length, const StftConfig& cfg) {
  if (signal_length < cfg.frame_size) return 0;
  return (signal_length - cfg.frame_size) / cfg.hop + 1;
}

ComplexSpectrum stft(const AudioClip& signal, const StftConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.frame_size;
  if (signal.samples.size() < n) {
    throw Error(ErrorKind::InsufficientAudio, "signal has " + std::to_string(signal.samples.size()) +
                                                  " samples, frame size is " + std::to_string(n));
  }

  ComplexSpectrum out;
  out.frames = frame_count(signal.samples.size(), cfg);
  out.bins = cfg.bins();
  out.sample_rate = signal.sample_rate;
  out.config = cfg;
  out.values.resize(out.frames * out.bins);
  out.frame_times.resize(out.frames);

  Fft fft(n);
  const auto window = make_window(cfg.window, n);
  std::vector<double> frame(n);
  for (std::size_t m = 0; m < out.frames; ++m) {
    const std::size_t offset = m * cfg.hop;
    for (std::size_t i = 0; i < n; ++i) frame[i] = signal.samples[offset + i] * window[i];
    fft.forward(frame, std::span(out.values).subspan(m * out.bins, out.bins));
    out.frame_times[m] = static_cast<double>(offset) / signal.sample_rate;
  }
  return out;
}

Spectrogram power_spectrogram(const ComplexSpectrum& spec) {
  Spectrogram out;
  out.power = Matrix(spec.frames, spec.bins);
  out.frame_times = spec.frame_times;
  out.sample_rate = spec.sample_rate;
  out.config = spec.config;
  auto dst = out.power.data();
  for (std::size_t i = 0; i < spec.values.size(); ++i) dst[i] = std::norm(spec.values[i]);
  return out;
}

}  // namespace tunefp
