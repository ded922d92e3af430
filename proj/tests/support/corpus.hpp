#pragma once

// Three synthetic "genres" for end-to-end recommendation tests:
//   tonal  - harmonic tones (3 partials) stepping on a ~90 BPM click grid
//   noise  - band-passed noise bursts at ~150 BPM
//   chords - slow sustained triads, no percussion
// Each track gets its own detuning, tempo jitter, gain and background noise.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "support/synth.hpp"
#include "tunefp/audio_io.hpp"

namespace tunefp::testing {

enum class Genre { Tonal, Noise, Chords };

inline std::string genre_name(Genre g) {
  switch (g) {
    case Genre::Tonal: return "tonal";
    case Genre::Noise: return "noise";
    case Genre::Chords: return "chords";
  }
  return "unknown";
}

inline double midi_hz(double pitch) { return 440.0 * std::pow(2.0, (pitch - 69.0) / 12.0); }

inline void add_partials(std::vector<double>& out, std::size_t start, std::size_t length, double hz,
                         double amp, int sr, std::size_t fade) {
  const std::array<double, 3> weights{1.0, 0.5, 0.25};
  for (std::size_t i = 0; i < length && start + i < out.size(); ++i) {
    double env = 1.0;
    if (i < fade) env = static_cast<double>(i) / static_cast<double>(fade);
    if (length - i < fade) env = std::min(env, static_cast<double>(length - i) / static_cast<double>(fade));
    const double t = static_cast<double>(start + i) / sr;
    double v = 0.0;
    for (std::size_t h = 0; h < weights.size(); ++h) {
      v += weights[h] * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(h + 1) * t);
    }
    out[start + i] += amp * env * v;
  }
}

inline AudioClip make_genre_track(Genre genre, std::uint64_t seed, int sr = 22050, double seconds = 130.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto jitter = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
  std::vector<double> x(n, 0.0);
  const double detune = jitter(-0.3, 0.3);  // semitones
  const double gain = jitter(0.8, 1.0);

  switch (genre) {
    case Genre::Tonal: {
      const double bpm = jitter(87.0, 93.0);
      const auto beat = static_cast<std::size_t>(60.0 / bpm * sr);
      const std::array<double, 4> steps{57.0, 60.0, 64.0, 62.0};
      std::size_t k = 0;
      for (std::size_t start = 0; start < n; start += beat, ++k) {
        add_partials(x, start, beat, midi_hz(steps[k % steps.size()] + detune), 0.25, sr, sr / 100);
        for (std::size_t i = 0; i < static_cast<std::size_t>(0.005 * sr) && start + i < n; ++i) {
          x[start + i] += 0.5 * std::exp(-static_cast<double>(i) / (0.001 * sr)) * ((i % 2) ? -1.0 : 1.0);
        }
      }
      break;
    }
    case Genre::Noise: {
      const double bpm = jitter(146.0, 154.0);
      const auto beat = static_cast<std::size_t>(60.0 / bpm * sr);
      const auto burst = static_cast<std::size_t>(0.08 * sr);
      std::normal_distribution<double> gauss(0.0, 1.0);
      // Two-pole resonator around 2-3 kHz.
      const double centre = jitter(2000.0, 3000.0);
      const double r = 0.97;
      const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * centre / sr);
      const double a2 = -r * r;
      double y1 = 0.0, y2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t phase = i % beat;
        const double env = phase < burst ? std::exp(-static_cast<double>(phase) / (0.02 * sr)) : 0.0;
        const double y = 0.05 * env * gauss(rng) + a1 * y1 + a2 * y2;
        y2 = y1;
        y1 = y;
        x[i] += y;
      }
      break;
    }
    case Genre::Chords: {
      const auto chord_len = static_cast<std::size_t>(jitter(3.5, 4.5) * sr);
      const std::array<std::array<double, 3>, 4> chords{{{48, 52, 55}, {53, 57, 60}, {55, 59, 62}, {45, 48, 52}}};
      std::size_t k = static_cast<std::size_t>(unit(rng) * 4.0);
      for (std::size_t start = 0; start < n; start += chord_len, ++k) {
        for (double pitch : chords[k % chords.size()]) {
          add_partials(x, start, chord_len, midi_hz(pitch + detune), 0.12, sr, sr / 2);
        }
      }
      break;
    }
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  for (double& v : x) v *= gain * 0.7 / peak;
  add_noise_snr(x, jitter(25.0, 35.0), rng);
  for (double& v : x) v = std::clamp(v, -1.0, 1.0);
  return AudioClip{std::move(x), sr};
}

struct CorpusTrack {
  std::string track_id;
  Genre genre;
  std::filesystem::path file;
};

/// Writes per_genre WAVs for each genre plus a tags.csv catalog into dir.
inline std::vector<CorpusTrack> write_genre_corpus(const std::filesystem::path& dir, int per_genre,
                                                   std::uint64_t seed, double seconds = 130.0) {
  std::filesystem::create_directories(dir);
  std::vector<CorpusTrack> tracks;
  std::ofstream tags(dir / "tags.csv");
  tags << "track_id,path,genres\n";
  std::uint64_t k = 0;
  for (Genre g : {Genre::Tonal, Genre::Noise, Genre::Chords}) {
    for (int i = 0; i < per_genre; ++i, ++k) {
      const std::string id = genre_name(g) + "_" + std::to_string(i);
      const auto file = dir / (id + ".wav");
      write_wav16_file(file, make_genre_track(g, seed * 1000 + k, 22050, seconds));
      tags << id << ',' << file.filename().string() << ',' << genre_name(g) << '\n';
      tracks.push_back({id, g, file});
    }
  }
  return tracks;
}

}  // namespace tunefp::testing
