#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tunefp/matrix.hpp"
#include "tunefp/rhythm.hpp"

namespace tunefp {

// Fingerprint layout: spectrogram means | MFCC means | chroma means | tempo block.
inline constexpr std::size_t kSpectrumMeans = 1025;
inline constexpr std::size_t kMfccMeans = 13;
inline constexpr std::size_t kChromaMeans = 12;
inline constexpr std::size_t kFingerprintSize =
    kSpectrumMeans + kMfccMeans + kChromaMeans + kTempoBlockSize;
static_assert(kFingerprintSize == 1062);

inline constexpr std::size_t kMfccOffset = kSpectrumMeans;
inline constexpr std::size_t kChromaOffset = kMfccOffset + kMfccMeans;
inline constexpr std::size_t kTempoOffset = kChromaOffset + kChromaMeans;

struct Fingerprint {
  std::string track_id;
  std::vector<double> values;
};

struct ReducedFingerprint {
  std::string track_id;
  std::vector<double> values;
};

/// Per-column mean over all frames of a [frame][feature] matrix.
std::vector<double> row_means(const Matrix& frames);

Fingerprint assemble_fingerprint(std::string track_id, std::span<const double> spectrum_means,
                                 std::span<const double> mfcc_means,
                                 std::span<const double> chroma_means, const TempoBlock& tempo);

/// Column-wise z-scores with population statistics.
struct Standardization {
  Matrix data;
  std::vector<double> mean;
  std::vector<double> scale;
};

inline constexpr double kDegenerateStd = 1e-12;

/// Columns whose std falls below 1e-12 get scale 1 and standardize to 0.
Standardization standardize(const Matrix& corpus);

struct PcaModel {
  std::vector<double> mean;
  std::vector<double> scale;
  Matrix components;  // [n_components][dim], orthonormal rows
  std::vector<double> explained_variance;        // retained components
  std::vector<double> explained_variance_ratio;  // retained components, descending
  std::vector<double> full_variance_ratio;       // every non-null component of the fit
  double variance_target = 0.95;
  std::size_t n_components = 0;

  std::size_t dim() const { return mean.size(); }
};

/// Centers each column, then eigendecomposes the population covariance,
/// going through the n x n Gram matrix when there are fewer rows than
/// columns. Each component's largest-magnitude entry is made positive. The
/// returned model has scale 1 and the column means as its mean.
PcaModel fit_pca(const Matrix& data, double variance_target = 0.95);

/// PCA on a standardized corpus; the model maps raw fingerprints directly.
PcaModel fit_pca(const Standardization& standardized, double variance_target = 0.95);

/// components * ((values - mean) / scale)
std::vector<double> project(const PcaModel& model, std::span<const double> values);
ReducedFingerprint project(const PcaModel& model, const Fingerprint& fp);

/// Smallest k whose cumulative ratio reaches the target (1e-12 slack).
std::size_t components_for_variance(std::span<const double> ratios, double variance_target);

}  // namespace tunefp
