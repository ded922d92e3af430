#include "tunefp/fingerprint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "tunefp/error.hpp"

namespace tunefp {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Eigenvalues this far below the largest are treated as null directions.
constexpr double kRankTolerance = 1e-10;

void check_length(std::string_view block, std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw Error(ErrorKind::ShapeError, std::string(block) + " block: expected " +
                                           std::to_string(expected) + " values, got " +
                                           std::to_string(actual));
  }
}

}  // namespace

std::vector<double> row_means(const Matrix& frames) {
  if (frames.rows() == 0) throw Error(ErrorKind::ShapeError, "cannot average zero frames");
  std::vector<double> means(frames.cols(), 0.0);
  for (std::size_t r = 0; r < frames.rows(); ++r) {
    const auto row = frames.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) means[c] += row[c];
  }
  const auto n = static_cast<double>(frames.rows());
  for (double& m : means) m /= n;
  return means;
}

Fingerprint assemble_fingerprint(std::string track_id, std::span<const double> spectrum_means,
                                 std::span<const double> mfcc_means,
                                 std::span<const double> chroma_means, const TempoBlock& tempo) {
  check_length("spectrogram", kSpectrumMeans, spectrum_means.size());
  check_length("mfcc", kMfccMeans, mfcc_means.size());
  check_length("chroma", kChromaMeans, chroma_means.size());

  Fingerprint fp{std::move(track_id), {}};
  fp.values.reserve(kFingerprintSize);
  fp.values.insert(fp.values.end(), spectrum_means.begin(), spectrum_means.end());
  fp.values.insert(fp.values.end(), mfcc_means.begin(), mfcc_means.end());
  fp.values.insert(fp.values.end(), chroma_means.begin(), chroma_means.end());
  fp.values.insert(fp.values.end(), tempo.begin(), tempo.end());
  return fp;
}

Standardization standardize(const Matrix& corpus) {
  const std::size_t n = corpus.rows();
  const std::size_t d = corpus.cols();
  if (n < 2) {
    throw Error(ErrorKind::InsufficientData,
                "standardization needs at least 2 tracks, got " + std::to_string(n));
  }

  Standardization out{Matrix(n, d), row_means(corpus), std::vector<double>(d, 1.0)};
  for (std::size_t c = 0; c < d; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = corpus(r, c) - out.mean[c];
      acc += dev * dev;
    }
    const double sd = std::sqrt(acc / static_cast<double>(n));
    const bool degenerate = sd < kDegenerateStd;
    if (!degenerate) out.scale[c] = sd;
    for (std::size_t r = 0; r < n; ++r) {
      out.data(r, c) = degenerate ? 0.0 : (corpus(r, c) - out.mean[c]) / sd;
    }
  }
  return out;
}

std::size_t components_for_variance(std::span<const double> ratios, double variance_target) {
  double cumulative = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    cumulative += ratios[k];
    if (cumulative >= variance_target - 1e-12) return k + 1;
  }
  return ratios.size();
}

PcaModel fit_pca(const Matrix& data, double variance_target) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (n < 2) {
    throw Error(ErrorKind::InsufficientData, "PCA needs at least 2 rows, got " + std::to_string(n));
  }
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw Error(ErrorKind::DomainError, "variance target must lie in (0, 1]");
  }

  PcaModel model;
  model.mean = row_means(data);
  model.scale.assign(d, 1.0);
  model.variance_target = variance_target;

  RowMajor centered(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      centered(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          data(r, c) - model.mean[c];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double total_variance = centered.squaredNorm() * inv_n;
  if (!(total_variance > 0.0)) {
    throw Error(ErrorKind::InsufficientData, "corpus has zero variance");
  }

  // Columns of `directions` are unit eigenvectors in feature space, descending.
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd directions;
  if (n < d) {
    const Eigen::MatrixXd gram = centered * centered.transpose() * inv_n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::InsufficientData, "eigendecomposition did not converge");
    }
    eigenvalues = solver.eigenvalues().reverse();
    directions = centered.transpose() * solver.eigenvectors().rowwise().reverse();
  } else {
    const Eigen::MatrixXd cov = centered.transpose() * centered * inv_n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::InsufficientData, "eigendecomposition did not converge");
    }
    eigenvalues = solver.eigenvalues().reverse();
    directions = solver.eigenvectors().rowwise().reverse();
  }

  const double largest = eigenvalues(0);
  Eigen::Index rank = 0;
  while (rank < eigenvalues.size() && eigenvalues(rank) > largest * kRankTolerance) ++rank;

  // Gram-route vectors are X^T u; modified Gram-Schmidt both normalizes them
  // and removes the round-off coupling between nearly equal eigenvalues.
  for (Eigen::Index i = 0; i < rank; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      directions.col(i) -= directions.col(j).dot(directions.col(i)) * directions.col(j);
    }
    directions.col(i).normalize();
    Eigen::Index peak = 0;
    directions.col(i).cwiseAbs().maxCoeff(&peak);
    if (directions(peak, i) < 0.0) directions.col(i) = -directions.col(i);
  }

  model.full_variance_ratio.resize(static_cast<std::size_t>(rank));
  for (Eigen::Index i = 0; i < rank; ++i) {
    model.full_variance_ratio[static_cast<std::size_t>(i)] = eigenvalues(i) / total_variance;
  }
  model.n_components = components_for_variance(model.full_variance_ratio, variance_target);

  model.components = Matrix(model.n_components, d);
  for (std::size_t k = 0; k < model.n_components; ++k) {
    for (std::size_t c = 0; c < d; ++c) {
      model.components(k, c) =
          directions(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k));
    }
    model.explained_variance.push_back(eigenvalues(static_cast<Eigen::Index>(k)));
    model.explained_variance_ratio.push_back(model.full_variance_ratio[k]);
  }
  return model;
}

PcaModel fit_pca(const Standardization& standardized, double variance_target) {
  PcaModel model = fit_pca(standardized.data, variance_target);
  // (x - m) / s - mu == (x - (m + s * mu)) / s
  for (std::size_t c = 0; c < model.dim(); ++c) {
    model.mean[c] = standardized.mean[c] + standardized.scale[c] * model.mean[c];
  }
  model.scale = standardized.scale;
  return model;
}

std::vector<double> project(const PcaModel& model, std::span<const double> values) {
  if (values.size() != model.dim()) {
    throw Error(ErrorKind::ShapeError, "expected " + std::to_string(model.dim()) +
                                           " values, got " + std::to_string(values.size()));
  }
  std::vector<double> scaled(values.size());
  for (std::size_t c = 0; c < values.size(); ++c) {
    scaled[c] = (values[c] - model.mean[c]) / model.scale[c];
  }
  std::vector<double> out(model.n_components, 0.0);
  for (std::size_t k = 0; k < model.n_components; ++k) {
    const auto comp = model.components.row(k);
    double acc = 0.0;
    for (std::size_t c = 0; c < scaled.size(); ++c) acc += comp[c] * scaled[c];
    out[k] = acc;
  }
  return out;
}

ReducedFingerprint project(const PcaModel& model, const Fingerprint& fp) {
  return {fp.track_id, project(model, fp.values)};
}

}  // namespace tunefp
