#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tunefp/index_store.hpp"
#include "tunefp/pipeline.hpp"
#include "tunefp/recommender.hpp"

// Library side of the command-line subcommands. Data goes to `out`,
// diagnostics to `diag`; failures surface as tunefp::Error.
namespace tunefp::commands {

struct ScanOptions {
  std::filesystem::path input_dir;
  std::optional<std::filesystem::path> tags;
  std::filesystem::path out;
  PipelineConfig config;
  unsigned jobs = 1;
};

struct ScanReport {
  std::size_t written = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // track_id, message
};

/// Fingerprints every tagged track (or every .wav in the directory when no
/// tags are given) and writes the index sorted by track_id. Per-track
/// failures are reported and skipped; EmptyCorpus when nothing succeeds.
ScanReport scan(const ScanOptions& opts, std::ostream& diag);

struct BuildOptions {
  std::filesystem::path index;
  std::filesystem::path out;
  PipelineConfig config;  // variance_target drives the component count
  std::optional<std::filesystem::path> variance_curve;
};

ModelFile build(const BuildOptions& opts, std::ostream& out);

/// Writes `rank,track_id,distance,genres` lines, one per neighbour.
RecommendationSet recommend(const std::filesystem::path& model, const std::string& track_id,
                            std::optional<std::size_t> k, std::ostream& out);

GenreAccuracy evaluate(const std::filesystem::path& model, std::optional<std::size_t> k,
                       std::ostream& out);

enum class Feature { Spectrogram, Mfcc, Chroma, Onset, Beats, Fingerprint };
Feature parse_feature(const std::string& name);

/// Dumps one intermediate feature of a track as CSV.
void inspect(const std::filesystem::path& track, Feature feature, const PipelineConfig& config,
             std::ostream& out);

/// Helpers shared by build/evaluate and the tests.
DistanceMatrix model_distances(const ModelFile& model);
std::vector<TrackTags> model_tags(const ModelFile& model);

}  // namespace tunefp::commands
