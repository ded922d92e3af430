#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "tunefp/fingerprint.hpp"
#include "tunefp/matrix.hpp"

namespace tunefp {

/// Symmetric pairwise Euclidean distances with an exactly zero diagonal.
struct DistanceMatrix {
  std::vector<std::string> track_ids;
  Matrix values;

  std::size_t size() const { return track_ids.size(); }
  std::size_t index_of(const std::string& track_id) const;  // NotFound when absent
};

DistanceMatrix distance_matrix(const std::vector<ReducedFingerprint>& reduced);

struct Neighbor {
  std::string track_id;
  double distance = 0.0;
};

struct RecommendationSet {
  std::string target_id;
  std::vector<Neighbor> neighbors;  // ascending distance, ties by track_id
};

RecommendationSet top_k(const DistanceMatrix& dist, const std::string& target_id, std::size_t k = 3);

struct TrackTags {
  std::string track_id;
  std::set<std::string> genres;  // trimmed, lowercase, non-empty
  std::string path;              // audio location, when the tags came from a catalog
};

struct TrackEvaluation {
  std::string track_id;
  bool success = false;
  RecommendationSet recommendations;
};

struct GenreAccuracy {
  double accuracy = 0.0;
  std::size_t successes = 0;
  std::size_t requests = 0;
  std::vector<TrackEvaluation> per_track;  // in distance-matrix order
};

/// A request succeeds when any of the target's top-k neighbours shares at
/// least one genre with it.
GenreAccuracy evaluate_genre_accuracy(const DistanceMatrix& dist, const std::vector<TrackTags>& tags,
                                      std::size_t k = 3);

}  // namespace tunefp
