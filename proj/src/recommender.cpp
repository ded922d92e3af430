#include "tunefp/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tunefp/error.hpp"

namespace tunefp {

std::size_t DistanceMatrix::index_of(const std::string& track_id) const {
  const auto it = std::find(track_ids.begin(), track_ids.end(), track_id);
  if (it == track_ids.end()) throw Error(ErrorKind::NotFound, "unknown track '" + track_id + "'");
  return static_cast<std::size_t>(it - track_ids.begin());
}

DistanceMatrix distance_matrix(const std::vector<ReducedFingerprint>& reduced) {
  const std::size_t n = reduced.size();
  if (n < 2) {
    throw Error(ErrorKind::InsufficientData, "distance matrix needs at least 2 tracks");
  }
  const std::size_t dim = reduced.front().values.size();
  DistanceMatrix out;
  out.values = Matrix(n, n);
  for (const auto& r : reduced) {
    if (r.values.size() != dim) {
      throw Error(ErrorKind::ShapeError, "track '" + r.track_id + "' has " +
                                             std::to_string(r.values.size()) + " values, expected " +
                                             std::to_string(dim));
    }
    out.track_ids.push_back(r.track_id);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = reduced[i].values[c] - reduced[j].values[c];
        acc += diff * diff;
      }
      out.values(i, j) = out.values(j, i) = std::sqrt(acc);
    }
  }
  return out;
}

RecommendationSet top_k(const DistanceMatrix& dist, const std::string& target_id, std::size_t k) {
  const std::size_t target = dist.index_of(target_id);
  if (k == 0 || k + 1 > dist.size()) {
    throw Error(ErrorKind::InvalidK, "k=" + std::to_string(k) + " with " +
                                         std::to_string(dist.size()) + " tracks");
  }

  std::vector<Neighbor> candidates;
  candidates.reserve(dist.size() - 1);
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != target) candidates.push_back({dist.track_ids[j], dist.values(target, j)});
  }
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.track_id < b.track_id;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), closer);
  candidates.resize(k);
  return {target_id, std::move(candidates)};
}

GenreAccuracy evaluate_genre_accuracy(const DistanceMatrix& dist, const std::vector<TrackTags>& tags,
                                      std::size_t k) {
  std::map<std::string, const std::set<std::string>*> genres_of;
  for (const auto& t : tags) {
    if (!t.genres.empty()) genres_of[t.track_id] = &t.genres;
  }
  std::string missing;
  for (const auto& id : dist.track_ids) {
    if (!genres_of.contains(id)) missing += (missing.empty() ? "" : ", ") + id;
  }
  if (!missing.empty()) throw Error(ErrorKind::TagsMissing, "no genres for: " + missing);

  GenreAccuracy result;
  result.requests = dist.size();
  for (const auto& id : dist.track_ids) {
    TrackEvaluation eval{id, false, top_k(dist, id, k)};
    const auto& target = *genres_of.at(id);
    for (const auto& n : eval.recommendations.neighbors) {
      const auto& candidate = *genres_of.at(n.track_id);
      const bool shared = std::any_of(candidate.begin(), candidate.end(),
                                      [&](const std::string& g) { return target.contains(g); });
      if (shared) {
        eval.success = true;
        break;
      }
    }
    if (eval.success) ++result.successes;
    result.per_track.push_back(std::move(eval));
  }
  result.accuracy = static_cast<double>(result.successes) / static_cast<double>(result.requests);
  return result;
}

}  // namespace tunefp
