#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tunefp/fingerprint.hpp"
#include "tunefp/pipeline.hpp"
#include "tunefp/recommender.hpp"

namespace tunefp {

inline constexpr int kSchemaVersion = 1;

struct IndexRecord {
  int schema = kSchemaVersion;
  std::string track_id;
  std::string path;
  std::vector<std::string> genres;
  std::vector<double> fingerprint;

  bool operator==(const IndexRecord&) const = default;
};

/// Index files hold one JSON object per line. Reals are written with 17
/// significant digits so reading back reproduces every bit.
std::string format_index_line(const IndexRecord& record);
IndexRecord parse_index_line(const std::string& line, std::size_t line_number);

void write_index(const std::filesystem::path& path, const std::vector<IndexRecord>& records);
std::vector<IndexRecord> read_index(const std::filesystem::path& path);

struct ModelTrack {
  std::string track_id;
  std::string path;
  std::vector<std::string> genres;

  bool operator==(const ModelTrack&) const = default;
};

struct ModelFile {
  int schema = kSchemaVersion;
  PipelineConfig config;
  PcaModel pca;
  std::vector<ModelTrack> tracks;
  std::map<std::string, std::vector<double>> reduced;
};

std::string format_model(const ModelFile& model);
ModelFile parse_model(const std::string& text);

void write_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile read_model(const std::filesystem::path& path);

/// CSV with header `track_id,path,genres`; genres are pipe-separated and
/// normalized to trimmed lowercase.
std::vector<TrackTags> load_tags(const std::filesystem::path& path);
std::vector<TrackTags> parse_tags(const std::string& text);

}  // namespace tunefp
