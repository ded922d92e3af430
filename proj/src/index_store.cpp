#include "tunefp/index_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tunefp/error.hpp"

namespace tunefp {

namespace {

using nlohmann::json;

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::DomainError, "cannot serialize a non-finite value");
  // "-0" would be read back as the integer 0.
  if (v == 0.0 && std::signbit(v)) {
    out += "-0.0";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void append_numbers(std::string& out, std::span<const double> values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    append_number(out, values[i]);
  }
  out += ']';
}

void append_strings(std::string& out, const std::vector<std::string>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    append_string(out, values[i]);
  }
  out += ']';
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<double> number_array(const json& j, const std::string& what, ErrorKind kind) {
  if (!j.is_array()) throw Error(kind, what + " is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(kind, what + " holds a non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> string_array(const json& j, const std::string& what, ErrorKind kind) {
  if (!j.is_array()) throw Error(kind, what + " is not an array");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw Error(kind, what + " holds a non-string entry");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const json& field(const json& obj, const char* key, ErrorKind kind, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(kind, where + "missing field '" + key + "'");
  return *it;
}

std::string window_name(WindowKind w) { return w == WindowKind::Hann ? "hann" : "rectangular"; }

WindowKind parse_window(const std::string& name) {
  if (name == "hann") return WindowKind::Hann;
  if (name == "rectangular") return WindowKind::Rectangular;
  throw Error(ErrorKind::SchemaError, "unknown window '" + name + "'");
}

void append_config(std::string& out, const PipelineConfig& c) {
  out += "{\"sample_rate\":" + std::to_string(c.sample_rate);
  out += ",\"frame_size\":" + std::to_string(c.frame_size);
  out += ",\"hop\":" + std::to_string(c.hop);
  out += ",\"window\":";
  append_string(out, window_name(c.window));
  out += ",\"n_mels\":" + std::to_string(c.n_mels);
  out += ",\"n_mfcc\":" + std::to_string(c.n_mfcc);
  out += ",\"segment_start_s\":";
  append_number(out, c.segment_start_s);
  out += ",\"segment_dur_s\":";
  append_number(out, c.segment_dur_s);
  out += ",\"variance_target\":";
  append_number(out, c.variance_target);
  out += ",\"k\":" + std::to_string(c.k);
  out += ",\"alpha\":";
  append_number(out, c.alpha);
  out += ",\"bpm_range\":";
  const double range[] = {c.bpm_range.min_bpm, c.bpm_range.max_bpm};
  append_numbers(out, range);
  out += '}';
}

PipelineConfig parse_config(const json& j) {
  constexpr auto kind = ErrorKind::SchemaError;
  if (!j.is_object()) throw Error(kind, "config is not an object");
  PipelineConfig c;
  try {
    c.sample_rate = field(j, "sample_rate", kind, "config: ").get<int>();
    c.frame_size = field(j, "frame_size", kind, "config: ").get<std::size_t>();
    c.hop = field(j, "hop", kind, "config: ").get<std::size_t>();
    c.window = parse_window(field(j, "window", kind, "config: ").get<std::string>());
    c.n_mels = field(j, "n_mels", kind, "config: ").get<std::size_t>();
    c.n_mfcc = field(j, "n_mfcc", kind, "config: ").get<std::size_t>();
    c.segment_start_s = field(j, "segment_start_s", kind, "config: ").get<double>();
    c.segment_dur_s = field(j, "segment_dur_s", kind, "config: ").get<double>();
    c.variance_target = field(j, "variance_target", kind, "config: ").get<double>();
    c.k = field(j, "k", kind, "config: ").get<std::size_t>();
    c.alpha = field(j, "alpha", kind, "config: ").get<double>();
  } catch (const json::exception& e) {
    throw Error(kind, std::string("config: ") + e.what());
  }
  const auto range = number_array(field(j, "bpm_range", kind, "config: "), "bpm_range", kind);
  if (range.size() != 2) throw Error(kind, "bpm_range must hold two values");
  c.bpm_range = {range[0], range[1]};
  return c;
}

}  // namespace

std::string format_index_line(const IndexRecord& r) {
  std::string out = "{\"schema\":" + std::to_string(r.schema) + ",\"track_id\":";
  append_string(out, r.track_id);
  out += ",\"path\":";
  append_string(out, r.path);
  out += ",\"genres\":";
  append_strings(out, r.genres);
  out += ",\"fingerprint\":";
  append_numbers(out, r.fingerprint);
  out += '}';
  return out;
}

IndexRecord parse_index_line(const std::string& line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, where + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, where + "record is not an object");

  constexpr auto kind = ErrorKind::ParseError;
  const auto& schema = field(j, "schema", kind, where);
  if (!schema.is_number_integer()) throw Error(kind, where + "schema is not an integer");
  if (schema.get<int>() != kSchemaVersion) {
    throw Error(ErrorKind::SchemaError,
                where + "schema " + schema.dump() + ", expected " + std::to_string(kSchemaVersion));
  }

  IndexRecord r;
  const auto& id = field(j, "track_id", kind, where);
  const auto& path = field(j, "path", kind, where);
  if (!id.is_string() || !path.is_string()) throw Error(kind, where + "track_id/path must be strings");
  r.track_id = id.get<std::string>();
  r.path = path.get<std::string>();
  if (r.track_id.empty()) throw Error(kind, where + "empty track_id");
  r.genres = string_array(field(j, "genres", kind, where), where + "genres", kind);
  r.fingerprint = number_array(field(j, "fingerprint", kind, where), where + "fingerprint", kind);
  if (r.fingerprint.size() != kFingerprintSize) {
    throw Error(kind, where + "fingerprint has " + std::to_string(r.fingerprint.size()) +
                          " values, expected " + std::to_string(kFingerprintSize));
  }
  return r;
}

void write_index(const std::filesystem::path& path, const std::vector<IndexRecord>& records) {
  std::set<std::string> seen;
  std::string text;
  for (const auto& r : records) {
    if (!seen.insert(r.track_id).second) {
      throw Error(ErrorKind::DuplicateTrack, "track '" + r.track_id + "' appears twice");
    }
    if (r.fingerprint.size() != kFingerprintSize) {
      throw Error(ErrorKind::ShapeError, "track '" + r.track_id + "' fingerprint has " +
                                             std::to_string(r.fingerprint.size()) + " values");
    }
    text += format_index_line(r);
    text += '\n';
  }
  write_text(path, text);
}

std::vector<IndexRecord> read_index(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<IndexRecord> records;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (trim(line).empty()) continue;
    auto r = parse_index_line(line, number);
    if (!seen.insert(r.track_id).second) {
      throw Error(ErrorKind::DuplicateTrack,
                  "line " + std::to_string(number) + ": track '" + r.track_id + "' appears twice");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string format_model(const ModelFile& m) {
  const auto& pca = m.pca;
  std::string out = "{\n\"schema\":" + std::to_string(m.schema) + ",\n\"config\":";
  append_config(out, m.config);
  out += ",\n\"variance_target\":";
  append_number(out, pca.variance_target);
  out += ",\n\"n_components\":" + std::to_string(pca.n_components);
  out += ",\n\"mean\":";
  append_numbers(out, pca.mean);
  out += ",\n\"scale\":";
  append_numbers(out, pca.scale);
  out += ",\n\"components\":[";
  for (std::size_t k = 0; k < pca.components.rows(); ++k) {
    out += k ? ",\n" : "\n";
    append_numbers(out, pca.components.row(k));
  }
  out += "],\n\"explained_variance_ratio\":";
  append_numbers(out, pca.explained_variance_ratio);
  out += ",\n\"tracks\":[";
  for (std::size_t i = 0; i < m.tracks.size(); ++i) {
    out += i ? ",\n" : "\n";
    out += "{\"track_id\":";
    append_string(out, m.tracks[i].track_id);
    out += ",\"path\":";
    append_string(out, m.tracks[i].path);
    out += ",\"genres\":";
    append_strings(out, m.tracks[i].genres);
    out += '}';
  }
  out += "],\n\"reduced\":{";
  bool first = true;
  for (const auto& [id, values] : m.reduced) {
    out += first ? "\n" : ",\n";
    first = false;
    append_string(out, id);
    out += ':';
    append_numbers(out, values);
  }
  out += "}\n}\n";
  return out;
}

ModelFile parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  constexpr auto kind = ErrorKind::SchemaError;
  if (!j.is_object()) throw Error(kind, "model is not a JSON object");

  ModelFile m;
  const auto& schema = field(j, "schema", kind, "");
  if (!schema.is_number_integer() || schema.get<int>() != kSchemaVersion) {
    throw Error(kind, "unsupported model schema " + schema.dump());
  }
  m.config = parse_config(field(j, "config", kind, ""));

  auto& pca = m.pca;
  const auto& target = field(j, "variance_target", kind, "");
  const auto& count = field(j, "n_components", kind, "");
  if (!target.is_number() || !count.is_number_unsigned()) {
    throw Error(kind, "variance_target/n_components have the wrong type");
  }
  pca.variance_target = target.get<double>();
  pca.n_components = count.get<std::size_t>();
  pca.mean = number_array(field(j, "mean", kind, ""), "mean", kind);
  pca.scale = number_array(field(j, "scale", kind, ""), "scale", kind);
  if (pca.mean.size() != kFingerprintSize || pca.scale.size() != kFingerprintSize) {
    throw Error(kind, "mean/scale must hold " + std::to_string(kFingerprintSize) + " values");
  }
  if (std::any_of(pca.scale.begin(), pca.scale.end(), [](double s) { return !(s > 0.0); })) {
    throw Error(kind, "scale entries must be positive");
  }

  const auto& components = field(j, "components", kind, "");
  if (!components.is_array() || components.size() != pca.n_components) {
    throw Error(kind, "components must hold n_components rows");
  }
  pca.components = Matrix(pca.n_components, kFingerprintSize);
  for (std::size_t k = 0; k < pca.n_components; ++k) {
    const auto row = number_array(components[k], "components row", kind);
    if (row.size() != kFingerprintSize) {
      throw Error(kind, "components row " + std::to_string(k) + " has " +
                            std::to_string(row.size()) + " values, expected " +
                            std::to_string(kFingerprintSize));
    }
    std::copy(row.begin(), row.end(), pca.components.row(k).begin());
  }
  pca.explained_variance_ratio =
      number_array(field(j, "explained_variance_ratio", kind, ""), "explained_variance_ratio", kind);
  if (pca.explained_variance_ratio.size() != pca.n_components) {
    throw Error(kind, "explained_variance_ratio must hold n_components values");
  }
  pca.full_variance_ratio = pca.explained_variance_ratio;

  const auto& tracks = field(j, "tracks", kind, "");
  if (!tracks.is_array()) throw Error(kind, "tracks is not an array");
  std::set<std::string> known;
  for (const auto& t : tracks) {
    if (!t.is_object()) throw Error(kind, "track entry is not an object");
    const auto& id = field(t, "track_id", kind, "track: ");
    const auto& path = field(t, "path", kind, "track: ");
    if (!id.is_string() || !path.is_string()) throw Error(kind, "track_id/path must be strings");
    ModelTrack mt{id.get<std::string>(), path.get<std::string>(),
                  string_array(field(t, "genres", kind, "track: "), "genres", kind)};
    if (!known.insert(mt.track_id).second) {
      throw Error(ErrorKind::DuplicateTrack, "track '" + mt.track_id + "' appears twice");
    }
    m.tracks.push_back(std::move(mt));
  }

  const auto& reduced = field(j, "reduced", kind, "");
  if (!reduced.is_object()) throw Error(kind, "reduced is not an object");
  for (const auto& [id, values] : reduced.items()) {
    if (!known.contains(id)) throw Error(kind, "reduced entry for unknown track '" + id + "'");
    auto v = number_array(values, "reduced '" + id + "'", kind);
    if (v.size() != pca.n_components) {
      throw Error(kind, "reduced '" + id + "' has " + std::to_string(v.size()) + " values");
    }
    m.reduced.emplace(id, std::move(v));
  }
  return m;
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  write_text(path, format_model(model));
}

ModelFile read_model(const std::filesystem::path& path) { return parse_model(read_text(path)); }

std::vector<TrackTags> parse_tags(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  std::vector<TrackTags> out;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::string where = "line " + std::to_string(number) + ": ";
    if (!have_header) {
      if (trimmed != "track_id,path,genres") {
        throw Error(ErrorKind::ParseError, where + "expected header 'track_id,path,genres'");
      }
      have_header = true;
      continue;
    }
    // Paths may contain commas; the id is the first field, genres the last.
    const auto first = trimmed.find(',');
    const auto last = trimmed.rfind(',');
    if (first == std::string::npos || first == last) {
      throw Error(ErrorKind::ParseError, where + "expected 3 fields");
    }
    TrackTags tags;
    tags.track_id = trim(std::string_view(trimmed).substr(0, first));
    tags.path = trim(std::string_view(trimmed).substr(first + 1, last - first - 1));
    if (tags.track_id.empty()) throw Error(ErrorKind::ParseError, where + "empty track_id");

    std::istringstream genres(trimmed.substr(last + 1));
    std::string genre;
    while (std::getline(genres, genre, '|')) {
      if (auto g = lowercase(trim(genre)); !g.empty()) tags.genres.insert(std::move(g));
    }
    if (tags.genres.empty()) {
      throw Error(ErrorKind::TagsMissing, where + "track '" + tags.track_id + "' has no genres");
    }
    if (!seen.insert(tags.track_id).second) {
      throw Error(ErrorKind::DuplicateTrack, where + "track '" + tags.track_id + "' appears twice");
    }
    out.push_back(std::move(tags));
  }
  return out;
}

std::vector<TrackTags> load_tags(const std::filesystem::path& path) {
  return parse_tags(read_text(path));
}

}  // namespace tunefp
