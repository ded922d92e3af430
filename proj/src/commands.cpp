#include "tunefp/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "tunefp/error.hpp"

namespace tunefp::commands {

namespace {

struct ScanJob {
  std::string track_id;
  std::filesystem::path audio;
  std::string recorded_path;
  std::vector<std::string> genres;
};

std::string format_real(double v, const char* fmt = "%.10g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool is_wav(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav";
}

std::vector<ScanJob> collect_jobs(const ScanOptions& opts) {
  if (!std::filesystem::is_directory(opts.input_dir)) {
    throw Error(ErrorKind::IoError, opts.input_dir.string() + " is not a directory");
  }
  std::vector<ScanJob> jobs;
  if (opts.tags) {
    for (const auto& t : load_tags(*opts.tags)) {
      std::filesystem::path audio = t.path;
      if (audio.is_relative()) audio = opts.input_dir / audio;
      jobs.push_back({t.track_id, audio, t.path, {t.genres.begin(), t.genres.end()}});
    }
  } else {
    for (const auto& entry : std::filesystem::directory_iterator(opts.input_dir)) {
      if (entry.is_regular_file() && is_wav(entry.path())) {
        jobs.push_back({entry.path().stem().string(), entry.path(),
                        entry.path().filename().string(), {}});
      }
    }
  }
  std::sort(jobs.begin(), jobs.end(),
            [](const ScanJob& a, const ScanJob& b) { return a.track_id < b.track_id; });
  return jobs;
}

void write_variance_table(std::ostream& out, const PcaModel& pca) {
  out << "component,explained_variance_ratio,cumulative\n";
  double cumulative = 0.0;
  for (std::size_t i = 0; i < pca.full_variance_ratio.size(); ++i) {
    cumulative += pca.full_variance_ratio[i];
    out << (i + 1) << ',' << format_real(pca.full_variance_ratio[i], "%.17g") << ','
        << format_real(cumulative, "%.17g") << '\n';
  }
}

void write_rows(std::ostream& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_real(row[c]);
    }
    out << '\n';
  }
}

}  // namespace

ScanReport scan(const ScanOptions& opts, std::ostream& diag) {
  const auto jobs = collect_jobs(opts);
  if (opts.config.frame_size / 2 + 1 != kSpectrumMeans || opts.config.n_mfcc != kMfccMeans) {
    throw Error(ErrorKind::ShapeError,
                "index fingerprints require frame_size 2048 and n_mfcc 13 (1062 values)");
  }

  std::vector<std::optional<IndexRecord>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      try {
        auto fp = fingerprint_file(job.audio, job.track_id, opts.config);
        results[i] = IndexRecord{kSchemaVersion, job.track_id, job.recorded_path, job.genres,
                                 std::move(fp.values)};
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned threads = std::clamp<unsigned>(opts.jobs, 1, std::max<std::size_t>(jobs.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  ScanReport report;
  std::vector<IndexRecord> records;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i]) {
      records.push_back(std::move(*results[i]));
    } else {
      diag << "skipped " << jobs[i].track_id << ": " << errors[i] << '\n';
      report.failures.emplace_back(jobs[i].track_id, errors[i]);
    }
  }
  if (records.empty()) {
    throw Error(ErrorKind::EmptyCorpus,
                "no decodable tracks under " + opts.input_dir.string());
  }
  write_index(opts.out, records);
  report.written = records.size();
  return report;
}

ModelFile build(const BuildOptions& opts, std::ostream& out) {
  const auto records = read_index(opts.index);
  if (records.size() < 2) {
    throw Error(ErrorKind::InsufficientData,
                "index holds " + std::to_string(records.size()) + " tracks, need at least 2");
  }

  Matrix corpus(records.size(), kFingerprintSize);
  for (std::size_t r = 0; r < records.size(); ++r) {
    std::copy(records[r].fingerprint.begin(), records[r].fingerprint.end(), corpus.row(r).begin());
  }

  ModelFile model;
  model.config = opts.config;
  model.pca = fit_pca(standardize(corpus), opts.config.variance_target);
  for (const auto& rec : records) {
    model.tracks.push_back({rec.track_id, rec.path, rec.genres});
    model.reduced.emplace(rec.track_id, project(model.pca, rec.fingerprint));
  }
  write_model(opts.out, model);

  const auto& ratios = model.pca.explained_variance_ratio;
  double retained = 0.0;
  for (double r : ratios) retained += r;
  out << "n_components," << model.pca.n_components << '\n';
  out << "retained_variance," << format_real(retained) << '\n';
  write_variance_table(out, model.pca);

  if (opts.variance_curve) {
    std::ofstream curve(*opts.variance_curve);
    if (!curve) throw Error(ErrorKind::IoError, "cannot write " + opts.variance_curve->string());
    write_variance_table(curve, model.pca);
  }
  return model;
}

DistanceMatrix model_distances(const ModelFile& model) {
  std::vector<ReducedFingerprint> reduced;
  for (const auto& t : model.tracks) {
    const auto it = model.reduced.find(t.track_id);
    if (it == model.reduced.end()) {
      throw Error(ErrorKind::SchemaError, "model has no reduced vector for '" + t.track_id + "'");
    }
    reduced.push_back({t.track_id, it->second});
  }
  return distance_matrix(reduced);
}

std::vector<TrackTags> model_tags(const ModelFile& model) {
  std::vector<TrackTags> tags;
  for (const auto& t : model.tracks) {
    if (!t.genres.empty()) tags.push_back({t.track_id, {t.genres.begin(), t.genres.end()}, t.path});
  }
  return tags;
}

RecommendationSet recommend(const std::filesystem::path& model_path, const std::string& track_id,
                            std::optional<std::size_t> k, std::ostream& out) {
  const auto model = read_model(model_path);
  const auto dist = model_distances(model);
  auto recs = top_k(dist, track_id, k.value_or(model.config.k));

  std::map<std::string, const ModelTrack*> by_id;
  for (const auto& t : model.tracks) by_id[t.track_id] = &t;
  for (std::size_t i = 0; i < recs.neighbors.size(); ++i) {
    const auto& n = recs.neighbors[i];
    out << (i + 1) << ',' << n.track_id << ',' << format_real(n.distance) << ','
        << join(by_id.at(n.track_id)->genres, '|') << '\n';
  }
  return recs;
}

GenreAccuracy evaluate(const std::filesystem::path& model_path, std::optional<std::size_t> k,
                       std::ostream& out) {
  const auto model = read_model(model_path);
  const auto result =
      evaluate_genre_accuracy(model_distances(model), model_tags(model), k.value_or(model.config.k));

  out << "accuracy," << format_real(result.accuracy) << ',' << format_real(100.0 * result.accuracy, "%.2f")
      << "%," << result.successes << '/' << result.requests << '\n';
  out << "track_id,success,recommendations\n";
  for (const auto& t : result.per_track) {
    std::vector<std::string> ids;
    for (const auto& n : t.recommendations.neighbors) ids.push_back(n.track_id);
    out << t.track_id << ',' << (t.success ? 1 : 0) << ',' << join(ids, '|') << '\n';
  }
  return result;
}

Feature parse_feature(const std::string& name) {
  if (name == "spec") return Feature::Spectrogram;
  if (name == "mfcc") return Feature::Mfcc;
  if (name == "chroma") return Feature::Chroma;
  if (name == "onset") return Feature::Onset;
  if (name == "beats") return Feature::Beats;
  if (name == "fingerprint") return Feature::Fingerprint;
  throw Error(ErrorKind::DomainError, "unknown feature '" + name + "'");
}

void inspect(const std::filesystem::path& track, Feature feature, const PipelineConfig& config,
             std::ostream& out) {
  const auto segment = prepare_clip(decode_wav_file(track), config);
  const auto features = analyze_segment(segment, config);
  switch (feature) {
    case Feature::Spectrogram:
      write_rows(out, features.spectrogram.power);
      break;
    case Feature::Mfcc:
      write_rows(out, features.mfcc.values);
      break;
    case Feature::Chroma:
      write_rows(out, features.chroma.values);
      break;
    case Feature::Onset:
      for (double v : features.onset.values) out << format_real(v) << '\n';
      break;
    case Feature::Beats:
      for (double t : features.beats.beat_times) out << format_real(t) << '\n';
      break;
    case Feature::Fingerprint: {
      const auto fp = fingerprint_features(track.stem().string(), features);
      Matrix row(1, fp.values.size());
      std::copy(fp.values.begin(), fp.values.end(), row.row(0).begin());
      write_rows(out, row);
      break;
    }
  }
}

}  // namespace tunefp::commands
