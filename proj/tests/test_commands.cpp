#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/corpus.hpp"
#include "support/temp_dir.hpp"
#include "tunefp/commands.hpp"
#include "tunefp/error.hpp"

using namespace tunefp;
using tunefp::testing::TempDir;

namespace {

// Short tracks keep these tests fast; the fingerprint layout is unchanged.
PipelineConfig short_config() {
  PipelineConfig cfg;
  cfg.segment_start_s = 1.0;
  cfg.segment_dur_s = 6.0;
  return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TUNEFP_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Fixture {
  TempDir dir{"cmd"};
  std::vector<testing::CorpusTrack> tracks;
  Fixture() { tracks = testing::write_genre_corpus(dir.path(), 2, 5, 8.0); }
};

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("scan, build, recommend, evaluate on a small corpus") {
    Fixture fx;
    std::ostringstream diag;
    commands::ScanOptions scan{fx.dir.path(), fx.dir / "tags.csv", fx.dir / "index.jsonl", short_config(), 3};
    const auto report = commands::scan(scan, diag);
    CHECK(report.written == 6);
    CHECK(report.failures.empty());
    const auto records = read_index(fx.dir / "index.jsonl");
    REQUIRE(records.size() == 6);
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].fingerprint.size() == 1062);
      if (i) CHECK(records[i - 1].track_id < records[i].track_id);
      CHECK(records[i].genres.size() == 1);
    }

    std::ostringstream out;
    commands::BuildOptions build{fx.dir / "index.jsonl", fx.dir / "model.json", short_config(), fx.dir / "curve.csv"};
    const auto model = commands::build(build, out);
    const auto out_lines = lines_of(out.str());
    REQUIRE(out_lines.size() >= 3);
    CHECK(out_lines[0] == "n_components," + std::to_string(model.pca.n_components));
    CHECK(out_lines[1].rfind("retained_variance,", 0) == 0);
    CHECK(out_lines[2] == "component,explained_variance_ratio,cumulative");

    const auto curve = lines_of(testing::slurp(fx.dir / "curve.csv"));
    REQUIRE(curve.size() >= 2);
    CHECK(curve[0] == "component,explained_variance_ratio,cumulative");
    double prev = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      const auto cells = split(curve[i], ',');
      REQUIRE(cells.size() == 3);
      const double cum = std::stod(cells[2]);
      CHECK(cum >= prev);
      prev = cum;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));

    std::ostringstream rec;
    const auto recs = commands::recommend(fx.dir / "model.json", "tonal_0", 3, rec);
    const auto rec_lines = lines_of(rec.str());
    REQUIRE(rec_lines.size() == 3);
    double last = -1.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto cells = split(rec_lines[i], ',');
      REQUIRE(cells.size() == 4);
      CHECK(cells[0] == std::to_string(i + 1));
      CHECK(cells[1] == recs.neighbors[i].track_id);
      CHECK(cells[1] != "tonal_0");
      const double d = std::stod(cells[2]);
      CHECK(d >= last);
      last = d;
    }
    CHECK_THROWS_AS(commands::recommend(fx.dir / "model.json", "nope", 3, rec), Error);
    CHECK_THROWS_AS(commands::recommend(fx.dir / "model.json", "tonal_0", 6, rec), Error);

    std::ostringstream ev;
    const auto acc = commands::evaluate(fx.dir / "model.json", std::nullopt, ev);
    const auto ev_lines = lines_of(ev.str());
    REQUIRE(ev_lines.size() == 2 + 6);
    CHECK(ev_lines[0].rfind("accuracy,", 0) == 0);
    CHECK(ev_lines[0].find('%') != std::string::npos);
    CHECK(ev_lines[0].find("/6") != std::string::npos);
    CHECK(ev_lines[1] == "track_id,success,recommendations");
    CHECK(acc.requests == 6);

    // Model is self-contained: distances and tags come from it alone.
    const auto m = read_model(fx.dir / "model.json");
    CHECK(commands::model_distances(m).size() == 6);
    CHECK(commands::model_tags(m).size() == 6);
    CHECK(m.config == short_config());
  }

  TEST_CASE("scan skips a corrupt file and names it") {
    Fixture fx;
    testing::spit(fx.tracks[1].file, "RIFF garbage");
    std::ostringstream diag;
    const auto report =
        commands::scan({fx.dir.path(), fx.dir / "tags.csv", fx.dir / "index.jsonl", short_config(), 2}, diag);
    CHECK(report.written == 5);
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].first == fx.tracks[1].track_id);
    CHECK(diag.str().find(fx.tracks[1].track_id) != std::string::npos);
    CHECK(read_index(fx.dir / "index.jsonl").size() == 5);
  }

  TEST_CASE("scan without tags takes every wav in the directory") {
    Fixture fx;
    std::ostringstream diag;
    const auto report =
        commands::scan({fx.dir.path(), std::nullopt, fx.dir / "index.jsonl", short_config(), 1}, diag);
    CHECK(report.written == 6);
    const auto records = read_index(fx.dir / "index.jsonl");
    CHECK(records[0].track_id == "chords_0");
    CHECK(records[0].genres.empty());
  }

  TEST_CASE("scan of an empty directory") {
    TempDir dir("empty");
    std::ostringstream diag;
    try {
      commands::scan({dir.path(), std::nullopt, dir / "index.jsonl", short_config(), 1}, diag);
      FAIL("expected EmptyCorpus");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyCorpus);
    }
  }

  TEST_CASE("build on collinear and full-rank corpora") {
    TempDir dir("build");
    std::vector<IndexRecord> recs;
    for (int i = 0; i < 5; ++i) {
      IndexRecord r{kSchemaVersion, "c" + std::to_string(i), "", {"x"}, std::vector<double>(1062)};
      for (std::size_t c = 0; c < 1062; ++c) r.fingerprint[c] = 0.5 * c + (1.0 + c % 7) * i * i;
      recs.push_back(r);
    }
    write_index(dir / "line.jsonl", recs);
    std::ostringstream out;
    PipelineConfig cfg;
    auto model = commands::build({dir / "line.jsonl", dir / "line.json", cfg, std::nullopt}, out);
    CHECK(model.pca.n_components == 1);

    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& r : recs)
      for (double& v : r.fingerprint) v = g(rng);
    write_index(dir / "rand.jsonl", recs);
    cfg.variance_target = 1.0;
    model = commands::build({dir / "rand.jsonl", dir / "rand.json", cfg, std::nullopt}, out);
    CHECK(model.pca.n_components == 4);

    write_index(dir / "one.jsonl", {recs[0]});
    try {
      commands::build({dir / "one.jsonl", dir / "one.json", cfg, std::nullopt}, out);
      FAIL("expected InsufficientData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientData);
    }
  }

  TEST_CASE("evaluate extremes") {
    TempDir dir("eval");
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<IndexRecord> same, disjoint;
    for (int i = 0; i < 5; ++i) {
      IndexRecord r{kSchemaVersion, "e" + std::to_string(i), "", {"pop"}, std::vector<double>(1062)};
      for (double& v : r.fingerprint) v = g(rng);
      same.push_back(r);
      r.genres = {"g" + std::to_string(i)};
      disjoint.push_back(r);
    }
    write_index(dir / "same.jsonl", same);
    write_index(dir / "disjoint.jsonl", disjoint);
    std::ostringstream out;
    commands::build({dir / "same.jsonl", dir / "same.json", {}, std::nullopt}, out);
    commands::build({dir / "disjoint.jsonl", dir / "disjoint.json", {}, std::nullopt}, out);
    std::ostringstream a, b;
    CHECK(commands::evaluate(dir / "same.json", 3, a).accuracy == 1.0);
    CHECK(lines_of(a.str())[0].find("100.00%") != std::string::npos);
    CHECK(commands::evaluate(dir / "disjoint.json", 3, b).accuracy == 0.0);
    CHECK(lines_of(b.str())[0].find("0.00%") != std::string::npos);
  }

  TEST_CASE("inspect shapes") {
    Fixture fx;
    const auto cfg = short_config();
    auto columns = [&](commands::Feature f) {
      std::ostringstream out;
      commands::inspect(fx.tracks[0].file, f, cfg, out);
      const auto lines = lines_of(out.str());
      REQUIRE(!lines.empty());
      return std::pair{lines.size(), split(lines[0], ',').size()};
    };
    CHECK(columns(commands::Feature::Fingerprint) == std::pair<std::size_t, std::size_t>{1, 1062});
    CHECK(columns(commands::Feature::Chroma).second == 12);
    CHECK(columns(commands::Feature::Mfcc).second == 13);
    CHECK(columns(commands::Feature::Spectrogram).second == 1025);
    CHECK(columns(commands::Feature::Onset).second == 1);
    CHECK(commands::parse_feature("spec") == commands::Feature::Spectrogram);
    CHECK_THROWS_AS(commands::parse_feature("tempo"), Error);

    testing::spit(fx.dir / "bad.wav", "nope");
    std::ostringstream sink;
    try {
      commands::inspect(fx.dir / "bad.wav", commands::Feature::Mfcc, cfg, sink);
      FAIL("expected DecodeError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DecodeError);
    }
  }

  TEST_CASE("command-line exit codes") {
    Fixture fx;
    const std::string seg = " --segment-start 1 --segment-dur 6";
    const auto d = fx.dir.path().string();
    CHECK(run_cli("scan --input \"" + d + "\" --tags \"" + d + "/tags.csv\" --out \"" + d + "/i.jsonl\"" + seg) == 0);
    CHECK(run_cli("build --index \"" + d + "/i.jsonl\" --out \"" + d + "/m.json\"") == 0);
    CHECK(run_cli("recommend --model \"" + d + "/m.json\" --track tonal_0 --k 3") == 0);
    CHECK(run_cli("recommend --model \"" + d + "/m.json\" --track missing") == 1);
    CHECK(run_cli("evaluate --model \"" + d + "/m.json\"") == 0);
    CHECK(run_cli("inspect --track \"" + fx.tracks[0].file.string() + "\" --feature chroma --out \"" + d +
                  "/c.csv\"" + seg) == 0);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("recommend --model \"" + d + "/m.json\"") == 2);

    testing::spit(fx.tracks[2].file, "junk");
    CHECK(run_cli("scan --input \"" + d + "\" --tags \"" + d + "/tags.csv\" --out \"" + d + "/j.jsonl\"" + seg) == 3);
  }
}
