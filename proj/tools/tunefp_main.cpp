// tunefp: fingerprint a music library, fit the PCA model, and query it.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tunefp/commands.hpp"
#include "tunefp/error.hpp"

namespace {

// Exit codes: 0 success, 1 error, 2 usage, 3 scan finished with skipped tracks.
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;

void add_config_flags(CLI::App* cmd, tunefp::PipelineConfig& cfg, std::string& window) {
  cmd->add_option("--sample-rate", cfg.sample_rate, "Analysis sample rate (Hz)")->capture_default_str();
  cmd->add_option("--frame-size", cfg.frame_size, "STFT frame size (power of two)")->capture_default_str();
  cmd->add_option("--hop", cfg.hop, "STFT hop size (samples)")->capture_default_str();
  cmd->add_option("--window", window, "Analysis window")
      ->check(CLI::IsMember({"hann", "rectangular"}))
      ->capture_default_str();
  cmd->add_option("--n-mels", cfg.n_mels, "Mel filters")->capture_default_str();
  cmd->add_option("--n-mfcc", cfg.n_mfcc, "MFCC coefficients")->capture_default_str();
  cmd->add_option("--segment-start", cfg.segment_start_s, "Segment start (s)")->capture_default_str();
  cmd->add_option("--segment-dur", cfg.segment_dur_s, "Segment duration (s)")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "Beat-interval penalty weight")->capture_default_str();
  cmd->add_option("--bpm-min", cfg.bpm_range.min_bpm, "Slowest tempo considered")->capture_default_str();
  cmd->add_option("--bpm-max", cfg.bpm_range.max_bpm, "Fastest tempo considered")->capture_default_str();
}

void apply_window(tunefp::PipelineConfig& cfg, const std::string& window) {
  cfg.window = window == "rectangular" ? tunefp::WindowKind::Rectangular : tunefp::WindowKind::Hann;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cmd = tunefp::commands;

  CLI::App app{"Audio-fingerprint music recommender"};
  app.require_subcommand(1);

  tunefp::PipelineConfig cfg;
  std::string window = "hann";

  cmd::ScanOptions scan_opts;
  auto* scan = app.add_subcommand("scan", "Fingerprint WAV files into an index");
  scan->add_option("--input", scan_opts.input_dir, "Directory with WAV files")->required();
  scan->add_option("--tags", scan_opts.tags, "CSV catalog: track_id,path,genres");
  scan->add_option("--out", scan_opts.out, "Output index (.jsonl)")->required();
  scan->add_option("--jobs", scan_opts.jobs, "Parallel workers")->capture_default_str();
  add_config_flags(scan, cfg, window);

  cmd::BuildOptions build_opts;
  auto* build = app.add_subcommand("build", "Fit PCA over an index and write the model");
  build->add_option("--index", build_opts.index, "Index file (.jsonl)")->required();
  build->add_option("--variance", cfg.variance_target, "Retained variance fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  build->add_option("--k", cfg.k, "Default recommendation count stored in the model")
      ->capture_default_str();
  build->add_option("--out", build_opts.out, "Output model (.json)")->required();
  build->add_option("--variance-curve", build_opts.variance_curve, "Write the variance curve CSV");
  add_config_flags(build, cfg, window);

  std::string model_path;
  std::string track_id;
  std::optional<std::size_t> k;
  auto* recommend = app.add_subcommand("recommend", "Top-k most similar tracks");
  recommend->add_option("--model", model_path, "Model file")->required();
  recommend->add_option("--track", track_id, "Target track id")->required();
  recommend->add_option("--k", k, "Number of recommendations (default: model's)");

  auto* evaluate = app.add_subcommand("evaluate", "Genre-match accuracy over the model");
  evaluate->add_option("--model", model_path, "Model file")->required();
  evaluate->add_option("--k", k, "Number of recommendations (default: model's)");

  std::string track_path;
  std::string feature = "fingerprint";
  std::string out_path;
  auto* inspect = app.add_subcommand("inspect", "Dump one intermediate feature as CSV");
  inspect->add_option("--track", track_path, "WAV file")->required();
  inspect->add_option("--feature", feature, "Feature to dump")
      ->check(CLI::IsMember({"spec", "mfcc", "chroma", "onset", "beats", "fingerprint"}))
      ->capture_default_str();
  inspect->add_option("--out", out_path, "Output CSV (default: standard output)");
  add_config_flags(inspect, cfg, window);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  apply_window(cfg, window);

  try {
    if (*scan) {
      scan_opts.config = cfg;
      const auto report = cmd::scan(scan_opts, std::cerr);
      std::cerr << "indexed " << report.written << " tracks, skipped " << report.failures.size()
                << '\n';
      return report.failures.empty() ? 0 : kExitPartial;
    }
    if (*build) {
      build_opts.config = cfg;
      cmd::build(build_opts, std::cout);
    } else if (*recommend) {
      cmd::recommend(model_path, track_id, k, std::cout);
    } else if (*evaluate) {
      cmd::evaluate(model_path, k, std::cout);
    } else if (*inspect) {
      const auto which = cmd::parse_feature(feature);
      if (out_path.empty()) {
        cmd::inspect(track_path, which, cfg, std::cout);
      } else {
        std::ofstream out(out_path);
        if (!out) throw tunefp::Error(tunefp::ErrorKind::IoError, "cannot write " + out_path);
        cmd::inspect(track_path, which, cfg, out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
