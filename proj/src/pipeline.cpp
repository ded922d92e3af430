#include "tunefp/pipeline.hpp"

#include "tunefp/error.hpp"

namespace tunefp {

AudioClip prepare_clip(const MultiChannelClip& decoded, const PipelineConfig& cfg) {
  const AudioClip mono = to_mono(decoded);
  const AudioClip resampled = resample(mono, cfg.sample_rate);
  return extract_segment(resampled, cfg.segment_start_s, cfg.segment_dur_s);
}

TrackFeatures analyze_segment(const AudioClip& segment, const PipelineConfig& cfg) {
  const StftConfig stft_cfg = cfg.stft();
  TrackFeatures f;
  f.spectrogram = power_spectrogram(stft(segment, stft_cfg));

  const auto bank = build_mel_filterbank(cfg.n_mels, cfg.frame_size, segment.sample_rate);
  f.mel = mel_energies(f.spectrogram, bank);
  f.mfcc = mfcc(f.mel, cfg.n_mfcc);

  f.pitch = log_freq_spectrogram(f.spectrogram);
  f.chroma = chromagram(f.pitch);

  f.onset = onset_envelope(f.mel, envelope_timing(stft_cfg, segment.sample_rate));
  try {
    const auto tempo = estimate_tempo(f.onset, cfg.bpm_range);
    f.beats = track_beats(f.onset, tempo.period_frames, cfg.alpha);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoOnsets) throw;
    f.beats = {};
  }
  f.tempo = tempo_block(f.beats, f.onset);
  return f;
}

Fingerprint fingerprint_features(std::string track_id, const TrackFeatures& features) {
  const auto spectrum = row_means(features.spectrogram.power);
  const auto cepstra = row_means(features.mfcc.values);
  const auto chroma = row_means(features.chroma.values);
  return assemble_fingerprint(std::move(track_id), spectrum, cepstra, chroma, features.tempo);
}

Fingerprint fingerprint_file(const std::filesystem::path& path, std::string track_id,
                             const PipelineConfig& cfg) {
  const auto segment = prepare_clip(decode_wav_file(path), cfg);
  return fingerprint_features(std::move(track_id), analyze_segment(segment, cfg));
}

}  // namespace tunefp
