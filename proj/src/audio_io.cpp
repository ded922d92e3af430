#include "tunefp/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tunefp/error.hpp"

namespace tunefp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct WavFormat {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(std::span<const std::uint8_t> b, std::size_t at, const WavFormat& fmt) {
  if (fmt.format == kFormatFloat) {
    float f;
    std::uint32_t bits = read_u32(b, at);
    std::memcpy(&f, &bits, sizeof f);
    return static_cast<double>(f);
  }
  if (fmt.bits == 16) {
    auto v = static_cast<std::int16_t>(read_u16(b, at));
    return v / 32768.0;
  }
  // 24-bit: sign-extend from the top byte.
  std::int32_t v = b[at] | (b[at + 1] << 8) | (b[at + 2] << 16);
  if (v & 0x800000) v |= ~0xFFFFFF;
  return v / 8388608.0;
}

}  // namespace

MultiChannelClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorKind::DecodeError, "missing RIFF/WAVE header");
  }

  WavFormat fmt;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::uint32_t size = read_u32(bytes, pos + 4);
    std::size_t body = pos + 8;
    // Truncated trailing chunks are clamped; some writers leave a bogus size on data.
    std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);

    if (tag_is(bytes, pos, "fmt ")) {
      if (avail < 16) throw Error(ErrorKind::DecodeError, "fmt chunk too short");
      fmt.format = read_u16(bytes, body);
      fmt.channels = read_u16(bytes, body + 2);
      fmt.sample_rate = read_u32(bytes, body + 4);
      fmt.block_align = read_u16(bytes, body + 12);
      fmt.bits = read_u16(bytes, body + 14);
      if (fmt.format == kFormatExtensible) {
        if (avail < 26) throw Error(ErrorKind::DecodeError, "extensible fmt chunk too short");
        fmt.format = read_u16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, avail);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }

  if (!have_fmt) throw Error(ErrorKind::DecodeError, "no fmt chunk");
  if (!have_data) throw Error(ErrorKind::DecodeError, "no data chunk");
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw Error(ErrorKind::DecodeError, "zero channels or sample rate");
  }

  const bool int_ok = fmt.format == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24);
  const bool float_ok = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!int_ok && !float_ok) {
    throw Error(ErrorKind::UnsupportedFormat, "format tag " + std::to_string(fmt.format) + " with " +
                                                  std::to_string(fmt.bits) + " bits per sample");
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (fmt.block_align != 0 && fmt.block_align != frame_bytes) {
    throw Error(ErrorKind::DecodeError, "block_align does not match channels * bits");
  }
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error(ErrorKind::DecodeError, "empty data chunk");

  MultiChannelClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.channels.assign(fmt.channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      clip.channels[c][f] = decode_sample(data, f * frame_bytes + c * bytes_per_sample, fmt);
    }
  }
  return clip;
}

MultiChannelClip decode_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav16(const MultiChannelClip& clip) {
  const auto channels = static_cast<std::uint16_t>(clip.channels.size());
  const std::size_t frames = clip.frames();
  const auto data_bytes = static_cast<std::uint32_t>(frames * channels * 2);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * channels * 2);
  put_u16(out, static_cast<std::uint16_t>(channels * 2));
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& ch : clip.channels) {
      double scaled = std::round(ch[f] * 32768.0);
      auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      put_u16(out, static_cast<std::uint16_t>(v));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_wav16(const AudioClip& clip) {
  return encode_wav16(MultiChannelClip{{clip.samples}, clip.sample_rate});
}

void write_wav16_file(const std::filesystem::path& path, const AudioClip& clip) {
  auto bytes = encode_wav16(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioClip to_mono(const MultiChannelClip& clip) {
  if (clip.channels.empty()) throw Error(ErrorKind::DecodeError, "clip has no channels");
  if (clip.channels.size() > 2) {
    throw Error(ErrorKind::UnsupportedFormat,
                std::to_string(clip.channels.size()) + " channels; at most 2 supported");
  }
  if (clip.channels.size() == 1) return AudioClip{clip.channels[0], clip.sample_rate};

  const auto& left = clip.channels[0];
  const auto& right = clip.channels[1];
  AudioClip mono{std::vector<double>(left.size()), clip.sample_rate};
  for (std::size_t i = 0; i < left.size(); ++i) mono.samples[i] = 0.5 * (left[i] + right[i]);
  return mono;
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw Error(ErrorKind::DomainError, "target rate must be positive");
  if (clip.sample_rate <= 0) throw Error(ErrorKind::DomainError, "source rate must be positive");
  if (target_rate == clip.sample_rate) return clip;

  const std::size_t n_in = clip.samples.size();
  if (n_in == 0) return AudioClip{{}, target_rate};
  const double ratio = static_cast<double>(clip.sample_rate) / target_rate;
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * target_rate / clip.sample_rate));

  AudioClip out{std::vector<double>(n_out), target_rate};
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto idx = static_cast<std::size_t>(pos);
    if (idx + 1 >= n_in) {
      out.samples[i] = clip.samples[n_in - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(idx);
    out.samples[i] = clip.samples[idx] + frac * (clip.samples[idx + 1] - clip.samples[idx]);
  }
  return out;
}

AudioClip extract_segment(const AudioClip& clip, double start_s, double dur_s) {
  if (!(dur_s > 0.0)) throw Error(ErrorKind::DomainError, "segment duration must be positive");
  if (start_s < 0.0) throw Error(ErrorKind::DomainError, "segment start must be non-negative");

  const auto length = static_cast<std::size_t>(std::llround(dur_s * clip.sample_rate));
  const std::size_t total = clip.samples.size();
  if (total < length) {
    throw Error(ErrorKind::InsufficientAudio,
                "track lasts " + std::to_string(clip.duration_s()) + " s, need " +
                    std::to_string(dur_s) + " s");
  }
  auto start = static_cast<std::size_t>(std::llround(start_s * clip.sample_rate));
  start = std::min(start, total - length);

  AudioClip seg{std::vector<double>(clip.samples.begin() + static_cast<std::ptrdiff_t>(start),
                                    clip.samples.begin() + static_cast<std::ptrdiff_t>(start + length)),
                clip.sample_rate};
  return seg;
}

}  // namespace tunefp
