#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "ganterp/audio.hpp"
#include "ganterp/error.hpp"

namespace ganterp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

struct WavFormat {
  std::uint16_t code = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

[[noreturn]] void unsupported(const std::string& why) {
  throw Error(ErrorCode::kUnsupportedFormat, why);
}

WavFormat parse_fmt(std::span<const unsigned char> chunk) {
  if (chunk.size() < 16) unsupported("fmt chunk shorter than 16 bytes");
  WavFormat fmt;
  fmt.code = read_u16(chunk.data());
  fmt.channels = read_u16(chunk.data() + 2);
  fmt.sample_rate = read_u32(chunk.data() + 4);
  fmt.bits = read_u16(chunk.data() + 14);
  if (fmt.code == kFormatExtensible) {
    // WAVEFORMATEXTENSIBLE: the sub-format GUID starts with the real code.
    if (chunk.size() < 40) unsupported("truncated WAVE_FORMAT_EXTENSIBLE header");
    fmt.code = read_u16(chunk.data() + 24);
  }
  if (fmt.code != kFormatPcm && fmt.code != kFormatFloat) {
    unsupported("compression code " + std::to_string(fmt.code) + " (only 1 and 3 are supported)");
  }
  if (fmt.code == kFormatPcm && fmt.bits != 16) {
    unsupported("PCM bit depth " + std::to_string(fmt.bits) + " (only 16 is supported)");
  }
  if (fmt.code == kFormatFloat && fmt.bits != 32) {
    unsupported("float bit depth " + std::to_string(fmt.bits) + " (only 32 is supported)");
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    unsupported(std::to_string(fmt.channels) + " channels (only mono and stereo are supported)");
  }
  if (fmt.sample_rate == 0 || fmt.sample_rate > 0x7FFFFFFF) unsupported("invalid sample rate");
  return fmt;
}

double decode_sample(const WavFormat& fmt, const unsigned char* p) {
  if (fmt.code == kFormatPcm) {
    return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
  }
  const std::uint32_t bits = read_u32(p);
  float value;
  std::memcpy(&value, &bits, sizeof value);
  if (!std::isfinite(value)) unsupported("non-finite float sample");
  return std::clamp(static_cast<double>(value), -1.0, 1.0);
}

}  // namespace

void AudioBuffer::validate() const {
  if (sample_rate <= 0) throw Error(ErrorCode::kInvalidArgument, "sample_rate must be positive");
  if (samples.empty()) throw Error(ErrorCode::kEmptyAudio, "audio buffer has no samples");
  for (double s : samples) {
    if (!std::isfinite(s) || s < -1.0 || s > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "audio samples must be finite and within [-1, 1]");
    }
  }
}

AudioBuffer decode_wav_bytes(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    unsupported("not a RIFF/WAVE file");
  }

  std::optional<WavFormat> fmt;
  std::optional<std::span<const unsigned char>> data;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* header = bytes.data() + pos;
    const std::size_t declared = read_u32(header + 4);
    const std::size_t body = pos + 8;
    // Writers that stream often leave the size unset; clamp to what is present.
    const std::size_t size = std::min(declared, bytes.size() - body);
    auto chunk = bytes.subspan(body, size);
    if (std::memcmp(header, "fmt ", 4) == 0) {
      fmt = parse_fmt(chunk);
    } else if (std::memcmp(header, "data", 4) == 0) {
      data = chunk;
    }
    pos = body + size + (size & 1);
  }

  if (!fmt) unsupported("missing fmt chunk");
  if (!data) unsupported("missing data chunk");

  const std::size_t bytes_per_sample = fmt->bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt->channels;
  const std::size_t frames = data->size() / frame_bytes;
  if (frames == 0) throw Error(ErrorCode::kEmptyAudio, "WAV file contains zero sample frames");

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(fmt->sample_rate);
  audio.samples.resize(frames);
  const unsigned char* p = data->data();
  for (std::size_t i = 0; i < frames; ++i, p += frame_bytes) {
    if (fmt->channels == 1) {
      audio.samples[i] = decode_sample(*fmt, p);
    } else {
      audio.samples[i] = (decode_sample(*fmt, p) + decode_sample(*fmt, p + bytes_per_sample)) / 2.0;
    }
  }
  return audio;
}

AudioBuffer decode_audio(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, "audio file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open audio file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav_bytes(bytes);
}

}  // namespace ganterp
