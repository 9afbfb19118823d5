#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "soundkit/error.hpp"
#include "soundkit/parsers.hpp"

namespace soundkit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void media_error(const std::string& what) { fail(ErrorKind::media, what); }

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

Format read_fmt(const unsigned char* p, std::uint32_t size) {
  if (size < 16) media_error("fmt chunk too short");
  Format f;
  f.tag = le16(p);
  f.channels = le16(p + 2);
  f.sample_rate = le32(p + 4);
  f.block_align = le16(p + 12);
  f.bits = le16(p + 14);
  if (f.tag == kFormatExtensible) {
    if (size < 40) media_error("extensible fmt chunk too short");
    // The sub-format GUID starts with the plain codec tag.
    f.tag = le16(p + 24);
  }
  if (f.tag != kFormatPcm && f.tag != kFormatFloat) {
    media_error("unsupported codec tag " + std::to_string(f.tag));
  }
  if (f.channels == 0) media_error("zero channels");
  if (f.sample_rate == 0) media_error("zero sample rate");
  const bool pcm_ok = f.tag == kFormatPcm && (f.bits == 8 || f.bits == 16 || f.bits == 24);
  const bool float_ok = f.tag == kFormatFloat && f.bits == 32;
  if (!pcm_ok && !float_ok) media_error("unsupported sample width " + std::to_string(f.bits));
  if (f.block_align != f.channels * (f.bits / 8)) media_error("inconsistent block alignment");
  return f;
}

float decode_sample(const unsigned char* p, const Format& f) {
  switch (f.bits) {
    case 8:
      return static_cast<float>(static_cast<int>(p[0]) - 128) / 128.0f;
    case 16:
      return static_cast<float>(static_cast<std::int16_t>(le16(p))) / 32768.0f;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<float>(v) / 8388608.0f;
    }
    default: {
      float v = 0.0f;
      const std::uint32_t bits = le32(p);
      std::memcpy(&v, &bits, sizeof v);
      if (!std::isfinite(v)) media_error("non-finite float sample");
      return std::clamp(v, -1.0f, 1.0f);
    }
  }
}

}  // namespace

AudioBuffer load_audio(std::string_view bytes) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
    media_error("not a RIFF/WAVE file");
  }

  std::optional<Format> format;
  const unsigned char* samples = nullptr;
  std::size_t sample_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const auto* chunk = data + pos;
    const std::uint32_t chunk_size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = size - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size > available) media_error("truncated fmt chunk");
      format = read_fmt(data + body, chunk_size);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!format) media_error("data chunk before fmt chunk");
      if (chunk_size > available) media_error("truncated data chunk");
      samples = data + body;
      sample_bytes = chunk_size;
      break;
    }
    if (chunk_size > available) break;
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!format) media_error("missing fmt chunk");
  if (samples == nullptr) media_error("missing data chunk");
  if (sample_bytes % format->block_align != 0) media_error("truncated data chunk");

  const std::size_t frames = sample_bytes / format->block_align;
  const std::size_t width = format->bits / 8u;
  std::vector<std::vector<float>> channels(format->channels, std::vector<float>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    const auto* frame = samples + i * format->block_align;
    for (std::size_t c = 0; c < format->channels; ++c) {
      channels[c][i] = decode_sample(frame + c * width, *format);
    }
  }
  return AudioBuffer(format->sample_rate, std::move(channels));
}

}  // namespace soundkit
