// Copyright (c) 2026 The oafuse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fmt/format.h"
#include "oafuse/error.h"
#include "oafuse/signal.h"

namespace oafuse {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t ReadU16(const char *p) {
  uint16_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

uint32_t ReadU32(const char *p) {
  uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

template <typename T>
void Put(std::string *out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

}  // namespace

Waveform LoadWav(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw WavError(WavError::Kind::kIo,
                   fmt::format("cannot open '{}'", path.string()));
  }
  std::string bytes((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < 12) {
    throw WavError(WavError::Kind::kTruncated,
                   fmt::format("'{}': truncated RIFF header", path.string()));
  }
  if (bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw WavError(WavError::Kind::kNotRiffWave,
                   fmt::format("'{}': not a RIFF/WAVE file", path.string()));
  }

  FmtChunk fmt_chunk;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (true) {
    if (pos + 8 > bytes.size()) {
      throw WavError(WavError::Kind::kTruncated,
                     fmt::format("'{}': missing data chunk", path.string()));
    }
    const char *hdr = bytes.data() + pos;
    std::string id(hdr, 4);
    uint32_t size = ReadU32(hdr + 4);
    pos += 8;

    if (id == "fmt ") {
      if (size < 16 || pos + size > bytes.size()) {
        throw WavError(WavError::Kind::kTruncated,
                       fmt::format("'{}': truncated fmt chunk", path.string()));
      }
      const char *p = bytes.data() + pos;
      fmt_chunk.format = ReadU16(p);
      fmt_chunk.channels = ReadU16(p + 2);
      fmt_chunk.sample_rate = ReadU32(p + 4);
      fmt_chunk.bits_per_sample = ReadU16(p + 14);
      if (fmt_chunk.format == kFormatExtensible && size >= 26) {
        // First two bytes of the sub-format GUID carry the real tag.
        fmt_chunk.format = ReadU16(p + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) {
        throw WavError(WavError::Kind::kNotRiffWave,
                       fmt::format("'{}': data before fmt", path.string()));
      }
      if (fmt_chunk.channels != 1) {
        throw WavError(
            WavError::Kind::kChannelCount,
            fmt::format("'{}': channel count unsupported ({} channels)",
                        path.string(), fmt_chunk.channels));
      }
      bool pcm16 =
          fmt_chunk.format == kFormatPcm && fmt_chunk.bits_per_sample == 16;
      bool f32 =
          fmt_chunk.format == kFormatFloat && fmt_chunk.bits_per_sample == 32;
      if (!pcm16 && !f32) {
        throw WavError(
            WavError::Kind::kUnsupportedEncoding,
            fmt::format("'{}': unsupported encoding (format {}, {} bits)",
                        path.string(), fmt_chunk.format,
                        fmt_chunk.bits_per_sample));
      }
      if (fmt_chunk.sample_rate == 0) {
        throw WavError(WavError::Kind::kNotRiffWave,
                       fmt::format("'{}': zero sample rate", path.string()));
      }
      std::size_t width = pcm16 ? 2 : 4;
      if (pos + size > bytes.size() || size % width != 0) {
        throw WavError(WavError::Kind::kTruncated,
                       fmt::format("'{}': truncated data chunk", path.string()));
      }
      std::size_t n = size / width;
      std::vector<float> samples(n);
      const char *p = bytes.data() + pos;
      for (std::size_t i = 0; i != n; ++i) {
        if (pcm16) {
          int16_t code;
          std::memcpy(&code, p + 2 * i, 2);
          samples[i] = static_cast<float>(code / 32768.0);
        } else {
          std::memcpy(&samples[i], p + 4 * i, 4);
        }
      }
      try {
        return Waveform(static_cast<int32_t>(fmt_chunk.sample_rate),
                        std::move(samples));
      } catch (const InvalidArgument &e) {
        throw WavError(WavError::Kind::kUnsupportedEncoding,
                       fmt::format("'{}': {}", path.string(), e.what()));
      }
    }
    pos += size + (size & 1);
  }
}

void SaveWav(const Waveform &w, const std::filesystem::path &path,
             WavEncoding encoding) {
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const uint16_t width = pcm16 ? 2 : 4;
  const uint32_t data_size = static_cast<uint32_t>(w.size() * width);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  Put<uint32_t>(&out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  Put<uint32_t>(&out, 16);
  Put<uint16_t>(&out, pcm16 ? kFormatPcm : kFormatFloat);
  Put<uint16_t>(&out, 1);
  Put<uint32_t>(&out, static_cast<uint32_t>(w.sample_rate_hz()));
  Put<uint32_t>(&out, static_cast<uint32_t>(w.sample_rate_hz()) * width);
  Put<uint16_t>(&out, width);
  Put<uint16_t>(&out, static_cast<uint16_t>(8 * width));
  out.append("data");
  Put<uint32_t>(&out, data_size);
  for (float x : w.samples()) {
    if (pcm16) {
      double code = std::nearbyint(static_cast<double>(x) * 32768.0);
      code = std::clamp(code, -32768.0, 32767.0);
      Put<int16_t>(&out, static_cast<int16_t>(code));
    } else {
      Put<float>(&out, x);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw WavError(WavError::Kind::kIo,
                   fmt::format("cannot write '{}'", path.string()));
  }
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) {
    throw WavError(WavError::Kind::kIo,
                   fmt::format("write failed for '{}'", path.string()));
  }
}

}  // namespace oafuse
