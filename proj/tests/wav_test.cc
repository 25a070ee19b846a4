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

#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <string>

#include "oafuse/error.h"
#include "oafuse/signal.h"
#include "test_util.h"

namespace oafuse {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

template <class T>
void Put(std::string *out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

// Hand-built RIFF file with a plain 16-byte fmt chunk.
std::string MakeWav(uint16_t format, uint16_t channels, uint32_t rate,
                    uint16_t bits, const std::string &payload) {
  std::string fmt;
  Put<uint16_t>(&fmt, format);
  Put<uint16_t>(&fmt, channels);
  Put<uint32_t>(&fmt, rate);
  Put<uint32_t>(&fmt, rate * channels * bits / 8);
  Put<uint16_t>(&fmt, channels * bits / 8);
  Put<uint16_t>(&fmt, bits);
  std::string out = "RIFF";
  Put<uint32_t>(&out, 4 + 8 + 16 + 8 + payload.size());
  out += "WAVE";
  out += "fmt ";
  Put<uint32_t>(&out, 16);
  out += fmt;
  out += "data";
  Put<uint32_t>(&out, payload.size());
  out += payload;
  return out;
}

WavError::Kind ErrorKind(const std::filesystem::path &p) {
  try {
    LoadWav(p);
  } catch (const WavError &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << p;
  return WavError::Kind::kIo;
}

TEST(WavTest, Pcm16Decode) {
  TempDir dir;
  std::string payload;
  Put<int16_t>(&payload, 16384);
  Put<int16_t>(&payload, -32768);
  WriteFile(dir / "a.wav", MakeWav(1, 1, 16000, 16, payload));
  auto w = LoadWav(dir / "a.wav");
  EXPECT_EQ(w.sample_rate_hz(), 16000);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.samples()[0], 0.5f);
  EXPECT_EQ(w.samples()[1], -1.0f);
}

TEST(WavTest, Float32Decode) {
  TempDir dir;
  std::string payload;
  Put<float>(&payload, 0.25f);
  WriteFile(dir / "a.wav", MakeWav(3, 1, 8000, 32, payload));
  auto w = LoadWav(dir / "a.wav");
  EXPECT_EQ(w.sample_rate_hz(), 8000);
  EXPECT_EQ(w.samples(), std::vector<float>{0.25f});
}

TEST(WavTest, StereoRejected) {
  TempDir dir;
  std::string payload(8, '\0');
  WriteFile(dir / "s.wav", MakeWav(1, 2, 16000, 16, payload));
  try {
    LoadWav(dir / "s.wav");
    FAIL();
  } catch (const WavError &e) {
    EXPECT_EQ(e.kind(), WavError::Kind::kChannelCount);
    EXPECT_NE(std::string(e.what()).find("channel count unsupported"),
              std::string::npos);
  }
}

TEST(WavTest, DistinctErrorKinds) {
  TempDir dir;
  WriteFile(dir / "u8.wav", MakeWav(1, 1, 16000, 8, "abcd"));
  EXPECT_EQ(ErrorKind(dir / "u8.wav"), WavError::Kind::kUnsupportedEncoding);
  WriteFile(dir / "alaw.wav", MakeWav(6, 1, 16000, 16, "abcd"));
  EXPECT_EQ(ErrorKind(dir / "alaw.wav"),
            WavError::Kind::kUnsupportedEncoding);

  std::string full = MakeWav(1, 1, 16000, 16, std::string(100, '\0'));
  WriteFile(dir / "trunc.wav", full.substr(0, full.size() - 10));
  EXPECT_EQ(ErrorKind(dir / "trunc.wav"), WavError::Kind::kTruncated);
  WriteFile(dir / "short.wav", "RIFF");
  EXPECT_EQ(ErrorKind(dir / "short.wav"), WavError::Kind::kTruncated);

  WriteFile(dir / "junk.wav", std::string(64, 'x'));
  EXPECT_EQ(ErrorKind(dir / "junk.wav"), WavError::Kind::kNotRiffWave);
  EXPECT_EQ(ErrorKind(dir / "missing.wav"), WavError::Kind::kIo);
}

TEST(WavTest, SkipsUnknownChunks) {
  TempDir dir;
  std::string payload;
  Put<float>(&payload, -0.5f);
  std::string wav = MakeWav(3, 1, 16000, 32, payload);
  std::string list = "LIST";
  Put<uint32_t>(&list, 3);
  list += "abc";
  list += '\0';  // pad byte
  wav.insert(12, list);
  WriteFile(dir / "l.wav", wav);
  EXPECT_EQ(LoadWav(dir / "l.wav").samples(), std::vector<float>{-0.5f});
}

TEST(WavTest, Float32RoundTripExact) {
  TempDir dir;
  Waveform w(16000, {0.1f, -0.2f});
  SaveWav(w, dir / "f.wav", WavEncoding::kFloat32);
  EXPECT_EQ(LoadWav(dir / "f.wav"), w);
}

TEST(WavTest, Pcm16RoundTripWithinOneCode) {
  TempDir dir;
  Waveform w(22050, {0.5f, -0.3f, 0.123456f, -1.0f});
  SaveWav(w, dir / "p.wav", WavEncoding::kPcm16);
  auto r = LoadWav(dir / "p.wav");
  ASSERT_EQ(r.size(), w.size());
  EXPECT_EQ(r.sample_rate_hz(), 22050);
  for (std::size_t i = 0; i != w.size(); ++i) {
    EXPECT_NEAR(r.samples()[i], w.samples()[i], 1.0 / 32768.0);
  }
  EXPECT_EQ(r.samples()[0], 0.5f);
}

TEST(WavTest, Pcm16Clamps) {
  TempDir dir;
  SaveWav(Waveform(16000, {1.5f, -2.0f}), dir / "c.wav", WavEncoding::kPcm16);
  auto r = LoadWav(dir / "c.wav");
  EXPECT_EQ(r.samples()[0], static_cast<float>(32767 / 32768.0));
  EXPECT_NEAR(r.samples()[0], 0.99997, 1e-5);
  EXPECT_EQ(r.samples()[1], -1.0f);
}

TEST(WavTest, SaveIsDeterministic) {
  TempDir dir;
  Waveform w(16000, {0.1f, 0.2f, 0.3f});
  SaveWav(w, dir / "a.wav", WavEncoding::kFloat32);
  SaveWav(w, dir / "b.wav", WavEncoding::kFloat32);
  EXPECT_EQ(ReadFile(dir / "a.wav"), ReadFile(dir / "b.wav"));
  EXPECT_EQ(ReadFile(dir / "a.wav").size(), 44u + 12u);
}

TEST(WavTest, UnwritablePath) {
  EXPECT_THROW(SaveWav(Waveform(16000, {0.0f}),
                       "/nonexistent_dir/x/y.wav", WavEncoding::kFloat32),
               WavError);
}

}  // namespace
}  // namespace oafuse
