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

#include "oafuse/posterior.h"

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "oafuse/error.h"
#include "test_util.h"

namespace oafuse {
namespace {

using testing::TempDir;

PosteriorMatrix Small() {
  return PosteriorMatrix(2, 3, {0.2f, 0.3f, 0.5f, 0.9f, 0.05f, 0.05f}, 2);
}

BackendError::Kind DecodeErrorKind(const std::string &bytes) {
  try {
    DecodePosterior(bytes);
  } catch (const BackendError &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return BackendError::Kind::kTransport;
}

TEST(PosteriorMatrixTest, Construction) {
  auto m = Small();
  EXPECT_EQ(m.num_frames(), 2);
  EXPECT_EQ(m.num_classes(), 3);
  EXPECT_EQ(m.blank_id(), 2);
  EXPECT_EQ(m.Row(1)[0], 0.9f);
  EXPECT_EQ(m.Argmax(0), 2);
  EXPECT_EQ(m.Argmax(1), 0);
}

TEST(PosteriorMatrixTest, RejectsInvalid) {
  EXPECT_THROW(PosteriorMatrix(0, 2, {}), InvalidArgument);
  EXPECT_THROW(PosteriorMatrix(1, 1, {1.0f}), InvalidArgument);
  EXPECT_THROW(PosteriorMatrix(1, 2, {1.0f}), InvalidArgument);
  EXPECT_THROW(PosteriorMatrix(1, 2, {1.5f, -0.5f}), InvalidArgument);
  EXPECT_THROW(PosteriorMatrix(1, 2, {0.7f, 0.7f}), InvalidArgument);
  EXPECT_THROW(PosteriorMatrix(1, 2, {0.5f, 0.5f}, 2), InvalidArgument);
  EXPECT_THROW(PosteriorMatrix(1, 2, {0.5f, 0.5f}, -1), InvalidArgument);
}

TEST(PosteriorMatrixTest, RenormalizesWithinTolerance) {
  PosteriorMatrix m(1, 2, {0.6004f, 0.4f});
  EXPECT_NEAR(m.Row(0)[0] + m.Row(0)[1], 1.0, 1e-6);
  EXPECT_NEAR(m.Row(0)[0], 0.6004 / 1.0004, 1e-6);
}

TEST(PosteriorMatrixTest, ArgmaxTiesPickLowestIndex) {
  PosteriorMatrix m(1, 4, {0.1f, 0.4f, 0.1f, 0.4f});
  EXPECT_EQ(m.Argmax(0), 1);
}

TEST(PosteriorCodecTest, LayoutAndRoundTrip) {
  auto m = Small();
  auto bytes = EncodePosterior(m);
  ASSERT_EQ(bytes.size(), 16u + 2 * 3 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "OAPM");
  uint32_t version, t, v;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&t, bytes.data() + 8, 4);
  std::memcpy(&v, bytes.data() + 12, 4);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(t, 2u);
  EXPECT_EQ(v, 3u);
  float first;
  std::memcpy(&first, bytes.data() + 16, 4);
  EXPECT_EQ(first, 0.2f);
  EXPECT_EQ(DecodePosterior(bytes, 2), m);
}

TEST(PosteriorCodecTest, AdapterSizedFile) {
  // T=100, V=32 -> 4+4+4+4+12800 bytes.
  std::mt19937_64 rng(9);
  std::vector<float> p;
  for (int t = 0; t < 100; ++t) {
    auto row = testing::RandomDistribution(rng, 32);
    for (double x : row) p.push_back(static_cast<float>(x));
  }
  PosteriorMatrix m(100, 32, p, 0);
  TempDir dir;
  WritePosterior(m, dir / "m.oapm");
  EXPECT_EQ(std::filesystem::file_size(dir / "m.oapm"), 12816u);
  auto r = ReadPosterior(dir / "m.oapm", 0);
  EXPECT_EQ(r, m);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(r.Argmax(t), m.Argmax(t));
}

TEST(PosteriorCodecTest, CorruptInputs) {
  auto good = EncodePosterior(Small());
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  try {
    DecodePosterior(bad_magic);
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::kCorruptPosterior);
    EXPECT_NE(std::string(e.what()).find("corrupt posterior"),
              std::string::npos);
  }
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(DecodeErrorKind(bad_version),
            BackendError::Kind::kCorruptPosterior);
  EXPECT_EQ(DecodeErrorKind(good.substr(0, good.size() - 1)),
            BackendError::Kind::kCorruptPosterior);
  EXPECT_EQ(DecodeErrorKind(good + "x"), BackendError::Kind::kCorruptPosterior);
  EXPECT_EQ(DecodeErrorKind("OAP"), BackendError::Kind::kCorruptPosterior);

  // A row that does not sum to one.
  std::string bad_row = good;
  float big = 3.0f;
  std::memcpy(bad_row.data() + 16, &big, 4);
  EXPECT_EQ(DecodeErrorKind(bad_row), BackendError::Kind::kCorruptPosterior);
  EXPECT_THROW(ReadPosterior("/nonexistent/file.oapm"), BackendError);
}

}  // namespace
}  // namespace oafuse
