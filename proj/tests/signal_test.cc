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

#include "oafuse/signal.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "oafuse/error.h"
#include "test_util.h"

namespace oafuse {
namespace {

using testing::RandomWave;

Waveform W(std::vector<float> s, int32_t rate = 16000) {
  return Waveform(rate, std::move(s));
}

bool BitEqual(const Waveform &a, const Waveform &b) {
  return a.sample_rate_hz() == b.sample_rate_hz() && a.size() == b.size() &&
         std::memcmp(a.samples().data(), b.samples().data(),
                     a.size() * sizeof(float)) == 0;
}

TEST(WaveformTest, RejectsBadRateAndNonFinite) {
  EXPECT_THROW(W({0.0f}, 0), InvalidArgument);
  EXPECT_THROW(W({0.0f}, -8000), InvalidArgument);
  EXPECT_THROW(W({std::numeric_limits<float>::quiet_NaN()}), InvalidArgument);
  EXPECT_THROW(W({std::numeric_limits<float>::infinity()}), InvalidArgument);
  EXPECT_NO_THROW(W({}));
  EXPECT_NO_THROW(W({2.5f, -3.0f}));  // amplitudes are not clamped
}

TEST(FusionWeightTest, Validation) {
  EXPECT_NO_THROW(ValidateFusionWeight(ScalarWeight{0.0}));
  EXPECT_NO_THROW(ValidateFusionWeight(ScalarWeight{1.0}));
  EXPECT_THROW(ValidateFusionWeight(ScalarWeight{1.01}), InvalidArgument);
  EXPECT_THROW(ValidateFusionWeight(ScalarWeight{-0.1}), InvalidArgument);
  EXPECT_THROW(ValidateFusionWeight(FrameWeights{{}, 320}), InvalidArgument);
  EXPECT_THROW(ValidateFusionWeight(FrameWeights{{0.5}, 0}), InvalidArgument);
  EXPECT_THROW(ValidateFusionWeight(FrameWeights{{0.5, 2.0}, 320}),
               InvalidArgument);
  EXPECT_DOUBLE_EQ(MeanWeight(FrameWeights{{0.2, 0.4}, 2}), 0.3);
  EXPECT_DOUBLE_EQ(MeanWeight(ScalarWeight{0.7}), 0.7);
}

TEST(AlignPairTest, EqualLengthsUnchanged) {
  auto y = W(std::vector<float>(16000, 0.1f));
  auto x = W(std::vector<float>(16000, 0.2f));
  auto [a, b] = AlignPair(y, x);
  EXPECT_EQ(a, y);
  EXPECT_EQ(b, x);
}

TEST(AlignPairTest, TrimsToShorter) {
  auto y = W(std::vector<float>(16000, 0.1f));
  auto x = W(std::vector<float>(16010, 0.2f));
  auto [a, b] = AlignPair(y, x);
  EXPECT_EQ(a.size(), 16000u);
  EXPECT_EQ(b.size(), 16000u);
  auto [c, d] = AlignPair(x, y);
  EXPECT_EQ(c.size(), 16000u);
  EXPECT_EQ(d.size(), 16000u);
}

TEST(AlignPairTest, LengthMismatchError) {
  auto y = W(std::vector<float>(16000));
  auto x = W(std::vector<float>(20000));
  try {
    AlignPair(y, x, 0.005);
    FAIL() << "expected an error";
  } catch (const InvalidArgument &e) {
    EXPECT_NE(std::string(e.what()).find("length mismatch"), std::string::npos);
  }
}

TEST(AlignPairTest, RateMismatchError) {
  EXPECT_THROW(AlignPair(W({0.0f}, 16000), W({0.0f}, 8000)), InvalidArgument);
}

TEST(FuseUtteranceTest, Endpoints) {
  std::mt19937_64 rng(1);
  auto y = RandomWave(rng, 1000);
  auto x = RandomWave(rng, 1000);
  EXPECT_TRUE(BitEqual(FuseUtterance(y, x, 1.0), y));
  EXPECT_TRUE(BitEqual(FuseUtterance(y, x, 0.0), x));
}

TEST(FuseUtteranceTest, Midpoint) {
  auto out = FuseUtterance(W({1.0f, 1.0f}), W({0.0f, 0.0f}), 0.5);
  EXPECT_EQ(out.samples(), (std::vector<float>{0.5f, 0.5f}));
}

TEST(FuseUtteranceTest, Errors) {
  EXPECT_THROW(FuseUtterance(W({1.0f}), W({0.0f}), 1.5), InvalidArgument);
  EXPECT_THROW(FuseUtterance(W({1.0f}), W({0.0f}), -0.5), InvalidArgument);
  EXPECT_THROW(FuseUtterance(W({1.0f}), W({0.0f, 0.0f}), 0.5),
               InvalidArgument);
  EXPECT_THROW(FuseUtterance(W({1.0f}, 16000), W({0.0f}, 8000), 0.5),
               InvalidArgument);
}

TEST(ExpandFrameWeightsTest, Examples) {
  std::vector<double> a = {0.2, 0.8};
  EXPECT_EQ(ExpandFrameWeights(a, 2, 4),
            (std::vector<double>{0.2, 0.2, 0.8, 0.8}));
  std::vector<double> b = {0.5};
  EXPECT_EQ(ExpandFrameWeights(b, 3, 5), std::vector<double>(5, 0.5));
  std::vector<double> c = {0.1, 0.9};
  EXPECT_EQ(ExpandFrameWeights(c, 2, 5),
            (std::vector<double>{0.1, 0.1, 0.9, 0.9, 0.9}));
  EXPECT_THROW(ExpandFrameWeights({}, 2, 5), InvalidArgument);
  EXPECT_THROW(ExpandFrameWeights(c, 0, 5), InvalidArgument);
}

TEST(FuseFramesTest, ConstantVectorMatchesUtterance) {
  std::mt19937_64 rng(2);
  auto y = RandomWave(rng, 960);
  auto x = RandomWave(rng, 960);
  std::vector<double> w(3, 0.3);
  EXPECT_TRUE(BitEqual(FuseFrames(y, x, w, 320), FuseUtterance(y, x, 0.3)));
}

TEST(FuseFramesTest, HardFrames) {
  auto y = W({1.0f, 2.0f, 3.0f, 4.0f});
  auto x = W({-1.0f, -2.0f, -3.0f, -4.0f});
  std::vector<double> w = {1.0, 0.0};
  EXPECT_EQ(FuseFrames(y, x, w, 2).samples(),
            (std::vector<float>{1.0f, 2.0f, -3.0f, -4.0f}));
}

TEST(FuseFramesTest, RandomMatchesPerSampleLoop) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto y = RandomWave(rng, 10 * 37 + 5);
  auto x = RandomWave(rng, y.size());
  std::vector<double> w(10);
  for (double &v : w) v = u(rng);
  auto fused = FuseFrames(y, x, w, 37);
  for (std::size_t i = 0; i != y.size(); ++i) {
    double s = w[std::min<std::size_t>(i / 37, w.size() - 1)];
    auto single = FuseUtterance(W({y.samples()[i]}), W({x.samples()[i]}), s);
    EXPECT_EQ(fused.samples()[i], single.samples()[0]) << "sample " << i;
  }
}

TEST(FuseTest, DispatchesOnVariant) {
  std::mt19937_64 rng(4);
  auto y = RandomWave(rng, 100);
  auto x = RandomWave(rng, 100);
  EXPECT_EQ(Fuse(y, x, ScalarWeight{0.25}), FuseUtterance(y, x, 0.25));
  std::vector<double> w = {0.1, 0.9};
  EXPECT_EQ(Fuse(y, x, FrameWeights{w, 50}), FuseFrames(y, x, w, 50));
}

// Properties over random pairs and weights.

TEST(FusionPropertyTest, OutputBetweenInputs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto y = RandomWave(rng, 64);
    auto x = RandomWave(rng, 64);
    double s = u(rng);
    auto f = FuseUtterance(y, x, s);
    for (std::size_t i = 0; i != f.size(); ++i) {
      float lo = std::min(y.samples()[i], x.samples()[i]);
      float hi = std::max(y.samples()[i], x.samples()[i]);
      ASSERT_LE(lo, f.samples()[i]);
      ASSERT_GE(hi, f.samples()[i]);
    }
  }
}

TEST(FusionPropertyTest, Symmetry) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto y = RandomWave(rng, 64);
    auto x = RandomWave(rng, 64);
    double s = u(rng);
    ASSERT_TRUE(BitEqual(FuseUtterance(y, x, s), FuseUtterance(x, y, 1.0 - s)))
        << "s=" << s;
  }
}

TEST(FusionPropertyTest, ConstantFramesEqualUtterance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 2000), hop(1, 400);
  for (int trial = 0; trial < 100; ++trial) {
    auto y = RandomWave(rng, len(rng));
    auto x = RandomWave(rng, y.size());
    double s = u(rng);
    int h = hop(rng);
    std::vector<double> w(y.size() / h + 1, s);
    ASSERT_TRUE(BitEqual(FuseFrames(y, x, w, h), FuseUtterance(y, x, s)));
  }
}

}  // namespace
}  // namespace oafuse
