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

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

bool InUnitInterval(double v) { return v >= 0.0 && v <= 1.0; }

void CheckAligned(const Waveform &a, const Waveform &b) {
  if (a.sample_rate_hz() != b.sample_rate_hz() || a.size() != b.size()) {
    throw InvalidArgument(fmt::format(
        "unaligned inputs: {} samples @ {} Hz vs {} samples @ {} Hz", a.size(),
        a.sample_rate_hz(), b.size(), b.sample_rate_hz()));
  }
}

// One sample of s * y + (1 - s) * x. The pair of weights is derived from
// whichever of s, 1 - s is >= 0.5 so that Mix(y, x, s) == Mix(x, y, 1 - s)
// holds bit-for-bit; the endpoints return an input sample unchanged.
inline float Mix(float y, float x, double s) {
  if (s == 1.0) return y;
  if (s == 0.0) return x;
  double wy, wx;
  if (s >= 0.5) {
    wy = s;
    wx = 1.0 - s;
  } else {
    wx = 1.0 - s;
    wy = 1.0 - wx;
  }
  return static_cast<float>(wy * y + wx * x);
}

}  // namespace

Waveform::Waveform(int32_t sample_rate_hz, std::vector<float> samples)
    : sample_rate_hz_(sample_rate_hz), samples_(std::move(samples)) {
  if (sample_rate_hz_ <= 0) {
    throw InvalidArgument(
        fmt::format("sample rate must be positive, got {}", sample_rate_hz_));
  }
  for (std::size_t i = 0; i != samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InvalidArgument(fmt::format("non-finite sample at index {}", i));
    }
  }
}

void ValidateFusionWeight(const FusionWeight &w) {
  if (const auto *s = std::get_if<ScalarWeight>(&w)) {
    if (!InUnitInterval(s->value)) {
      throw InvalidArgument(
          fmt::format("fusion weight {} outside [0,1]", s->value));
    }
    return;
  }
  const auto &f = std::get<FrameWeights>(w);
  if (f.values.empty()) throw InvalidArgument("frame weights are empty");
  if (f.hop_samples <= 0) {
    throw InvalidArgument(
        fmt::format("hop_samples must be positive, got {}", f.hop_samples));
  }
  for (double v : f.values) {
    if (!InUnitInterval(v)) {
      throw InvalidArgument(fmt::format("frame weight {} outside [0,1]", v));
    }
  }
}

double MeanWeight(const FusionWeight &w) {
  if (const auto *s = std::get_if<ScalarWeight>(&w)) return s->value;
  const auto &f = std::get<FrameWeights>(w);
  if (f.values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum / static_cast<double>(f.values.size());
}

std::pair<Waveform, Waveform> AlignPair(const Waveform &noisy,
                                        const Waveform &enhanced,
                                        double max_len_mismatch_ratio) {
  if (noisy.sample_rate_hz() != enhanced.sample_rate_hz()) {
    throw InvalidArgument(fmt::format("sample-rate mismatch: {} Hz vs {} Hz",
                                      noisy.sample_rate_hz(),
                                      enhanced.sample_rate_hz()));
  }
  std::size_t a = noisy.size(), b = enhanced.size();
  if (a == b) return {noisy, enhanced};

  std::size_t longer = std::max(a, b), shorter = std::min(a, b);
  double ratio = static_cast<double>(longer - shorter) / longer;
  if (ratio > max_len_mismatch_ratio) {
    throw InvalidArgument(fmt::format(
        "length mismatch: {} vs {} samples (ratio {:.4f} > {})", a, b, ratio,
        max_len_mismatch_ratio));
  }
  auto trim = [shorter](const Waveform &w) {
    std::vector<float> s(w.samples().begin(),
                         w.samples().begin() + static_cast<long>(shorter));
    return Waveform(w.sample_rate_hz(), std::move(s));
  };
  return {trim(noisy), trim(enhanced)};
}

Waveform FuseUtterance(const Waveform &noisy, const Waveform &enhanced,
                       double s) {
  if (!InUnitInterval(s)) {
    throw InvalidArgument(fmt::format("fusion weight {} outside [0,1]", s));
  }
  CheckAligned(noisy, enhanced);
  const auto &y = noisy.samples();
  const auto &x = enhanced.samples();
  std::vector<float> out(y.size());
  for (std::size_t i = 0; i != y.size(); ++i) out[i] = Mix(y[i], x[i], s);
  return Waveform(noisy.sample_rate_hz(), std::move(out));
}

std::vector<double> ExpandFrameWeights(std::span<const double> weights,
                                       int32_t hop_samples,
                                       std::size_t num_samples) {
  if (weights.empty()) throw InvalidArgument("frame weights are empty");
  if (hop_samples <= 0) {
    throw InvalidArgument(
        fmt::format("hop_samples must be positive, got {}", hop_samples));
  }
  std::vector<double> out(num_samples);
  const std::size_t hop = static_cast<std::size_t>(hop_samples);
  for (std::size_t i = 0; i != num_samples; ++i) {
    out[i] = weights[std::min(i / hop, weights.size() - 1)];
  }
  return out;
}

Waveform FuseFrames(const Waveform &noisy, const Waveform &enhanced,
                    std::span<const double> weights, int32_t hop_samples) {
  ValidateFusionWeight(FrameWeights{{weights.begin(), weights.end()},
                                    hop_samples});
  CheckAligned(noisy, enhanced);
  auto per_sample = ExpandFrameWeights(weights, hop_samples, noisy.size());
  const auto &y = noisy.samples();
  const auto &x = enhanced.samples();
  std::vector<float> out(y.size());
  for (std::size_t i = 0; i != y.size(); ++i) {
    out[i] = Mix(y[i], x[i], per_sample[i]);
  }
  return Waveform(noisy.sample_rate_hz(), std::move(out));
}

Waveform Fuse(const Waveform &noisy, const Waveform &enhanced,
              const FusionWeight &weight) {
  if (const auto *s = std::get_if<ScalarWeight>(&weight)) {
    return FuseUtterance(noisy, enhanced, s->value);
  }
  const auto &f = std::get<FrameWeights>(weight);
  return FuseFrames(noisy, enhanced, f.values, f.hop_samples);
}

}  // namespace oafuse
