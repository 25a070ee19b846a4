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

#ifndef OAFUSE_SIGNAL_H_
#define OAFUSE_SIGNAL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace oafuse {

// Mono audio. Amplitudes are nominally in [-1, 1] but never clamped.
class Waveform {
 public:
  Waveform() = default;
  // Throws InvalidArgument on a non-positive rate or a non-finite sample.
  Waveform(int32_t sample_rate_hz, std::vector<float> samples);

  int32_t sample_rate_hz() const { return sample_rate_hz_; }
  const std::vector<float> &samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  friend bool operator==(const Waveform &, const Waveform &) = default;

 private:
  int32_t sample_rate_hz_ = 16000;
  std::vector<float> samples_;
};

struct ScalarWeight {
  double value = 0.5;
};

struct FrameWeights {
  std::vector<double> values;
  int32_t hop_samples = 0;
};

// S' of the observation-addition rule: a scalar, or one value per frame.
using FusionWeight = std::variant<ScalarWeight, FrameWeights>;

// Throws InvalidArgument if any weight leaves [0,1] or a frame vector is
// empty / has a non-positive hop.
void ValidateFusionWeight(const FusionWeight &w);

// Mean of the weight values (the scalar itself for ScalarWeight).
double MeanWeight(const FusionWeight &w);

enum class WavEncoding { kPcm16, kFloat32 };

// Reads a mono RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float.
// 16-bit codes are scaled by 1/32768. Throws WavError.
Waveform LoadWav(const std::filesystem::path &path);

// 16-bit output rounds to nearest and clamps to [-32768, 32767].
void SaveWav(const Waveform &w, const std::filesystem::path &path,
             WavEncoding encoding);

inline constexpr double kDefaultMaxLenMismatchRatio = 0.005;

// Trims both signals to the shorter length. The relative mismatch is
// |len_a - len_b| / max(len_a, len_b). No resampling is ever done.
std::pair<Waveform, Waveform> AlignPair(
    const Waveform &noisy, const Waveform &enhanced,
    double max_len_mismatch_ratio = kDefaultMaxLenMismatchRatio);

// out[i] = s * noisy[i] + (1 - s) * enhanced[i]
Waveform FuseUtterance(const Waveform &noisy, const Waveform &enhanced,
                       double s);

// Sample i takes weights[min(i / hop, size - 1)].
std::vector<double> ExpandFrameWeights(std::span<const double> weights,
                                       int32_t hop_samples,
                                       std::size_t num_samples);

Waveform FuseFrames(const Waveform &noisy, const Waveform &enhanced,
                    std::span<const double> weights, int32_t hop_samples);

// Dispatches on the FusionWeight variant.
Waveform Fuse(const Waveform &noisy, const Waveform &enhanced,
              const FusionWeight &weight);

}  // namespace oafuse

#endif  // OAFUSE_SIGNAL_H_
