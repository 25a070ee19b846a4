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

#ifndef OAFUSE_POSTERIOR_H_
#define OAFUSE_POSTERIOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oafuse {

// T x V row-major matrix of per-frame class probabilities.
//
// Rows are checked on construction: entries must be finite and >= 0 and each
// row must sum to 1 within kRowSumTolerance. Rows off by more than
// kRenormalizeThreshold are rescaled to sum to one; rows already closer
// than that are kept bit-for-bit, so writing and re-reading a matrix is
// lossless.
class PosteriorMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-3;
  static constexpr double kRenormalizeThreshold = 1e-6;

  PosteriorMatrix() = default;
  // Throws InvalidArgument.
  PosteriorMatrix(int32_t num_frames, int32_t num_classes,
                  std::vector<float> probs,
                  std::optional<int32_t> blank_id = std::nullopt);

  int32_t num_frames() const { return num_frames_; }
  int32_t num_classes() const { return num_classes_; }
  std::optional<int32_t> blank_id() const { return blank_id_; }
  void set_blank_id(std::optional<int32_t> blank_id);

  std::span<const float> Row(int32_t t) const {
    return {probs_.data() + static_cast<std::size_t>(t) * num_classes_,
            static_cast<std::size_t>(num_classes_)};
  }
  const std::vector<float> &data() const { return probs_; }

  // Lowest index wins on ties.
  int32_t Argmax(int32_t t) const;

  friend bool operator==(const PosteriorMatrix &,
                         const PosteriorMatrix &) = default;

 private:
  int32_t num_frames_ = 0;
  int32_t num_classes_ = 0;
  std::vector<float> probs_;
  std::optional<int32_t> blank_id_;
};

// Binary posterior file:
//   "OAPM" | u32 version = 1 | u32 T | u32 V | T*V f32, all little-endian.
// The blank id travels in the protocol response, not in the file.
inline constexpr char kPosteriorMagic[4] = {'O', 'A', 'P', 'M'};
inline constexpr uint32_t kPosteriorVersion = 1;

std::string EncodePosterior(const PosteriorMatrix &m);
// Throws BackendError(kCorruptPosterior).
PosteriorMatrix DecodePosterior(std::string_view bytes,
                                std::optional<int32_t> blank_id = std::nullopt);

void WritePosterior(const PosteriorMatrix &m,
                    const std::filesystem::path &path);
PosteriorMatrix ReadPosterior(const std::filesystem::path &path,
                              std::optional<int32_t> blank_id = std::nullopt);

}  // namespace oafuse

#endif  // OAFUSE_POSTERIOR_H_
