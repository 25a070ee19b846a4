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

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

uint32_t ReadU32(const char *p) {
  uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

void AppendU32(std::string *out, uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out->append(buf, 4);
}

}  // namespace

PosteriorMatrix::PosteriorMatrix(int32_t num_frames, int32_t num_classes,
                                 std::vector<float> probs,
                                 std::optional<int32_t> blank_id)
    : num_frames_(num_frames),
      num_classes_(num_classes),
      probs_(std::move(probs)) {
  if (num_frames_ <= 0) {
    throw InvalidArgument(
        fmt::format("posterior needs T >= 1, got {}", num_frames_));
  }
  if (num_classes_ < 2) {
    throw InvalidArgument(
        fmt::format("posterior needs V >= 2, got {}", num_classes_));
  }
  if (probs_.size() != static_cast<std::size_t>(num_frames_) * num_classes_) {
    throw InvalidArgument(fmt::format("posterior holds {} values, expected {}",
                                      probs_.size(),
                                      static_cast<std::size_t>(num_frames_) *
                                          num_classes_));
  }
  for (int32_t t = 0; t != num_frames_; ++t) {
    float *row = probs_.data() + static_cast<std::size_t>(t) * num_classes_;
    double sum = 0.0;
    for (int32_t v = 0; v != num_classes_; ++v) {
      if (!std::isfinite(row[v]) || row[v] < 0.0f) {
        throw InvalidArgument(fmt::format(
            "posterior entry ({}, {}) = {} is not a probability", t, v, row[v]));
      }
      sum += row[v];
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw InvalidArgument(
          fmt::format("posterior row {} sums to {}, not 1", t, sum));
    }
    if (std::abs(sum - 1.0) > kRenormalizeThreshold) {
      for (int32_t v = 0; v != num_classes_; ++v) {
        row[v] = static_cast<float>(row[v] / sum);
      }
    }
  }
  set_blank_id(blank_id);
}

void PosteriorMatrix::set_blank_id(std::optional<int32_t> blank_id) {
  if (blank_id && (*blank_id < 0 || *blank_id >= num_classes_)) {
    throw InvalidArgument(fmt::format("blank_id {} outside [0, {})", *blank_id,
                                      num_classes_));
  }
  blank_id_ = blank_id;
}

int32_t PosteriorMatrix::Argmax(int32_t t) const {
  auto row = Row(t);
  int32_t best = 0;
  for (int32_t v = 1; v != num_classes_; ++v) {
    if (row[v] > row[best]) best = v;
  }
  return best;
}

std::string EncodePosterior(const PosteriorMatrix &m) {
  std::string out(kPosteriorMagic, 4);
  AppendU32(&out, kPosteriorVersion);
  AppendU32(&out, static_cast<uint32_t>(m.num_frames()));
  AppendU32(&out, static_cast<uint32_t>(m.num_classes()));
  const auto &d = m.data();
  out.append(reinterpret_cast<const char *>(d.data()), d.size() * sizeof(float));
  return out;
}

PosteriorMatrix DecodePosterior(std::string_view bytes,
                                std::optional<int32_t> blank_id) {
  using K = BackendError::Kind;
  if (bytes.size() < 16) {
    throw BackendError(K::kCorruptPosterior,
                       "corrupt posterior: header truncated");
  }
  if (std::memcmp(bytes.data(), kPosteriorMagic, 4) != 0) {
    throw BackendError(K::kCorruptPosterior, "corrupt posterior: bad magic");
  }
  uint32_t version = ReadU32(bytes.data() + 4);
  if (version != kPosteriorVersion) {
    throw BackendError(
        K::kCorruptPosterior,
        fmt::format("corrupt posterior: unsupported version {}", version));
  }
  uint64_t t = ReadU32(bytes.data() + 8);
  uint64_t v = ReadU32(bytes.data() + 12);
  if (bytes.size() - 16 != t * v * sizeof(float)) {
    throw BackendError(
        K::kCorruptPosterior,
        fmt::format("corrupt posterior: {}x{} header but {} payload bytes", t,
                    v, bytes.size() - 16));
  }
  std::vector<float> probs(t * v);
  std::memcpy(probs.data(), bytes.data() + 16, probs.size() * sizeof(float));
  try {
    return PosteriorMatrix(static_cast<int32_t>(t), static_cast<int32_t>(v),
                           std::move(probs), blank_id);
  } catch (const InvalidArgument &e) {
    throw BackendError(K::kCorruptPosterior,
                       fmt::format("corrupt posterior: {}", e.what()));
  }
}

void WritePosterior(const PosteriorMatrix &m,
                    const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  std::string bytes = EncodePosterior(m);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) {
    throw DataError(fmt::format("cannot write posterior '{}'", path.string()));
  }
}

PosteriorMatrix ReadPosterior(const std::filesystem::path &path,
                              std::optional<int32_t> blank_id) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw BackendError(BackendError::Kind::kCorruptPosterior,
                       fmt::format("cannot open posterior '{}'", path.string()));
  }
  std::string bytes((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
  return DecodePosterior(bytes, blank_id);
}

}  // namespace oafuse
