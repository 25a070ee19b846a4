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

#include "oafuse/confidence.h"

#include <algorithm>
#include <cmath>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

template <typename T>
double TsallisConfidenceImpl(std::span<const T> p, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InvalidArgument(fmt::format("Tsallis q must lie in (0,1), got {}", q));
  }
  if (p.size() < 2) {
    throw InvalidArgument("Tsallis confidence needs at least 2 classes");
  }
  double sum = 0.0, sum_pow = 0.0;
  for (T v : p) {
    double x = static_cast<double>(v);
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument(fmt::format("invalid probability {}", x));
    }
    sum += x;
    if (x > 0.0) sum_pow += std::pow(x, q);
  }
  if (std::abs(sum - 1.0) > PosteriorMatrix::kRowSumTolerance) {
    throw InvalidArgument(
        fmt::format("distribution sums to {}, not 1", sum));
  }
  const double v = static_cast<double>(p.size());
  const double entropy = (1.0 - sum_pow) / (q - 1.0);
  const double max_entropy = (1.0 - std::pow(v, 1.0 - q)) / (q - 1.0);
  const double floor = std::exp(-max_entropy);
  double conf = (std::exp(-entropy) - floor) / (1.0 - floor);
  return std::clamp(conf, 0.0, 1.0);
}

}  // namespace

double TsallisConfidence(std::span<const double> p, double q) {
  return TsallisConfidenceImpl(p, q);
}

double TsallisConfidence(std::span<const float> p, double q) {
  return TsallisConfidenceImpl(p, q);
}

double SegmentConfidence(std::span<const SegmentStat> segments) {
  if (segments.empty()) return kConfidenceFloor;
  double num = 0.0, den = 0.0;
  for (const auto &s : segments) {
    if (s.num_tokens < 1 || !std::isfinite(s.avg_logprob)) {
      throw InvalidArgument(fmt::format(
          "invalid segment (avg_logprob={}, num_tokens={})", s.avg_logprob,
          s.num_tokens));
    }
    num += s.num_tokens * std::exp(s.avg_logprob);
    den += s.num_tokens;
  }
  return num / den;
}

double GeometricMeanConfidence(std::span<const double> token_confs) {
  if (token_confs.empty()) return kConfidenceFloor;
  double acc = 0.0;
  for (double c : token_confs) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw InvalidArgument(fmt::format("token confidence {} outside [0,1]", c));
    }
    acc += std::log(std::max(c, kConfidenceFloor));
  }
  return std::exp(acc / static_cast<double>(token_confs.size()));
}

std::vector<TokenSpan> CtcGreedySpans(const PosteriorMatrix &m) {
  if (!m.blank_id()) {
    throw InvalidArgument("greedy CTC spans need a blank id");
  }
  const int32_t blank = *m.blank_id();
  std::vector<TokenSpan> spans;
  int32_t prev = -1;
  for (int32_t t = 0; t != m.num_frames(); ++t) {
    int32_t label = m.Argmax(t);
    if (label == prev) {
      if (label != blank) spans.back().end_frame = t;
    } else if (label != blank) {
      spans.push_back({label, t, t});
    }
    prev = label;
  }
  return spans;
}

std::vector<double> FrameConfidences(const PosteriorMatrix &m, double q) {
  std::vector<double> out(m.num_frames());
  for (int32_t t = 0; t != m.num_frames(); ++t) {
    out[t] = TsallisConfidence(m.Row(t), q);
  }
  return out;
}

std::vector<double> CtcTokenConfidences(const PosteriorMatrix &m, double q) {
  auto spans = CtcGreedySpans(m);
  auto frames = FrameConfidences(m, q);
  std::vector<double> out;
  out.reserve(spans.size());
  for (const auto &s : spans) {
    out.push_back(*std::min_element(frames.begin() + s.start_frame,
                                    frames.begin() + s.end_frame + 1));
  }
  return out;
}

}  // namespace oafuse
