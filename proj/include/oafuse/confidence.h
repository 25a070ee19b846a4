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

#ifndef OAFUSE_CONFIDENCE_H_
#define OAFUSE_CONFIDENCE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "oafuse/posterior.h"

namespace oafuse {

inline constexpr double kDefaultTsallisQ = 0.33;
// Confidence assigned to an empty hypothesis, and the floor applied to zero
// token confidences before taking logs.
inline constexpr double kConfidenceFloor = 1e-8;

// Decoder statistics for one decoded segment: the mean natural-log token
// probability and the number of tokens it was averaged over.
struct SegmentStat {
  double avg_logprob = 0.0;
  int32_t num_tokens = 1;

  friend bool operator==(const SegmentStat &, const SegmentStat &) = default;
};

// Inclusive frame range backing one greedy CTC token.
struct TokenSpan {
  int32_t class_id = 0;
  int32_t start_frame = 0;
  int32_t end_frame = 0;

  friend bool operator==(const TokenSpan &, const TokenSpan &) = default;
};

// Entropy-based confidence of a single distribution.
//
// With H the Tsallis entropy (1 - sum p_i^q) / (q - 1) and H_max its value
// for the uniform distribution over V classes,
//
//   conf = (exp(-H) - exp(-H_max)) / (1 - exp(-H_max))
//
// so a one-hot row scores 1 and a uniform row scores 0. q must lie in (0,1).
double TsallisConfidence(std::span<const double> p, double q = kDefaultTsallisQ);
double TsallisConfidence(std::span<const float> p, double q = kDefaultTsallisQ);

// Token-weighted mean of exp(avg_logprob). Empty input yields
// kConfidenceFloor.
double SegmentConfidence(std::span<const SegmentStat> segments);

// exp(mean(log c)), with zeros floored at kConfidenceFloor. Empty input
// yields kConfidenceFloor.
double GeometricMeanConfidence(std::span<const double> token_confs);

// Greedy CTC: per-frame argmax, runs of equal labels merged, blank runs
// dropped. Requires m.blank_id().
std::vector<TokenSpan> CtcGreedySpans(const PosteriorMatrix &m);

// Per-frame Tsallis confidence, blanks included.
std::vector<double> FrameConfidences(const PosteriorMatrix &m,
                                     double q = kDefaultTsallisQ);

// Min over the frames of each greedy span, in span order.
std::vector<double> CtcTokenConfidences(const PosteriorMatrix &m,
                                        double q = kDefaultTsallisQ);

}  // namespace oafuse

#endif  // OAFUSE_CONFIDENCE_H_
