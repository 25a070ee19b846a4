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

#ifndef OAFUSE_ASR_OUTPUT_H_
#define OAFUSE_ASR_OUTPUT_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oafuse/confidence.h"
#include "oafuse/posterior.h"

namespace oafuse {

// What a recognizer hands back for one waveform: the hypothesis plus
// whichever raw confidence artifacts the backend can produce.
struct AsrOutput {
  std::string transcript;
  std::optional<std::vector<SegmentStat>> segments;
  std::optional<std::vector<double>> token_confidences;
  std::shared_ptr<const PosteriorMatrix> posterior;
  std::optional<std::vector<std::string>> class_labels;
};

// Throws BackendError(kProtocol) if no confidence artifact is present or a
// token confidence leaves [0,1].
void ValidateAsrOutput(const AsrOutput &o);

struct ConfidenceMode {
  enum class Kind { kSegmentAvgLogprob, kTokenGeometricMean, kCtcFromPosterior };

  Kind kind = Kind::kTokenGeometricMean;
  double q = kDefaultTsallisQ;  // used by kCtcFromPosterior

  static ConfidenceMode Segment() { return {Kind::kSegmentAvgLogprob}; }
  static ConfidenceMode Token() { return {Kind::kTokenGeometricMean}; }
  static ConfidenceMode Ctc(double q = kDefaultTsallisQ) {
    return {Kind::kCtcFromPosterior, q};
  }
};

// "segment", "token", "ctc" or "ctc:<q>".
ConfidenceMode ParseConfidenceMode(std::string_view text);
std::string ToString(const ConfidenceMode &mode);

// Utterance-level conf() of a decoded signal:
//   segment -> SegmentConfidence(segments)
//   token   -> GeometricMeanConfidence(token_confidences)
//   ctc     -> GeometricMeanConfidence(CtcTokenConfidences(posterior, q))
// Throws InvalidArgument when the artifact the mode needs is absent.
double UtteranceConfidence(const AsrOutput &o, const ConfidenceMode &mode);

}  // namespace oafuse

#endif  // OAFUSE_ASR_OUTPUT_H_
