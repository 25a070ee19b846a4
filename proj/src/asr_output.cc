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

#include "oafuse/asr_output.h"

#include <cmath>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

void ValidateAsrOutput(const AsrOutput &o) {
  if (!o.segments && !o.token_confidences && !o.posterior) {
    throw BackendError(BackendError::Kind::kProtocol,
                       "response carries no confidence artifact (segments, "
                       "token_confidences or posterior)");
  }
  if (o.token_confidences) {
    for (double c : *o.token_confidences) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw BackendError(
            BackendError::Kind::kProtocol,
            fmt::format("token confidence {} outside [0,1]", c));
      }
    }
  }
  if (o.segments) {
    for (const auto &s : *o.segments) {
      if (s.num_tokens < 1 || !std::isfinite(s.avg_logprob)) {
        throw BackendError(BackendError::Kind::kProtocol,
                           fmt::format("invalid segment (avg_logprob={}, "
                                       "num_tokens={})",
                                       s.avg_logprob, s.num_tokens));
      }
    }
  }
}

ConfidenceMode ParseConfidenceMode(std::string_view text) {
  if (text == "segment") return ConfidenceMode::Segment();
  if (text == "token") return ConfidenceMode::Token();
  if (text == "ctc") return ConfidenceMode::Ctc();
  if (text.starts_with("ctc:")) {
    std::string q_text(text.substr(4));
    try {
      std::size_t used = 0;
      double q = std::stod(q_text, &used);
      if (used == q_text.size() && q > 0.0 && q < 1.0) {
        return ConfidenceMode::Ctc(q);
      }
    } catch (const std::exception &) {
    }
    throw InvalidArgument(
        fmt::format("bad Tsallis q in confidence mode '{}'", text));
  }
  throw InvalidArgument(fmt::format(
      "unknown confidence mode '{}' (expected segment|token|ctc[:q])", text));
}

std::string ToString(const ConfidenceMode &mode) {
  switch (mode.kind) {
    case ConfidenceMode::Kind::kSegmentAvgLogprob:
      return "segment";
    case ConfidenceMode::Kind::kTokenGeometricMean:
      return "token";
    case ConfidenceMode::Kind::kCtcFromPosterior:
      return fmt::format("ctc:{}", mode.q);
  }
  return "?";
}

double UtteranceConfidence(const AsrOutput &o, const ConfidenceMode &mode) {
  switch (mode.kind) {
    case ConfidenceMode::Kind::kSegmentAvgLogprob:
      if (!o.segments) {
        throw InvalidArgument("segment confidence needs segment statistics");
      }
      return SegmentConfidence(*o.segments);
    case ConfidenceMode::Kind::kTokenGeometricMean:
      if (!o.token_confidences) {
        throw InvalidArgument("token confidence needs token_confidences");
      }
      return GeometricMeanConfidence(*o.token_confidences);
    case ConfidenceMode::Kind::kCtcFromPosterior: {
      if (!o.posterior) {
        throw InvalidArgument("CTC confidence needs a posterior matrix");
      }
      auto tokens = CtcTokenConfidences(*o.posterior, mode.q);
      return GeometricMeanConfidence(tokens);
    }
  }
  throw InvalidArgument("unknown confidence mode");
}

}  // namespace oafuse
