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

#ifndef OAFUSE_PROTOCOL_H_
#define OAFUSE_PROTOCOL_H_

// Wire format between the toolkit and an external recognizer.
//
// One JSON object per line over a subprocess's stdin/stdout, or the same
// object as the body of an HTTP POST.
//
// request:
//   {"id": str, "op": "transcribe",
//    "audio": {"path": str} | {"pcm_f32le_b64": str, "sample_rate": int},
//    "want": ["transcript" | "segments" | "token_confidences" | "posterior"]}
//
// response:
//   {"id": str, "transcript": str,
//    "segments": [{"avg_logprob": num, "num_tokens": int}] | null,
//    "token_confidences": [num] | null,
//    "posterior_path": str | null,
//    "class_labels": [str] | null,
//    "blank_id": int | null,
//    "error": null | {"code": str, "message": str}}
//
// avg_logprob is a natural-log quantity. Posteriors travel as OAPM files
// (see posterior.h) referenced by posterior_path.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oafuse/asr_output.h"
#include "oafuse/signal.h"

namespace oafuse {

enum class Artifact { kTranscript, kSegments, kTokenConfidences, kPosterior };

std::string_view ArtifactName(Artifact a);

inline const std::vector<Artifact> &AllArtifacts() {
  static const std::vector<Artifact> kAll = {
      Artifact::kTranscript, Artifact::kSegments, Artifact::kTokenConfidences,
      Artifact::kPosterior};
  return kAll;
}

struct TranscribeRequest {
  std::string id;
  // Either a path the backend can read, or inline samples.
  std::variant<std::string, Waveform> audio;
  std::vector<Artifact> want = AllArtifacts();

  bool Wants(Artifact a) const;
};

struct WireError {
  std::string code;
  std::string message;

  friend bool operator==(const WireError &, const WireError &) = default;
};

struct TranscribeResponse {
  std::string id;
  std::string transcript;
  std::optional<std::vector<SegmentStat>> segments;
  std::optional<std::vector<double>> token_confidences;
  std::optional<std::string> posterior_path;
  std::optional<std::vector<std::string>> class_labels;
  std::optional<int32_t> blank_id;
  std::optional<WireError> error;

  friend bool operator==(const TranscribeResponse &,
                         const TranscribeResponse &) = default;
};

// Single line, no trailing newline, keys in the order documented above.
std::string SerializeRequest(const TranscribeRequest &r);
std::string SerializeResponse(const TranscribeResponse &r);

// Strict schema checks; unknown keys and wrong types are rejected.
// Throw BackendError(kProtocol).
TranscribeRequest ParseRequest(std::string_view text);
TranscribeResponse ParseResponse(std::string_view text);

// Semantic checks beyond the schema: an error-free response must carry at
// least one confidence artifact, token confidences lie in [0,1], segments
// have num_tokens >= 1, a posterior needs a blank id and class labels (when
// given) must include it. When check_posterior_file is set the referenced
// file is opened and decoded as well. Throws BackendError.
void ValidateResponse(const TranscribeResponse &r,
                      bool check_posterior_file = true);

// Converts a validated, error-free response. A backend-reported error is
// raised as BackendError(kReported).
AsrOutput ToAsrOutput(const TranscribeResponse &r);

std::string Base64Encode(std::string_view bytes);
// Throws BackendError(kProtocol) on malformed input.
std::string Base64Decode(std::string_view text);

std::string EncodePcmF32(const Waveform &w);
Waveform DecodePcmF32(std::string_view b64, int32_t sample_rate_hz);

}  // namespace oafuse

#endif  // OAFUSE_PROTOCOL_H_
