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

#include "oafuse/protocol.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <set>

#include "fmt/format.h"
#include "json.hpp"
#include "oafuse/error.h"

namespace oafuse {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void Fail(const std::string &msg) {
  throw BackendError(BackendError::Kind::kProtocol,
                     fmt::format("protocol violation: {}", msg));
}

Json ParseObject(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    Fail(fmt::format("malformed JSON ({})", e.what()));
  }
  if (!j.is_object()) Fail("message is not a JSON object");
  return j;
}

void CheckKeys(const Json &j, std::initializer_list<std::string_view> allowed,
               std::initializer_list<std::string_view> required,
               std::string_view what) {
  for (const auto &[key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      Fail(fmt::format("unexpected key '{}' in {}", key, what));
    }
  }
  for (auto key : required) {
    if (!j.contains(std::string(key))) {
      Fail(fmt::format("missing field '{}' in {}", key, what));
    }
  }
}

const Json &Field(const Json &j, const char *key) {
  static const Json kNull;
  auto it = j.find(key);
  return it == j.end() ? kNull : *it;
}

std::string RequireString(const Json &j, const char *key) {
  const Json &v = Field(j, key);
  if (!v.is_string()) Fail(fmt::format("'{}' must be a string", key));
  return v.get<std::string>();
}

double RequireNumber(const Json &v, std::string_view what) {
  if (!v.is_number()) Fail(fmt::format("{} must be a number", what));
  return v.get<double>();
}

int64_t RequireInteger(const Json &v, std::string_view what) {
  if (!v.is_number_integer()) Fail(fmt::format("{} must be an integer", what));
  return v.get<int64_t>();
}

Artifact ParseArtifact(const Json &v) {
  if (!v.is_string()) Fail("'want' entries must be strings");
  auto name = v.get<std::string>();
  for (Artifact a : AllArtifacts()) {
    if (ArtifactName(a) == name) return a;
  }
  Fail(fmt::format("unknown artifact '{}' in 'want'", name));
}

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string_view ArtifactName(Artifact a) {
  switch (a) {
    case Artifact::kTranscript:
      return "transcript";
    case Artifact::kSegments:
      return "segments";
    case Artifact::kTokenConfidences:
      return "token_confidences";
    case Artifact::kPosterior:
      return "posterior";
  }
  return "?";
}

bool TranscribeRequest::Wants(Artifact a) const {
  return std::find(want.begin(), want.end(), a) != want.end();
}

std::string Base64Encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  auto u = [&](std::size_t k) {
    return static_cast<uint32_t>(static_cast<unsigned char>(bytes[k]));
  };
  for (; i + 3 <= bytes.size(); i += 3) {
    uint32_t v = (u(i) << 16) | (u(i + 1) << 8) | u(i + 2);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back(kB64Alphabet[v & 63]);
  }
  std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    uint32_t v = u(i) << 16;
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.append("==");
  } else if (rest == 2) {
    uint32_t v = (u(i) << 16) | (u(i + 1) << 8);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string Base64Decode(std::string_view text) {
  static const std::array<int8_t, 256> kLookup = [] {
    std::array<int8_t, 256> t{};
    t.fill(-1);
    for (int k = 0; k < 64; ++k) {
      t[static_cast<unsigned char>(kB64Alphabet[k])] = static_cast<int8_t>(k);
    }
    return t;
  }();
  if (text.size() % 4 != 0) Fail("base64 length is not a multiple of 4");
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      char c = text[i + k];
      int8_t d;
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
        d = 0;
      } else {
        if (pad) Fail("base64 padding in the middle of a quantum");
        d = kLookup[static_cast<unsigned char>(c)];
        if (d < 0) Fail("invalid base64 character");
      }
      v = (v << 6) | static_cast<uint32_t>(d);
    }
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<char>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<char>(v & 0xFF));
  }
  return out;
}

std::string EncodePcmF32(const Waveform &w) {
  const auto &s = w.samples();
  return Base64Encode(std::string_view(reinterpret_cast<const char *>(s.data()),
                                       s.size() * sizeof(float)));
}

Waveform DecodePcmF32(std::string_view b64, int32_t sample_rate_hz) {
  std::string bytes = Base64Decode(b64);
  if (bytes.size() % sizeof(float) != 0) {
    Fail("pcm_f32le_b64 payload is not a whole number of floats");
  }
  std::vector<float> samples(bytes.size() / sizeof(float));
  std::memcpy(samples.data(), bytes.data(), bytes.size());
  try {
    return Waveform(sample_rate_hz, std::move(samples));
  } catch (const InvalidArgument &e) {
    Fail(e.what());
  }
}

std::string SerializeRequest(const TranscribeRequest &r) {
  Json j;
  j["id"] = r.id;
  j["op"] = "transcribe";
  if (const auto *path = std::get_if<std::string>(&r.audio)) {
    j["audio"] = Json{{"path", *path}};
  } else {
    const auto &w = std::get<Waveform>(r.audio);
    Json audio;
    audio["pcm_f32le_b64"] = EncodePcmF32(w);
    audio["sample_rate"] = w.sample_rate_hz();
    j["audio"] = std::move(audio);
  }
  Json want = Json::array();
  for (Artifact a : r.want) want.push_back(std::string(ArtifactName(a)));
  j["want"] = std::move(want);
  return j.dump();
}

TranscribeRequest ParseRequest(std::string_view text) {
  Json j = ParseObject(text);
  CheckKeys(j, {"id", "op", "audio", "want"}, {"id", "op", "audio"}, "request");
  TranscribeRequest r;
  r.id = RequireString(j, "id");
  if (RequireString(j, "op") != "transcribe") {
    Fail(fmt::format("unsupported op '{}'", j["op"].get<std::string>()));
  }
  const Json &audio = j["audio"];
  if (!audio.is_object()) Fail("'audio' must be an object");
  if (audio.contains("path")) {
    CheckKeys(audio, {"path"}, {"path"}, "audio");
    r.audio = RequireString(audio, "path");
  } else {
    CheckKeys(audio, {"pcm_f32le_b64", "sample_rate"},
              {"pcm_f32le_b64", "sample_rate"}, "audio");
    int64_t rate = RequireInteger(audio["sample_rate"], "'sample_rate'");
    if (rate <= 0 || rate > INT32_MAX) Fail("'sample_rate' must be positive");
    r.audio = DecodePcmF32(RequireString(audio, "pcm_f32le_b64"),
                           static_cast<int32_t>(rate));
  }
  if (j.contains("want")) {
    if (!j["want"].is_array()) Fail("'want' must be an array");
    r.want.clear();
    for (const auto &v : j["want"]) r.want.push_back(ParseArtifact(v));
  }
  return r;
}

std::string SerializeResponse(const TranscribeResponse &r) {
  Json j;
  j["id"] = r.id;
  j["transcript"] = r.transcript;
  if (r.segments) {
    Json segs = Json::array();
    for (const auto &s : *r.segments) {
      Json o;
      o["avg_logprob"] = s.avg_logprob;
      o["num_tokens"] = s.num_tokens;
      segs.push_back(std::move(o));
    }
    j["segments"] = std::move(segs);
  } else {
    j["segments"] = nullptr;
  }
  j["token_confidences"] =
      r.token_confidences ? Json(*r.token_confidences) : Json(nullptr);
  j["posterior_path"] = r.posterior_path ? Json(*r.posterior_path) : Json();
  j["class_labels"] = r.class_labels ? Json(*r.class_labels) : Json(nullptr);
  j["blank_id"] = r.blank_id ? Json(*r.blank_id) : Json(nullptr);
  if (r.error) {
    Json e;
    e["code"] = r.error->code;
    e["message"] = r.error->message;
    j["error"] = std::move(e);
  } else {
    j["error"] = nullptr;
  }
  return j.dump();
}

TranscribeResponse ParseResponse(std::string_view text) {
  Json j = ParseObject(text);
  CheckKeys(j,
            {"id", "transcript", "segments", "token_confidences",
             "posterior_path", "class_labels", "blank_id", "error"},
            {"id", "transcript"}, "response");
  TranscribeResponse r;
  r.id = RequireString(j, "id");
  r.transcript = RequireString(j, "transcript");

  if (const Json &v = Field(j, "segments"); !v.is_null()) {
    if (!v.is_array()) Fail("'segments' must be an array or null");
    std::vector<SegmentStat> segs;
    for (const auto &s : v) {
      if (!s.is_object()) Fail("segment entries must be objects");
      CheckKeys(s, {"avg_logprob", "num_tokens"}, {"avg_logprob", "num_tokens"},
                "segment");
      int64_t n = RequireInteger(s["num_tokens"], "'num_tokens'");
      if (n < INT32_MIN || n > INT32_MAX) Fail("'num_tokens' out of range");
      segs.push_back({RequireNumber(s["avg_logprob"], "'avg_logprob'"),
                      static_cast<int32_t>(n)});
    }
    r.segments = std::move(segs);
  }
  if (const Json &v = Field(j, "token_confidences"); !v.is_null()) {
    if (!v.is_array()) Fail("'token_confidences' must be an array or null");
    std::vector<double> confs;
    for (const auto &c : v) confs.push_back(RequireNumber(c, "token confidence"));
    r.token_confidences = std::move(confs);
  }
  if (const Json &v = Field(j, "posterior_path"); !v.is_null()) {
    if (!v.is_string()) Fail("'posterior_path' must be a string or null");
    r.posterior_path = v.get<std::string>();
  }
  if (const Json &v = Field(j, "class_labels"); !v.is_null()) {
    if (!v.is_array()) Fail("'class_labels' must be an array or null");
    std::vector<std::string> labels;
    for (const auto &l : v) {
      if (!l.is_string()) Fail("class labels must be strings");
      labels.push_back(l.get<std::string>());
    }
    r.class_labels = std::move(labels);
  }
  if (const Json &v = Field(j, "blank_id"); !v.is_null()) {
    int64_t b = RequireInteger(v, "'blank_id'");
    if (b < 0 || b > INT32_MAX) Fail("'blank_id' must be non-negative");
    r.blank_id = static_cast<int32_t>(b);
  }
  if (const Json &v = Field(j, "error"); !v.is_null()) {
    if (!v.is_object()) Fail("'error' must be an object or null");
    CheckKeys(v, {"code", "message"}, {"code", "message"}, "error");
    r.error = WireError{RequireString(v, "code"), RequireString(v, "message")};
  }
  return r;
}

void ValidateResponse(const TranscribeResponse &r, bool check_posterior_file) {
  if (r.error) return;
  if (!r.segments && !r.token_confidences && !r.posterior_path) {
    Fail("response carries no confidence artifact (segments, "
         "token_confidences or posterior_path)");
  }
  if (r.token_confidences) {
    for (double c : *r.token_confidences) {
      if (!(c >= 0.0 && c <= 1.0)) {
        Fail(fmt::format("token confidence {} outside [0,1]", c));
      }
    }
  }
  if (r.segments) {
    for (const auto &s : *r.segments) {
      if (s.num_tokens < 1) Fail("segment with num_tokens < 1");
      if (!std::isfinite(s.avg_logprob)) Fail("non-finite avg_logprob");
    }
  }
  if (r.posterior_path && !r.blank_id) {
    Fail("posterior_path given without blank_id");
  }
  if (r.class_labels && r.blank_id &&
      *r.blank_id >= static_cast<int32_t>(r.class_labels->size())) {
    Fail(fmt::format("blank_id {} outside class_labels (size {})", *r.blank_id,
                     r.class_labels->size()));
  }
  if (check_posterior_file && r.posterior_path) {
    PosteriorMatrix m = ReadPosterior(*r.posterior_path, r.blank_id);
    if (r.class_labels &&
        static_cast<int32_t>(r.class_labels->size()) != m.num_classes()) {
      Fail(fmt::format("class_labels has {} entries but posterior has V={}",
                       r.class_labels->size(), m.num_classes()));
    }
  }
}

AsrOutput ToAsrOutput(const TranscribeResponse &r) {
  if (r.error) {
    throw BackendError(BackendError::Kind::kReported,
                       fmt::format("backend error [{}]: {}", r.error->code,
                                   r.error->message));
  }
  ValidateResponse(r, /*check_posterior_file=*/false);
  AsrOutput o;
  o.transcript = r.transcript;
  o.segments = r.segments;
  o.token_confidences = r.token_confidences;
  o.class_labels = r.class_labels;
  if (r.posterior_path) {
    auto m = ReadPosterior(*r.posterior_path, r.blank_id);
    if (o.class_labels &&
        static_cast<int32_t>(o.class_labels->size()) != m.num_classes()) {
      Fail(fmt::format("class_labels has {} entries but posterior has V={}",
                       o.class_labels->size(), m.num_classes()));
    }
    o.posterior = std::make_shared<const PosteriorMatrix>(std::move(m));
  }
  return o;
}

}  // namespace oafuse
