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

#include "oafuse/service.h"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "oafuse/error.h"
#include "oafuse/protocol.h"

namespace oafuse {

namespace {

// Keeps request ids usable as file names.
std::string SafeFileStem(std::string_view id) {
  std::string out;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
              c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), 'r');
  return out;
}

// Best effort: recover the id of a request that failed to parse.
std::string ExtractId(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    if (j.is_object() && j.contains("id") && j["id"].is_string()) {
      return j["id"].get<std::string>();
    }
  } catch (const nlohmann::json::exception &) {
  }
  return "";
}

}  // namespace

ToneAsrService::ToneAsrService(ToneConfig cfg,
                               std::filesystem::path posterior_dir)
    : cfg_(std::move(cfg)), posterior_dir_(std::move(posterior_dir)) {
  ValidateToneConfig(cfg_);
}

std::string ToneAsrService::Handle(std::string_view request_line) {
  TranscribeResponse resp;
  TranscribeRequest req;
  try {
    req = ParseRequest(request_line);
  } catch (const Error &e) {
    resp.id = ExtractId(request_line);
    resp.error = WireError{"bad_request", e.what()};
    return SerializeResponse(resp);
  }
  resp.id = req.id;

  Waveform audio;
  try {
    if (const auto *path = std::get_if<std::string>(&req.audio)) {
      audio = LoadWav(*path);
    } else {
      audio = std::get<Waveform>(req.audio);
    }
  } catch (const Error &e) {
    resp.error = WireError{"audio_unreadable", e.what()};
    return SerializeResponse(resp);
  }

  try {
    AsrOutput out = ToneAsrTranscribe(audio, cfg_);
    resp.transcript = out.transcript;
    if (req.Wants(Artifact::kSegments)) resp.segments = out.segments;
    if (req.Wants(Artifact::kTokenConfidences)) {
      resp.token_confidences = out.token_confidences;
    }
    if (req.Wants(Artifact::kPosterior) && out.posterior) {
      auto path = posterior_dir_ / (SafeFileStem(req.id) + ".oapm");
      WritePosterior(*out.posterior, path);
      resp.posterior_path = path.string();
      resp.blank_id = cfg_.blank_id();
      resp.class_labels = out.class_labels;
    }
    if (!resp.segments && !resp.token_confidences && !resp.posterior_path) {
      // Nothing to measure confidence with; the empty waveform case with
      // only a posterior requested lands here.
      resp.token_confidences = out.token_confidences;
    }
  } catch (const std::exception &e) {
    resp = TranscribeResponse{};
    resp.id = req.id;
    resp.error = WireError{"internal", e.what()};
  }
  return SerializeResponse(resp);
}

}  // namespace oafuse
