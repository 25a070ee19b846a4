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

#ifndef OAFUSE_SERVICE_H_
#define OAFUSE_SERVICE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "oafuse/tone_asr.h"

namespace oafuse {

// Server side of the wire protocol backed by the tone recognizer. Answers
// one request line with one response line; posteriors are written as OAPM
// files under posterior_dir, named after the request id.
class ToneAsrService {
 public:
  ToneAsrService(ToneConfig cfg, std::filesystem::path posterior_dir);

  // Never throws: failures are reported in the response's error object
  // (codes "bad_request", "audio_unreadable", "internal").
  std::string Handle(std::string_view request_line);

 private:
  ToneConfig cfg_;
  std::filesystem::path posterior_dir_;
};

}  // namespace oafuse

#endif  // OAFUSE_SERVICE_H_
