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

#ifndef OAFUSE_RECOGNIZER_H_
#define OAFUSE_RECOGNIZER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oafuse/asr_output.h"
#include "oafuse/protocol.h"
#include "oafuse/signal.h"
#include "oafuse/tone_asr.h"

namespace oafuse {

// A speech recognizer the harness can send waveforms to. Implementations
// are not thread-safe; use one instance per worker.
class Recognizer {
 public:
  virtual ~Recognizer() = default;

  // Throws BackendError.
  virtual AsrOutput Transcribe(const Waveform &w) = 0;
};

// Where a recognizer lives.
//   "mock"                 in-process tone recognizer, default config
//   "mock:<config.json>"   in-process tone recognizer, config from file
//   "cmd:<command line>"   child process speaking the protocol on stdio
//   "http:<url>"           HTTP endpoint accepting the protocol as POST
struct BackendSpec {
  enum class Transport { kMock, kSubprocess, kHttp };

  Transport transport = Transport::kMock;
  std::string endpoint;
  int32_t timeout_ms = 60000;
  ToneConfig tone;  // kMock only

  // Throws InvalidArgument (bad syntax) or DataError (unreadable config).
  static BackendSpec Parse(std::string_view text, int32_t timeout_ms = 60000);

  // Stable identifier for report metadata.
  std::string Id() const;
};

std::unique_ptr<Recognizer> MakeRecognizer(const BackendSpec &spec);

class MockRecognizer : public Recognizer {
 public:
  explicit MockRecognizer(ToneConfig cfg);
  AsrOutput Transcribe(const Waveform &w) override;

 private:
  ToneConfig cfg_;
};

// Starts `/bin/sh -c <command>` and exchanges one JSON line per request.
// A request that gets no complete reply within timeout_ms fails with
// kTimeout and the child is terminated; the next call restarts it.
class SubprocessRecognizer : public Recognizer {
 public:
  SubprocessRecognizer(std::string command, int32_t timeout_ms);
  ~SubprocessRecognizer() override;

  SubprocessRecognizer(const SubprocessRecognizer &) = delete;
  SubprocessRecognizer &operator=(const SubprocessRecognizer &) = delete;

  AsrOutput Transcribe(const Waveform &w) override;

  // One raw exchange; exposed for protocol tests.
  std::string RoundTrip(const std::string &request_line);

 private:
  void Start();
  void Stop();
  std::string ReadLine();

  std::string command_;
  int32_t timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string id_prefix_;
  uint64_t next_id_ = 0;
};

class HttpRecognizer : public Recognizer {
 public:
  HttpRecognizer(std::string url, int32_t timeout_ms);
  AsrOutput Transcribe(const Waveform &w) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  int32_t timeout_ms_;
  std::string id_prefix_;
  uint64_t next_id_ = 0;
};

// Shared response handling for the remote transports: id check, schema and
// semantic validation, posterior loading.
AsrOutput DecodeResponseLine(std::string_view line,
                             std::string_view expected_id);

}  // namespace oafuse

#endif  // OAFUSE_RECOGNIZER_H_
