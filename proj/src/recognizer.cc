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

#include "oafuse/recognizer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include "fmt/format.h"
#include "httplib.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

using Kind = BackendError::Kind;

std::string UniquePrefix() {
  static std::atomic<uint64_t> counter{0};
  return fmt::format("{}-{}", ::getpid(), counter.fetch_add(1));
}

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

BackendSpec BackendSpec::Parse(std::string_view text, int32_t timeout_ms) {
  if (timeout_ms <= 0) {
    throw InvalidArgument(
        fmt::format("backend timeout must be positive, got {}", timeout_ms));
  }
  BackendSpec spec;
  spec.timeout_ms = timeout_ms;
  if (text == "mock") return spec;
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    throw InvalidArgument(fmt::format(
        "bad backend '{}' (expected mock, mock:<config>, cmd:<command> or "
        "http:<url>)",
        text));
  }
  auto kind = text.substr(0, colon);
  spec.endpoint = std::string(text.substr(colon + 1));
  if (kind == "mock") {
    spec.transport = Transport::kMock;
    spec.tone = LoadToneConfig(spec.endpoint);
  } else if (kind == "cmd") {
    spec.transport = Transport::kSubprocess;
  } else if (kind == "http") {
    spec.transport = Transport::kHttp;
    if (!spec.endpoint.starts_with("http://")) {
      throw InvalidArgument(
          fmt::format("http backend needs an http:// URL, got '{}'",
                      spec.endpoint));
    }
  } else {
    throw InvalidArgument(fmt::format("unknown backend kind '{}'", kind));
  }
  return spec;
}

std::string BackendSpec::Id() const {
  switch (transport) {
    case Transport::kMock:
      return DescribeToneConfig(tone);
    case Transport::kSubprocess:
      return "cmd:" + endpoint;
    case Transport::kHttp:
      return "http:" + endpoint;
  }
  return "?";
}

std::unique_ptr<Recognizer> MakeRecognizer(const BackendSpec &spec) {
  switch (spec.transport) {
    case BackendSpec::Transport::kMock:
      return std::make_unique<MockRecognizer>(spec.tone);
    case BackendSpec::Transport::kSubprocess:
      return std::make_unique<SubprocessRecognizer>(spec.endpoint,
                                                    spec.timeout_ms);
    case BackendSpec::Transport::kHttp:
      return std::make_unique<HttpRecognizer>(spec.endpoint, spec.timeout_ms);
  }
  throw InvalidArgument("unknown backend transport");
}

AsrOutput DecodeResponseLine(std::string_view line,
                             std::string_view expected_id) {
  TranscribeResponse resp = ParseResponse(line);
  if (resp.id != expected_id) {
    throw BackendError(Kind::kProtocol,
                       fmt::format("protocol violation: response id '{}' does "
                                   "not match request id '{}'",
                                   resp.id, expected_id));
  }
  AsrOutput out = ToAsrOutput(resp);
  ValidateAsrOutput(out);
  return out;
}

// ---------------------------------------------------------------------------

MockRecognizer::MockRecognizer(ToneConfig cfg) : cfg_(std::move(cfg)) {
  ValidateToneConfig(cfg_);
}

AsrOutput MockRecognizer::Transcribe(const Waveform &w) {
  try {
    return ToneAsrTranscribe(w, cfg_);
  } catch (const InvalidArgument &e) {
    throw BackendError(Kind::kReported, e.what());
  }
}

// ---------------------------------------------------------------------------

SubprocessRecognizer::SubprocessRecognizer(std::string command,
                                           int32_t timeout_ms)
    : command_(std::move(command)),
      timeout_ms_(timeout_ms),
      id_prefix_(UniquePrefix()) {
  IgnoreSigpipe();
}

SubprocessRecognizer::~SubprocessRecognizer() { Stop(); }

void SubprocessRecognizer::Start() {
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw BackendError(Kind::kTransport,
                       fmt::format("pipe failed: {}", std::strerror(errno)));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendError(Kind::kTransport,
                       fmt::format("pipe failed: {}", std::strerror(errno)));
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) {
      ::close(fd);
    }
    throw BackendError(Kind::kTransport,
                       fmt::format("fork failed: {}", std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
}

void SubprocessRecognizer::Stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    // Closing stdin asks a well-behaved server to exit; give it a moment.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

std::string SubprocessRecognizer::ReadLine() {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - Clock::now())
                    .count();
    if (left <= 0) {
      Stop();
      throw BackendError(Kind::kTimeout,
                         fmt::format("backend did not answer within {} ms",
                                     timeout_ms_));
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(left));
    if (rc < 0) {
      if (errno == EINTR) continue;
      Stop();
      throw BackendError(Kind::kTransport,
                         fmt::format("poll failed: {}", std::strerror(errno)));
    }
    if (rc == 0) continue;
    char chunk[65536];
    ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      throw BackendError(Kind::kTransport,
                         "backend process closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string SubprocessRecognizer::RoundTrip(const std::string &request_line) {
  if (pid_ < 0) Start();
  std::string msg = request_line + "\n";
  std::size_t off = 0;
  while (off < msg.size()) {
    ssize_t n = ::write(to_child_, msg.data() + off, msg.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      throw BackendError(Kind::kTransport,
                         fmt::format("cannot write to backend: {}",
                                     std::strerror(errno)));
    }
    off += static_cast<std::size_t>(n);
  }
  return ReadLine();
}

AsrOutput SubprocessRecognizer::Transcribe(const Waveform &w) {
  TranscribeRequest req;
  req.id = fmt::format("{}-{}", id_prefix_, next_id_++);
  req.audio = w;
  std::string line = RoundTrip(SerializeRequest(req));
  return DecodeResponseLine(line, req.id);
}

// ---------------------------------------------------------------------------

HttpRecognizer::HttpRecognizer(std::string url, int32_t timeout_ms)
    : timeout_ms_(timeout_ms), id_prefix_(UniquePrefix()) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument(fmt::format("bad URL '{}'", url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = url;
    path_ = "/";
  } else {
    scheme_host_port_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

AsrOutput HttpRecognizer::Transcribe(const Waveform &w) {
  TranscribeRequest req;
  req.id = fmt::format("{}-{}", id_prefix_, next_id_++);
  req.audio = w;

  httplib::Client cli(scheme_host_port_);
  const auto sec = timeout_ms_ / 1000;
  const auto usec = (timeout_ms_ % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);

  auto res = cli.Post(path_, SerializeRequest(req), "application/json");
  if (!res) {
    auto err = res.error();
    Kind kind = err == httplib::Error::Read
                    ? Kind::kTimeout
                    : Kind::kTransport;
    throw BackendError(kind, fmt::format("HTTP request to {}{} failed: {}",
                                         scheme_host_port_, path_,
                                         httplib::to_string(err)));
  }
  if (res->status != 200) {
    throw BackendError(Kind::kTransport,
                       fmt::format("HTTP status {} from {}{}", res->status,
                                   scheme_host_port_, path_));
  }
  return DecodeResponseLine(res->body, req.id);
}

}  // namespace oafuse
