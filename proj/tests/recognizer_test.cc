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

#include <gtest/gtest.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>

#include "oafuse/error.h"
#include "oafuse/synth.h"
#include "test_util.h"

namespace oafuse {
namespace {

const std::string kServer = OAFUSE_MOCK_SERVER;

Waveform Speech(std::initializer_list<int32_t> words, double snr_db = 5.0) {
  ToneConfig cfg;
  std::vector<int32_t> w(words);
  return SynthesizeUtterance(w, snr_db, 17, cfg).noisy;
}

BackendError::Kind KindOf(Recognizer &r, const Waveform &w) {
  try {
    r.Transcribe(w);
  } catch (const BackendError &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no backend error";
  return BackendError::Kind::kReported;
}

void ExpectSameOutput(const AsrOutput &a, const AsrOutput &b) {
  EXPECT_EQ(a.transcript, b.transcript);
  EXPECT_EQ(a.token_confidences, b.token_confidences);
  EXPECT_EQ(a.segments, b.segments);
  EXPECT_EQ(a.class_labels, b.class_labels);
  ASSERT_EQ(a.posterior != nullptr, b.posterior != nullptr);
  if (a.posterior) {
    EXPECT_EQ(*a.posterior, *b.posterior);
  }
}

// Runs the mock server in HTTP mode for the lifetime of the object.
class HttpServer {
 public:
  explicit HttpServer(const std::string &extra_args = "") {
    std::string cmd = kServer + " --transport http --port 0 --posterior-dir " +
                      dir_.path().string() + " " + extra_args;
    int fds[2];
    if (pipe(fds) != 0) return;
    pid_ = fork();
    if (pid_ == 0) {
      dup2(fds[1], STDOUT_FILENO);
      close(fds[0]);
      close(fds[1]);
      execl("/bin/sh", "sh", "-c", ("exec " + cmd).c_str(),
            static_cast<char *>(nullptr));
      _exit(127);
    }
    close(fds[1]);
    FILE *out = fdopen(fds[0], "r");
    char line[256] = {0};
    if (fgets(line, sizeof(line), out)) {
      std::string s(line);
      auto at = s.find("http://");
      if (at != std::string::npos) {
        url_ = s.substr(at);
        while (!url_.empty() && (url_.back() == '\n' || url_.back() == '\r')) {
          url_.pop_back();
        }
      }
    }
    fclose(out);
  }
  ~HttpServer() {
    if (pid_ > 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, nullptr, 0);
    }
  }
  const std::string &url() const { return url_; }

 private:
  testing::TempDir dir_;
  pid_t pid_ = -1;
  std::string url_;
};

TEST(BackendSpecTest, Parse) {
  auto m = BackendSpec::Parse("mock");
  EXPECT_EQ(m.transport, BackendSpec::Transport::kMock);
  auto c = BackendSpec::Parse("cmd:my-asr --flag", 500);
  EXPECT_EQ(c.transport, BackendSpec::Transport::kSubprocess);
  EXPECT_EQ(c.endpoint, "my-asr --flag");
  EXPECT_EQ(c.timeout_ms, 500);
  EXPECT_EQ(c.Id(), "cmd:my-asr --flag");
  auto h = BackendSpec::Parse("http:http://localhost:9/t");
  EXPECT_EQ(h.transport, BackendSpec::Transport::kHttp);
  EXPECT_EQ(h.endpoint, "http://localhost:9/t");
  EXPECT_THROW(BackendSpec::Parse("grpc:x"), InvalidArgument);
  EXPECT_THROW(BackendSpec::Parse("cmd:"), InvalidArgument);
  EXPECT_THROW(BackendSpec::Parse("http:ftp://x"), InvalidArgument);
  EXPECT_THROW(BackendSpec::Parse("mock", 0), InvalidArgument);
  EXPECT_THROW(BackendSpec::Parse("mock:/nonexistent/cfg.json"), DataError);
}

TEST(MockRecognizerTest, MatchesToneAsr) {
  ToneConfig cfg;
  auto w = Speech({2, 6, 1});
  auto rec = MakeRecognizer(BackendSpec::Parse("mock"));
  ExpectSameOutput(rec->Transcribe(w), ToneAsrTranscribe(w, cfg));
  EXPECT_EQ(KindOf(*rec, Waveform(8000, std::vector<float>(10))),
            BackendError::Kind::kReported);
}

TEST(SubprocessRecognizerTest, MatchesInProcessMock) {
  testing::TempDir dir;
  auto spec = BackendSpec::Parse(
      "cmd:" + kServer + " --posterior-dir " + dir.path().string(), 10000);
  auto rec = MakeRecognizer(spec);
  auto mock = MakeRecognizer(BackendSpec::Parse("mock"));
  for (auto w : {Speech({2, 6, 1}), Speech({0}, -5.0), Speech({})}) {
    ExpectSameOutput(rec->Transcribe(w), mock->Transcribe(w));
  }
}

TEST(SubprocessRecognizerTest, TimeoutKillsAndRestarts) {
  testing::TempDir dir;
  SubprocessRecognizer rec(
      kServer + " --delay-ms 2000 --posterior-dir " + dir.path().string(), 200);
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kTimeout);
  auto elapsed = std::chrono::steady_clock::now() - t0;
  EXPECT_LT(elapsed, std::chrono::milliseconds(1500));
}

TEST(SubprocessRecognizerTest, GarbageIsProtocolError) {
  SubprocessRecognizer rec("while read l; do echo garbage; done", 5000);
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kProtocol);
}

TEST(SubprocessRecognizerTest, WrongIdIsProtocolError) {
  SubprocessRecognizer rec(
      "while read l; do echo '{\"id\":\"other\",\"transcript\":\"\","
      "\"segments\":[]}'; done",
      5000);
  try {
    rec.Transcribe(Speech({1}));
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::kProtocol);
    EXPECT_NE(std::string(e.what()).find("id"), std::string::npos);
  }
}

TEST(SubprocessRecognizerTest, MissingArtifactsIsProtocolError) {
  SubprocessRecognizer rec(
      "sed -u 's/^{\"id\":\"\\([^\"]*\\)\".*/{\"id\":\"\\1\",\"transcript\":"
      "\"a\"}/'",
      5000);
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kProtocol);
}

TEST(SubprocessRecognizerTest, BadMagicPosteriorIsCorrupt) {
  testing::TempDir dir;
  testing::WriteFile(dir / "bad.oapm", "JUNK00000000000000000000");
  std::string path = (dir / "bad.oapm").string();
  SubprocessRecognizer rec(
      "sed -u 's|^{\"id\":\"\\([^\"]*\\)\".*|{\"id\":\"\\1\",\"transcript\":"
      "\"a\",\"posterior_path\":\"" +
          path + "\",\"blank_id\":0}|'",
      5000);
  try {
    rec.Transcribe(Speech({1}));
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::kCorruptPosterior);
    EXPECT_NE(std::string(e.what()).find("corrupt posterior"),
              std::string::npos);
  }
}

TEST(SubprocessRecognizerTest, ChildExitIsTransportError) {
  SubprocessRecognizer rec("exit 0", 5000);
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kTransport);
  SubprocessRecognizer missing("/nonexistent/asr-binary", 5000);
  EXPECT_EQ(KindOf(missing, Speech({1})), BackendError::Kind::kTransport);
}

TEST(SubprocessRecognizerTest, ReportedErrorSurfaces) {
  SubprocessRecognizer rec(
      "sed -u 's/^{\"id\":\"\\([^\"]*\\)\".*/{\"id\":\"\\1\",\"transcript\":"
      "\"\",\"error\":{\"code\":\"artifact_unsupported\",\"message\":\"m\"}}/'",
      5000);
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kReported);
}

TEST(HttpRecognizerTest, MatchesInProcessMock) {
  HttpServer server;
  ASSERT_FALSE(server.url().empty());
  auto rec = MakeRecognizer(BackendSpec::Parse("http:" + server.url(), 10000));
  auto mock = MakeRecognizer(BackendSpec::Parse("mock"));
  for (auto w : {Speech({3, 3, 7}), Speech({5}, 0.0)}) {
    ExpectSameOutput(rec->Transcribe(w), mock->Transcribe(w));
  }
}

TEST(HttpRecognizerTest, Timeout) {
  HttpServer server("--delay-ms 2000");
  ASSERT_FALSE(server.url().empty());
  HttpRecognizer rec(server.url(), 200);
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kTimeout);
}

TEST(HttpRecognizerTest, Unreachable) {
  HttpRecognizer rec("http://127.0.0.1:1/transcribe", 1000);
  EXPECT_EQ(KindOf(rec, Speech({1})), BackendError::Kind::kTransport);
}

TEST(DecodeResponseLineTest, Checks) {
  EXPECT_NO_THROW(DecodeResponseLine(
      R"({"id":"a","transcript":"x","token_confidences":[0.5]})", "a"));
  EXPECT_THROW(DecodeResponseLine(
                   R"({"id":"b","transcript":"x","token_confidences":[0.5]})",
                   "a"),
               BackendError);
}

}  // namespace
}  // namespace oafuse
