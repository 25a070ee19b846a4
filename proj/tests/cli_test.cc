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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>

#include "json.hpp"
#include "oafuse/report.h"
#include "oafuse/signal.h"
#include "test_util.h"

namespace oafuse {
namespace {

using testing::TempDir;

const std::string kCli = OAFUSE_CLI;
const std::string kServer = OAFUSE_MOCK_SERVER;
const std::string kProtocolDir = std::string(OAFUSE_TEST_DATA_DIR) + "/protocol";

struct Result {
  int code = -1;
  std::string out;
};

// Runs a shell command line; stderr is discarded.
Result Shell(const std::string &cmd) {
  Result r;
  FILE *p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Result Cli(const std::string &args) { return Shell(kCli + " " + args); }

std::string Synth(const TempDir &dir, const std::string &extra = "") {
  auto r = Cli("synth --out-dir " + dir.path().string() + " --n-utts 4 " + extra);
  EXPECT_EQ(r.code, 0);
  return (dir / "manifest.jsonl").string();
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Cli("").code, 1);
  EXPECT_EQ(Cli("frobnicate").code, 1);
  EXPECT_EQ(Cli("eval").code, 1);
  EXPECT_EQ(Cli("eval --manifest x --bogus").code, 1);
  EXPECT_EQ(Cli("--help").code, 0);
}

TEST(CliTest, EvalHappyPath) {
  TempDir dir;
  auto m = Synth(dir);
  auto r = Cli("eval --manifest " + m + " --backend mock:" +
               (dir / "tone_config.json").string() + " --seed 42");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# seed: 42\n"), std::string::npos);
  EXPECT_NE(r.out.find("\nConf-OA\t"), std::string::npos);
  EXPECT_NE(r.out.find("\nWER-OA\t"), std::string::npos);
  EXPECT_NE(r.out.find("\nConf-Switch\t"), std::string::npos);
}

TEST(CliTest, EvalJsonParses) {
  TempDir dir;
  auto m = Synth(dir);
  auto out = (dir / "r.json").string();
  auto r = Cli("eval --manifest " + m + " --format json --strategies "
               "confidence,snr-clip --out " + out);
  ASSERT_EQ(r.code, 0);
  auto report = ParseEvalReportJson(testing::ReadFile(out));
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[3].method, "SNR-OA_clip");
}

TEST(CliTest, EvalErrors) {
  TempDir dir;
  auto m = Synth(dir);
  EXPECT_EQ(Cli("eval --manifest " + m + " --strategies nope").code, 1);
  EXPECT_EQ(Cli("eval --manifest " + m + " --workers 0").code, 1);
  EXPECT_EQ(Cli("eval --manifest " + m + " --conf-mode fancy").code, 1);
  EXPECT_EQ(Cli("eval --manifest " + m + " --strategies dnsmos").code, 2);
  EXPECT_EQ(Cli("eval --manifest /nonexistent/m.jsonl").code, 2);
  EXPECT_EQ(Cli("eval --manifest " + m + " --backend 'cmd:exit 0'").code, 3);
}

TEST(CliTest, EmptyManifestGivesHeaderOnlyReport) {
  TempDir dir;
  testing::WriteFile(dir / "empty.jsonl", "");
  auto r = Cli("eval --manifest " + (dir / "empty.jsonl").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.ends_with("weight\n")) << r.out;
}

TEST(CliTest, SubprocessBackendMatchesMock) {
  TempDir dir;
  auto m = Synth(dir);
  auto cfg = (dir / "tone_config.json").string();
  auto a = Cli("eval --manifest " + m + " --backend mock:" + cfg);
  auto b = Cli("eval --manifest " + m + " --backend 'cmd:" + kServer +
               " --tone-config " + cfg + " --posterior-dir " +
               (dir / "post").string() + "' --workers 2");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  // Only the backend metadata line differs.
  auto body = [](const std::string &s) { return s.substr(s.find("# conf_mode")); };
  EXPECT_EQ(body(a.out), body(b.out));
}

TEST(CliTest, AnalyzeAndFrameEval) {
  TempDir dir;
  auto m = Synth(dir);
  auto a = Cli("analyze --manifest " + m);
  EXPECT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("# cell_wer: corpus\n"), std::string::npos);
  auto f = Cli("frame-eval --manifest " + m + " --conf-mode ctc");
  EXPECT_EQ(f.code, 0);
  EXPECT_NE(f.out.find("\nFrame-Conf-OA\t"), std::string::npos);
  EXPECT_NE(f.out.find("# conf_mode: ctc:0.33\n"), std::string::npos);
}

TEST(CliTest, FuseAndTranscribe) {
  TempDir dir;
  Synth(dir);
  auto y = (dir / "noisy/utt0000.wav").string();
  auto x = (dir / "enhanced/utt0000.wav").string();
  auto out = (dir / "f.wav").string();
  auto r = Cli("fuse --noisy " + y + " --enhanced " + x + " --out " + out +
               " --weight 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(LoadWav(out), LoadWav(y));

  r = Cli("fuse --noisy " + y + " --enhanced " + x + " --out " + out +
          " --strategy snr --snr-db 10");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["weight"].get<double>(), 0.5);
  EXPECT_EQ(Cli("fuse --noisy " + y + " --enhanced " + x + " --out " + out +
                " --strategy snr")
                .code,
            2);

  r = Cli("transcribe --audio " + y);
  ASSERT_EQ(r.code, 0);
  auto t = nlohmann::json::parse(r.out);
  EXPECT_TRUE(t["transcript"].is_string());
  EXPECT_TRUE(t["confidence"].is_number());
  EXPECT_EQ(t["posterior"]["classes"].get<int>(), 9);
  EXPECT_EQ(Cli("transcribe --audio /nonexistent.wav").code, 2);
}

TEST(CliTest, ValidateConformanceCorpus) {
  auto ok = Shell("cd " + kProtocolDir + " && " + kCli +
                " validate --input responses.jsonl");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("20 lines checked, 0 invalid"), std::string::npos);
  auto req = Shell("cd " + kProtocolDir + " && " + kCli +
                 " validate --kind request --input requests.jsonl");
  EXPECT_EQ(req.code, 0);
  auto bad = Shell("cd " + kProtocolDir + " && " + kCli +
                 " validate --input invalid_responses.jsonl");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("15 lines checked, 15 invalid"), std::string::npos)
      << bad.out;
  EXPECT_NE(bad.out.find("invalid_responses.jsonl:1: invalid:"),
            std::string::npos);
  EXPECT_EQ(Cli("validate --input x --kind neither").code, 1);
}

TEST(CliTest, SynthIsDeterministic) {
  TempDir a, b;
  Synth(a, "--seed 5");
  Synth(b, "--seed 5");
  EXPECT_EQ(testing::ReadFile(a / "noisy/utt0003.wav"),
            testing::ReadFile(b / "noisy/utt0003.wav"));
  EXPECT_EQ(testing::ReadFile(a / "manifest.jsonl"),
            testing::ReadFile(b / "manifest.jsonl"));
}

}  // namespace
}  // namespace oafuse
