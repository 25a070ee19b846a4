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

#include "oafuse/report.h"

#include <gtest/gtest.h>

#include "oafuse/error.h"
#include "test_util.h"

namespace oafuse {
namespace {

EvalReport SampleReport() {
  EvalReport r;
  r.metadata = {"mock:test", "token", 1e-8, "basic", 42, {"confidence"}};
  r.rows = {
      {kNoisyRowName, {{"u1", {1, 0, 0, 4}, 1.0}, {"u2", {0, 0, 0, 6}, 1.0}}},
      {kEnhancedRowName, {{"u1", {0, 2, 0, 4}, 0.0}, {"u2", {0, 0, 1, 6}, 0.0}}},
      {"Conf-OA", {{"u1", {0, 0, 0, 4}, 0.61234}, {"u2", {1, 0, 0, 6}, 0.5}}},
  };
  r.failures = {{"u3", "backend timed out"}};
  return r;
}

GroupAnalysis SampleAnalysis() {
  GroupAnalysis ga;
  ga.metadata = {"mock:test", "ctc:0.33", 1e-8, "none", std::nullopt,
                 {"confidence", "switch"}};
  GroupedUtterance a;
  a.id = "u1";
  a.group = Group::kMiscalibrated;
  a.subgroup = Subgroup::kOaWin;
  a.noisy = {0, 0, 0, 4};
  a.enhanced = {0, 2, 0, 4};
  a.switched = {0, 2, 0, 4};
  a.oa = {0, 1, 0, 4};
  a.conf_noisy = 0.25;
  a.conf_enhanced = 0.75;
  GroupedUtterance b;
  b.id = "u2";
  b.noisy = b.enhanced = b.switched = b.oa = {1, 0, 0, 5};
  b.conf_noisy = b.conf_enhanced = 0.5;
  ga.utterances = {a, b};
  ga.cells = BuildCells(ga.utterances);
  return ga;
}

TEST(ReportTest, EvalTsvLayout) {
  const std::string want =
      "# backend: mock:test\n"
      "# conf_mode: token\n"
      "# eps: 1e-08\n"
      "# normalize: basic\n"
      "# seed: 42\n"
      "# strategies: confidence\n"
      "# failed_utterances: 1\n"
      "# failed: u3\n"
      "method\tcorpus_wer_pct\terrors\tref_tokens\tmean_weight\tutterances\n"
      "Noisy y\t10.00\t1\t10\t1.0000\t2\n"
      "Enhanced x̂\t30.00\t3\t10\t0.0000\t2\n"
      "Conf-OA\t10.00\t1\t10\t0.5562\t2\n"
      "\n"
      "method\tutt_id\twer_pct\terrors\tref_tokens\tweight\n"
      "Noisy y\tu1\t25.00\t1\t4\t1.0000\n"
      "Noisy y\tu2\t0.00\t0\t6\t1.0000\n"
      "Enhanced x̂\tu1\t50.00\t2\t4\t0.0000\n"
      "Enhanced x̂\tu2\t16.67\t1\t6\t0.0000\n"
      "Conf-OA\tu1\t0.00\t0\t4\t0.6123\n"
      "Conf-OA\tu2\t16.67\t1\t6\t0.5000\n";
  EXPECT_EQ(FormatReport(SampleReport(), ReportFormat::kTsv), want);
}

TEST(ReportTest, EmptyCorpusIsHeaderOnly) {
  EvalReport r;
  r.metadata = {"mock", "token", 1e-8, "basic", std::nullopt, {}};
  auto tsv = FormatReport(r, ReportFormat::kTsv);
  EXPECT_NE(tsv.find("# seed: -\n"), std::string::npos);
  EXPECT_TRUE(tsv.ends_with(
      "method\tcorpus_wer_pct\terrors\tref_tokens\tmean_weight\tutterances\n"
      "\n"
      "method\tutt_id\twer_pct\terrors\tref_tokens\tweight\n"));
}

TEST(ReportTest, DeterministicEmission) {
  testing::TempDir dir;
  EmitReport(SampleReport(), ReportFormat::kTsv, dir / "a.tsv");
  EmitReport(SampleReport(), ReportFormat::kTsv, dir / "b.tsv");
  EXPECT_EQ(testing::ReadFile(dir / "a.tsv"), testing::ReadFile(dir / "b.tsv"));
  EmitReport(SampleAnalysis(), ReportFormat::kJson, dir / "a.json");
  EmitReport(SampleAnalysis(), ReportFormat::kJson, dir / "b.json");
  EXPECT_EQ(testing::ReadFile(dir / "a.json"),
            testing::ReadFile(dir / "b.json"));
  EXPECT_THROW(EmitReport(SampleReport(), ReportFormat::kTsv,
                          "/nonexistent_dir/r.tsv"),
               DataError);
}

TEST(ReportTest, JsonRoundTrip) {
  auto r = SampleReport();
  EXPECT_EQ(ParseEvalReportJson(FormatReport(r, ReportFormat::kJson)), r);
  EvalReport empty;
  EXPECT_EQ(ParseEvalReportJson(FormatReport(empty, ReportFormat::kJson)),
            empty);
  auto ga = SampleAnalysis();
  EXPECT_EQ(ParseGroupAnalysisJson(FormatReport(ga, ReportFormat::kJson)), ga);
  EXPECT_THROW(ParseEvalReportJson("{"), DataError);
  EXPECT_THROW(ParseGroupAnalysisJson("[]"), DataError);
}

TEST(ReportTest, AnalysisTsvLayout) {
  auto tsv = FormatReport(SampleAnalysis(), ReportFormat::kTsv);
  EXPECT_NE(tsv.find("# cell_wer: corpus\n"), std::string::npos);
  EXPECT_NE(tsv.find("# seed: -\n"), std::string::npos);
  EXPECT_NE(tsv.find("Ambiguous\tTie\t1\t1.0000\t20.00\t20.00\t20.00\t20.00\n"),
            std::string::npos)
      << tsv;
  EXPECT_NE(tsv.find("Miscalibrated\tOaWin\t1\t1.0000\t0.00\t50.00\t50.00\t"
                     "25.00\n"),
            std::string::npos);
  EXPECT_NE(tsv.find("ConfidenceCorrect\tOaWin\t0\t0.0000\t-\t-\t-\t-\n"),
            std::string::npos);
  EXPECT_NE(tsv.find("u1\tMiscalibrated\tOaWin\t0.00\t50.00\t50.00\t25.00\t"
                     "0.250000\t0.750000\n"),
            std::string::npos);
}

TEST(ReportTest, EmptyAnalysisStillListsCells) {
  GroupAnalysis ga;
  ga.cells = BuildCells({});
  auto tsv = FormatReport(ga, ReportFormat::kTsv);
  int rows = 0;
  for (std::size_t at = tsv.find("\t0\t0.0000\t-"); at != std::string::npos;
       at = tsv.find("\t0\t0.0000\t-", at + 1)) {
    ++rows;
  }
  EXPECT_EQ(rows, 9);
}

TEST(ReportTest, ParseFormat) {
  EXPECT_EQ(ParseReportFormat("tsv"), ReportFormat::kTsv);
  EXPECT_EQ(ParseReportFormat("json"), ReportFormat::kJson);
  EXPECT_THROW(ParseReportFormat("csv"), InvalidArgument);
}

}  // namespace
}  // namespace oafuse
