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

#include <cstdio>
#include <fstream>
#include <iostream>

#include "fmt/format.h"
#include "json.hpp"
#include "oafuse/error.h"

namespace oafuse {

namespace {

using nlohmann::ordered_json;

std::string Pct(double wer) { return fmt::format("{:.2f}", 100.0 * wer); }
std::string W4(double w) { return fmt::format("{:.4f}", w); }

void AppendMetadata(std::string &out, const ReportMetadata &m,
                    std::size_t failed) {
  out += fmt::format("# backend: {}\n", m.backend);
  out += fmt::format("# conf_mode: {}\n", m.conf_mode);
  out += fmt::format("# eps: {}\n", m.eps);
  out += fmt::format("# normalize: {}\n", m.normalize);
  out += fmt::format("# seed: {}\n", m.seed ? std::to_string(*m.seed) : "-");
  out += fmt::format("# strategies: {}\n", fmt::join(m.strategies, ","));
  out += fmt::format("# failed_utterances: {}\n", failed);
}

void AppendFailures(std::string &out,
                    const std::vector<UtteranceFailure> &failures) {
  for (const auto &f : failures) out += fmt::format("# failed: {}\n", f.id);
}

ordered_json StatsJson(const EditStats &s) {
  ordered_json j;
  j["substitutions"] = s.substitutions;
  j["deletions"] = s.deletions;
  j["insertions"] = s.insertions;
  j["ref_len"] = s.ref_len;
  return j;
}

EditStats StatsFromJson(const ordered_json &j) {
  EditStats s;
  s.substitutions = j.at("substitutions").get<int64_t>();
  s.deletions = j.at("deletions").get<int64_t>();
  s.insertions = j.at("insertions").get<int64_t>();
  s.ref_len = j.at("ref_len").get<int64_t>();
  return s;
}

ordered_json MetadataJson(const ReportMetadata &m, std::size_t failed) {
  ordered_json j;
  j["backend"] = m.backend;
  j["conf_mode"] = m.conf_mode;
  j["eps"] = m.eps;
  j["normalize"] = m.normalize;
  j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json(nullptr);
  j["strategies"] = m.strategies;
  j["failed_utterances"] = failed;
  return j;
}

ReportMetadata MetadataFromJson(const ordered_json &j) {
  ReportMetadata m;
  m.backend = j.at("backend").get<std::string>();
  m.conf_mode = j.at("conf_mode").get<std::string>();
  m.eps = j.at("eps").get<double>();
  m.normalize = j.at("normalize").get<std::string>();
  if (!j.at("seed").is_null()) m.seed = j.at("seed").get<uint64_t>();
  m.strategies = j.at("strategies").get<std::vector<std::string>>();
  return m;
}

ordered_json FailuresJson(const std::vector<UtteranceFailure> &failures) {
  ordered_json arr = ordered_json::array();
  for (const auto &f : failures) {
    arr.push_back({{"id", f.id}, {"message", f.message}});
  }
  return arr;
}

std::vector<UtteranceFailure> FailuresFromJson(const ordered_json &j) {
  std::vector<UtteranceFailure> out;
  for (const auto &f : j) {
    out.push_back(
        {f.at("id").get<std::string>(), f.at("message").get<std::string>()});
  }
  return out;
}

Group GroupFromName(const std::string &name) {
  for (Group g : {Group::kAmbiguous, Group::kConfidenceCorrect,
                  Group::kMiscalibrated}) {
    if (GroupName(g) == name) return g;
  }
  throw DataError(fmt::format("unknown group '{}'", name));
}

Subgroup SubgroupFromName(const std::string &name) {
  for (Subgroup s : {Subgroup::kOaWin, Subgroup::kSwitchWin, Subgroup::kTie}) {
    if (SubgroupName(s) == name) return s;
  }
  throw DataError(fmt::format("unknown subgroup '{}'", name));
}

void WriteText(const std::string &text, const std::filesystem::path &path) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(fmt::format("cannot write '{}'", path.string()));
  os << text;
  if (!os) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "tsv") return ReportFormat::kTsv;
  if (name == "json") return ReportFormat::kJson;
  throw InvalidArgument(fmt::format("unknown report format '{}'", name));
}

std::string FormatReport(const EvalReport &report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json j;
    j["metadata"] = MetadataJson(report.metadata, report.failures.size());
    ordered_json methods = ordered_json::array();
    for (const auto &row : report.rows) {
      ordered_json m;
      m["method"] = row.method;
      m["corpus_wer"] = row.CorpusWer();
      m["mean_weight"] = row.MeanWeight();
      ordered_json utts = ordered_json::array();
      for (const auto &u : row.utterances) {
        ordered_json ju;
        ju["id"] = u.id;
        ju["stats"] = StatsJson(u.stats);
        ju["weight"] = u.weight;
        utts.push_back(std::move(ju));
      }
      m["utterances"] = std::move(utts);
      methods.push_back(std::move(m));
    }
    j["methods"] = std::move(methods);
    j["failures"] = FailuresJson(report.failures);
    return j.dump(2) + "\n";
  }

  std::string out;
  AppendMetadata(out, report.metadata, report.failures.size());
  AppendFailures(out, report.failures);
  out += "method\tcorpus_wer_pct\terrors\tref_tokens\tmean_weight\tutterances\n";
  for (const auto &row : report.rows) {
    auto total = row.Total();
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", row.method,
                       Pct(row.CorpusWer()), total.errors(), total.ref_len,
                       W4(row.MeanWeight()), row.utterances.size());
  }
  out += "\n";
  out += "method\tutt_id\twer_pct\terrors\tref_tokens\tweight\n";
  for (const auto &row : report.rows) {
    for (const auto &u : row.utterances) {
      out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", row.method, u.id,
                         Pct(WerForReport(u.stats)), u.stats.errors(),
                         u.stats.ref_len, W4(u.weight));
    }
  }
  return out;
}

std::string FormatReport(const GroupAnalysis &analysis, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json j;
    j["metadata"] = MetadataJson(analysis.metadata, analysis.failures.size());
    j["metadata"]["cell_wer"] = "corpus";
    ordered_json cells = ordered_json::array();
    for (const auto &c : analysis.cells) {
      ordered_json jc;
      jc["group"] = GroupName(c.group);
      jc["subgroup"] = SubgroupName(c.subgroup);
      jc["count"] = c.count;
      jc["share"] = c.share;
      jc["noisy"] = StatsJson(c.noisy);
      jc["enhanced"] = StatsJson(c.enhanced);
      jc["switch"] = StatsJson(c.switched);
      jc["oa"] = StatsJson(c.oa);
      cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    ordered_json utts = ordered_json::array();
    for (const auto &u : analysis.utterances) {
      ordered_json ju;
      ju["id"] = u.id;
      ju["group"] = GroupName(u.group);
      ju["subgroup"] = SubgroupName(u.subgroup);
      ju["noisy"] = StatsJson(u.noisy);
      ju["enhanced"] = StatsJson(u.enhanced);
      ju["switch"] = StatsJson(u.switched);
      ju["oa"] = StatsJson(u.oa);
      ju["conf_noisy"] = u.conf_noisy;
      ju["conf_enhanced"] = u.conf_enhanced;
      utts.push_back(std::move(ju));
    }
    j["utterances"] = std::move(utts);
    j["failures"] = FailuresJson(analysis.failures);
    return j.dump(2) + "\n";
  }

  std::string out;
  AppendMetadata(out, analysis.metadata, analysis.failures.size());
  out += "# cell_wer: corpus\n";
  AppendFailures(out, analysis.failures);
  out += "group\tsubgroup\tcount\tshare\twer_noisy_pct\twer_enhanced_pct\t"
         "wer_switch_pct\twer_oa_pct\n";
  for (const auto &c : analysis.cells) {
    auto cell = [&c](const EditStats &s) {
      return c.count == 0 ? std::string("-") : Pct(WerForReport(s));
    };
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", GroupName(c.group),
                       SubgroupName(c.subgroup), c.count, W4(c.share),
                       cell(c.noisy), cell(c.enhanced), cell(c.switched),
                       cell(c.oa));
  }
  out += "\n";
  out += "utt_id\tgroup\tsubgroup\twer_noisy_pct\twer_enhanced_pct\t"
         "wer_switch_pct\twer_oa_pct\tconf_noisy\tconf_enhanced\n";
  for (const auto &u : analysis.utterances) {
    out += fmt::format(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6f}\t{:.6f}\n", u.id,
        GroupName(u.group), SubgroupName(u.subgroup),
        Pct(WerForReport(u.noisy)), Pct(WerForReport(u.enhanced)),
        Pct(WerForReport(u.switched)), Pct(WerForReport(u.oa)), u.conf_noisy,
        u.conf_enhanced);
  }
  return out;
}

void EmitReport(const EvalReport &report, ReportFormat format,
                const std::filesystem::path &path) {
  WriteText(FormatReport(report, format), path);
}

void EmitReport(const GroupAnalysis &analysis, ReportFormat format,
                const std::filesystem::path &path) {
  WriteText(FormatReport(analysis, format), path);
}

EvalReport ParseEvalReportJson(std::string_view text) {
  try {
    auto j = ordered_json::parse(text);
    EvalReport r;
    r.metadata = MetadataFromJson(j.at("metadata"));
    for (const auto &m : j.at("methods")) {
      MethodRow row;
      row.method = m.at("method").get<std::string>();
      for (const auto &u : m.at("utterances")) {
        row.utterances.push_back({u.at("id").get<std::string>(),
                                  StatsFromJson(u.at("stats")),
                                  u.at("weight").get<double>()});
      }
      r.rows.push_back(std::move(row));
    }
    r.failures = FailuresFromJson(j.at("failures"));
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(fmt::format("bad report JSON: {}", e.what()));
  }
}

GroupAnalysis ParseGroupAnalysisJson(std::string_view text) {
  try {
    auto j = ordered_json::parse(text);
    GroupAnalysis ga;
    ga.metadata = MetadataFromJson(j.at("metadata"));
    for (const auto &c : j.at("cells")) {
      GroupCell cell;
      cell.group = GroupFromName(c.at("group").get<std::string>());
      cell.subgroup = SubgroupFromName(c.at("subgroup").get<std::string>());
      cell.count = c.at("count").get<int64_t>();
      cell.share = c.at("share").get<double>();
      cell.noisy = StatsFromJson(c.at("noisy"));
      cell.enhanced = StatsFromJson(c.at("enhanced"));
      cell.switched = StatsFromJson(c.at("switch"));
      cell.oa = StatsFromJson(c.at("oa"));
      ga.cells.push_back(cell);
    }
    for (const auto &u : j.at("utterances")) {
      GroupedUtterance g;
      g.id = u.at("id").get<std::string>();
      g.group = GroupFromName(u.at("group").get<std::string>());
      g.subgroup = SubgroupFromName(u.at("subgroup").get<std::string>());
      g.noisy = StatsFromJson(u.at("noisy"));
      g.enhanced = StatsFromJson(u.at("enhanced"));
      g.switched = StatsFromJson(u.at("switch"));
      g.oa = StatsFromJson(u.at("oa"));
      g.conf_noisy = u.at("conf_noisy").get<double>();
      g.conf_enhanced = u.at("conf_enhanced").get<double>();
      ga.utterances.push_back(std::move(g));
    }
    ga.failures = FailuresFromJson(j.at("failures"));
    return ga;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(fmt::format("bad report JSON: {}", e.what()));
  }
}

}  // namespace oafuse
