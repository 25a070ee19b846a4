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

#ifndef OAFUSE_REPORT_H_
#define OAFUSE_REPORT_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "oafuse/evaluation.h"

namespace oafuse {

enum class ReportFormat { kTsv, kJson };

ReportFormat ParseReportFormat(std::string_view name);

// TSV layout: "# key: value" metadata lines, a summary table, a blank line,
// then one row per (method, utterance). WER columns are percentages with 2
// decimals, weights have 4.
std::string FormatReport(const EvalReport &report, ReportFormat format);
std::string FormatReport(const GroupAnalysis &analysis, ReportFormat format);

// Writes FormatReport(...) to `path`; "-" means stdout. Throws DataError.
void EmitReport(const EvalReport &report, ReportFormat format,
                const std::filesystem::path &path);
void EmitReport(const GroupAnalysis &analysis, ReportFormat format,
                const std::filesystem::path &path);

// Inverse of the JSON format. Throws DataError.
EvalReport ParseEvalReportJson(std::string_view text);
GroupAnalysis ParseGroupAnalysisJson(std::string_view text);

}  // namespace oafuse

#endif  // OAFUSE_REPORT_H_
