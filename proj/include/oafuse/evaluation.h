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

#ifndef OAFUSE_EVALUATION_H_
#define OAFUSE_EVALUATION_H_

#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "oafuse/asr_output.h"
#include "oafuse/fusion.h"
#include "oafuse/manifest.h"
#include "oafuse/metrics.h"
#include "oafuse/recognizer.h"
#include "oafuse/signal.h"

namespace oafuse {

struct EvalOptions {
  ConfidenceMode mode = ConfidenceMode::Token();
  double eps = kDefaultEps;
  int32_t workers = 1;
  NormalizePolicy normalize = NormalizePolicy::kBasic;
  double max_len_mismatch_ratio = kDefaultMaxLenMismatchRatio;
};

// Decodes each distinct waveform at most once, shared by all workers.
// Concurrent requests for the same waveform wait on the first decode.
class TranscriptionCache {
 public:
  AsrOutput Transcribe(const Waveform &w, Recognizer &recognizer);

  // Number of backend calls made so far.
  int64_t decodes() const;

 private:
  struct Slot {
    Waveform audio;
    std::shared_future<AsrOutput> result;
  };

  mutable std::mutex mu_;
  std::multimap<uint64_t, std::shared_ptr<Slot>> slots_;
  int64_t decodes_ = 0;
};

// Everything about one utterance that does not depend on the strategy.
struct UtteranceContext {
  std::string id;
  Waveform noisy;
  Waveform enhanced;
  AsrOutput out_noisy;
  AsrOutput out_enhanced;
  double conf_noisy = 0.0;
  double conf_enhanced = 0.0;
  std::optional<TokenSequence> ref;
  std::optional<EditStats> stats_noisy;
  std::optional<EditStats> stats_enhanced;
};

// Loads and aligns the pair, decodes both and scores them. Throws
// DataError (audio, alignment) or BackendError.
UtteranceContext PrepareUtterance(const ManifestEntry &entry,
                                  Recognizer &recognizer,
                                  TranscriptionCache &cache,
                                  const EvalOptions &opts);

struct StrategyResult {
  FusionWeight weight;
  Waveform fused;
  AsrOutput output;
  std::optional<EditStats> stats;  // when a reference is available
};

// Throws DataError when the entry lacks a field the strategy needs.
void RequireInputs(const ManifestEntry &entry, const WeightStrategy &s);

// Computes the weight, fuses and decodes the fused signal. Switch reuses the
// selected input's decode instead of decoding again.
StrategyResult RunStrategy(const UtteranceContext &ctx,
                           const ManifestEntry &entry,
                           const WeightStrategy &strategy,
                           Recognizer &recognizer, TranscriptionCache &cache,
                           const EvalOptions &opts);

using RecognizerFactory = std::function<std::unique_ptr<Recognizer>()>;

struct UtteranceScore {
  std::string id;
  EditStats stats;
  double weight = 0.0;  // mean S' for frame weights
  friend bool operator==(const UtteranceScore &,
                         const UtteranceScore &) = default;
};

struct MethodRow {
  std::string method;
  std::vector<UtteranceScore> utterances;  // sorted by id

  EditStats Total() const;
  double CorpusWer() const;
  double MeanWeight() const;
  friend bool operator==(const MethodRow &, const MethodRow &) = default;
};

struct UtteranceFailure {
  std::string id;
  std::string message;
  friend bool operator==(const UtteranceFailure &,
                         const UtteranceFailure &) = default;
};

struct ReportMetadata {
  std::string backend;
  std::string conf_mode;
  double eps = kDefaultEps;
  std::string normalize;
  std::optional<uint64_t> seed;
  std::vector<std::string> strategies;  // CLI tokens
  friend bool operator==(const ReportMetadata &,
                         const ReportMetadata &) = default;
};

struct EvalReport {
  ReportMetadata metadata;
  // "Noisy y", "Enhanced x̂", then strategies in rank order. Empty when no
  // utterance was evaluated.
  std::vector<MethodRow> rows;
  // Utterances whose decoding failed; excluded from every row.
  std::vector<UtteranceFailure> failures;
  friend bool operator==(const EvalReport &, const EvalReport &) = default;
};

inline constexpr const char *kNoisyRowName = "Noisy y";
inline constexpr const char *kEnhancedRowName = "Enhanced x̂";

struct EvalRun {
  EvalReport report;
  int64_t decodes = 0;
};

// Every entry needs ref_text plus whatever the strategies require (checked
// up front; DataError). Backend failures mark the utterance failed.
EvalRun Evaluate(const std::vector<ManifestEntry> &entries,
                 std::vector<WeightStrategy> strategies,
                 const RecognizerFactory &factory, const EvalOptions &opts);

enum class Group { kAmbiguous, kConfidenceCorrect, kMiscalibrated };
enum class Subgroup { kOaWin, kSwitchWin, kTie };

std::string_view GroupName(Group g);
std::string_view SubgroupName(Subgroup s);

// Equal error counts: Ambiguous. Otherwise the signal with more errors is
// checked: strictly lower confidence is ConfidenceCorrect, anything else is
// Miscalibrated.
Group ClassifyGroup(int64_t errors_noisy, int64_t errors_enhanced,
                    double conf_noisy, double conf_enhanced);
Subgroup ClassifySubgroup(int64_t errors_oa, int64_t errors_switch);

struct GroupedUtterance {
  std::string id;
  Group group = Group::kAmbiguous;
  Subgroup subgroup = Subgroup::kTie;
  EditStats noisy, enhanced, switched, oa;
  double conf_noisy = 0.0;
  double conf_enhanced = 0.0;
  friend bool operator==(const GroupedUtterance &,
                         const GroupedUtterance &) = default;
};

struct GroupCell {
  Group group = Group::kAmbiguous;
  Subgroup subgroup = Subgroup::kTie;
  int64_t count = 0;
  double share = 0.0;  // count / size of the group, 0 for an empty group
  EditStats noisy, enhanced, switched, oa;  // summed over the cell
  friend bool operator==(const GroupCell &, const GroupCell &) = default;
};

struct GroupAnalysis {
  ReportMetadata metadata;
  std::vector<GroupCell> cells;  // all 9, group-major
  std::vector<GroupedUtterance> utterances;  // sorted by id
  std::vector<UtteranceFailure> failures;
  friend bool operator==(const GroupAnalysis &,
                         const GroupAnalysis &) = default;
};

// Builds the 9 cells from per-utterance assignments.
std::vector<GroupCell> BuildCells(const std::vector<GroupedUtterance> &utts);

// Compares Conf-OA against Conf-Switch per utterance. Requires ref_text.
GroupAnalysis AnalyzeGroups(const std::vector<ManifestEntry> &entries,
                            const RecognizerFactory &factory,
                            const EvalOptions &opts);

}  // namespace oafuse

#endif  // OAFUSE_EVALUATION_H_
