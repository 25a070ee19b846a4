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

#ifndef OAFUSE_METRICS_H_
#define OAFUSE_METRICS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oafuse {

using TokenSequence = std::vector<std::string>;

enum class NormalizePolicy {
  kBasic,  // lowercase, punctuation to spaces except intra-word apostrophes
  kNone,   // whitespace split only
};

NormalizePolicy ParseNormalizePolicy(std::string_view name);

TokenSequence NormalizeText(std::string_view raw, NormalizePolicy policy);

// Character tokens for CER: every non-whitespace byte of the joined words.
TokenSequence CharacterTokens(const TokenSequence &words);

struct EditStats {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t ref_len = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }

  EditStats &operator+=(const EditStats &o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_len += o.ref_len;
    return *this;
  }

  friend bool operator==(const EditStats &, const EditStats &) = default;
};

// Unit-cost Levenshtein alignment. The decomposition comes from one optimal
// path; the backtrace prefers substitution/match, then insertion, then
// deletion.
EditStats EditDistance(const TokenSequence &ref, const TokenSequence &hyp);

// (S + D + I) / ref_len. An empty reference gives 0 for an empty hypothesis
// and +infinity otherwise.
double Wer(const EditStats &stats);

// Errors over max(ref_len, 1): an empty reference counts every hypothesis
// token as one error. Used for per-utterance report columns.
double WerForReport(const EditStats &stats);

// Sum of errors over sum of reference tokens (ref_len floored at 1 per
// utterance so empty references still count their insertions).
double CorpusWer(const std::vector<EditStats> &per_utterance);

// Training labels for the classifier baselines, from edit distances of the
// noisy and enhanced transcripts to the reference.
// 0 when noisy is strictly closer, 1 otherwise (ties land in 1).
int ClassifierLabel2(int64_t d_noisy, int64_t d_enhanced);
// 0 noisy closer, 1 enhanced closer, 2 tie.
int ClassifierLabel3(int64_t d_noisy, int64_t d_enhanced);

}  // namespace oafuse

#endif  // OAFUSE_METRICS_H_
