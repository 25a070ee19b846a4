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

#include "oafuse/metrics.h"

#include <algorithm>
#include <cctype>
#include <limits>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

bool IsAsciiAlnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

TokenSequence SplitWhitespace(std::string_view s) {
  TokenSequence out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

NormalizePolicy ParseNormalizePolicy(std::string_view name) {
  if (name == "basic") return NormalizePolicy::kBasic;
  if (name == "none") return NormalizePolicy::kNone;
  throw InvalidArgument(
      fmt::format("unknown normalization '{}' (expected basic|none)", name));
}

TokenSequence NormalizeText(std::string_view raw, NormalizePolicy policy) {
  if (policy == NormalizePolicy::kNone) return SplitWhitespace(raw);

  std::string cleaned(raw.size(), ' ');
  for (std::size_t i = 0; i != raw.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(raw[i]);
    if (c == '\'') {
      bool intra = i > 0 && i + 1 < raw.size() && IsAsciiAlnum(raw[i - 1]) &&
                   IsAsciiAlnum(raw[i + 1]);
      cleaned[i] = intra ? '\'' : ' ';
    } else if (c < 0x80 && std::ispunct(c)) {
      cleaned[i] = ' ';
    } else {
      cleaned[i] = static_cast<char>(std::tolower(c));
    }
  }
  return SplitWhitespace(cleaned);
}

TokenSequence CharacterTokens(const TokenSequence &words) {
  TokenSequence out;
  for (const auto &w : words) {
    for (char c : w) out.emplace_back(1, c);
  }
  return out;
}

EditStats EditDistance(const TokenSequence &ref, const TokenSequence &hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // cost[i][j]: distance between ref[0..i) and hyp[0..j).
  std::vector<int64_t> cost((n + 1) * (m + 1));
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = 0; i <= n; ++i) cost[at(i, 0)] = static_cast<int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[at(0, j)] = static_cast<int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      int64_t diag = cost[at(i - 1, j - 1)] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int64_t del = cost[at(i - 1, j)] + 1;
      int64_t ins = cost[at(i, j - 1)] + 1;
      cost[at(i, j)] = std::min({diag, del, ins});
    }
  }

  EditStats stats;
  stats.ref_len = static_cast<int64_t>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int64_t here = cost[at(i, j)];
    if (i > 0 && j > 0) {
      bool same = ref[i - 1] == hyp[j - 1];
      if (cost[at(i - 1, j - 1)] + (same ? 0 : 1) == here) {
        if (!same) ++stats.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[at(i, j - 1)] + 1 == here) {
      ++stats.insertions;
      --j;
      continue;
    }
    ++stats.deletions;
    --i;
  }
  return stats;
}

double Wer(const EditStats &stats) {
  if (stats.ref_len == 0) {
    return stats.errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(stats.errors()) / static_cast<double>(stats.ref_len);
}

double WerForReport(const EditStats &stats) {
  return static_cast<double>(stats.errors()) /
         static_cast<double>(std::max<int64_t>(stats.ref_len, 1));
}

double CorpusWer(const std::vector<EditStats> &per_utterance) {
  int64_t errors = 0, ref = 0;
  for (const auto &s : per_utterance) {
    errors += s.errors();
    ref += std::max<int64_t>(s.ref_len, 1);
  }
  if (ref == 0) return 0.0;
  return static_cast<double>(errors) / static_cast<double>(ref);
}

int ClassifierLabel2(int64_t d_noisy, int64_t d_enhanced) {
  return d_noisy < d_enhanced ? 0 : 1;
}

int ClassifierLabel3(int64_t d_noisy, int64_t d_enhanced) {
  if (d_noisy < d_enhanced) return 0;
  if (d_noisy > d_enhanced) return 1;
  return 2;
}

}  // namespace oafuse
