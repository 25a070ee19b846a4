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

#include "oafuse/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <exception>
#include <thread>

#include "fmt/format.h"
#include "oafuse/confidence.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

uint64_t HashWaveform(const Waveform &w) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void *data, std::size_t n) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i != n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  int32_t rate = w.sample_rate_hz();
  mix(&rate, sizeof(rate));
  mix(w.samples().data(), w.samples().size() * sizeof(float));
  return h;
}

double Confidence(const AsrOutput &out, const ConfidenceMode &mode,
                  const std::string &id) {
  try {
    return UtteranceConfidence(out, mode);
  } catch (const InvalidArgument &e) {
    throw BackendError(
        BackendError::Kind::kProtocol,
        fmt::format("{}: conf-mode {}: {}", id, ToString(mode), e.what()));
  }
}

EditStats Score(const TokenSequence &ref, const std::string &transcript,
                NormalizePolicy policy) {
  return EditDistance(ref, NormalizeText(transcript, policy));
}

FusionWeight FrameConfidenceWeights(const UtteranceContext &ctx,
                                    const EvalOptions &opts) {
  const auto &py = ctx.out_noisy.posterior;
  const auto &px = ctx.out_enhanced.posterior;
  if (!py || !px) {
    throw BackendError(BackendError::Kind::kProtocol,
                       fmt::format("{}: frame-level fusion needs posteriors "
                                   "for both signals",
                                   ctx.id));
  }
  if (py->num_frames() != px->num_frames()) {
    throw BackendError(
        BackendError::Kind::kProtocol,
        fmt::format("{}: posterior frame counts differ ({} vs {})", ctx.id,
                    py->num_frames(), px->num_frames()));
  }
  const auto n = ctx.noisy.size();
  const auto hop = static_cast<int32_t>(n / py->num_frames());
  if (hop <= 0) {
    throw BackendError(BackendError::Kind::kProtocol,
                       fmt::format("{}: {} posterior frames for {} samples",
                                   ctx.id, py->num_frames(), n));
  }
  auto cy = FrameConfidences(*py, opts.mode.q);
  auto cx = FrameConfidences(*px, opts.mode.q);
  return FrameWeights{FrameWeightsFromConf(cy, cx, opts.eps), hop};
}

// Runs fn(index, recognizer) for every index on a pool of workers, each
// with its own recognizer. The first exception by index is rethrown.
template <class Fn>
void RunPool(std::size_t n, int32_t workers, const RecognizerFactory &factory,
             Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr factory_error;
  std::mutex factory_mu;
  auto work = [&] {
    std::unique_ptr<Recognizer> rec;
    try {
      rec = factory();
    } catch (...) {
      std::lock_guard lock(factory_mu);
      if (!factory_error) factory_error = std::current_exception();
      return;
    }
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i, *rec);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto count =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (count == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t != count; ++t) threads.emplace_back(work);
    for (auto &t : threads) t.join();
  }
  if (factory_error) std::rethrow_exception(factory_error);
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void CheckWorkers(const EvalOptions &opts) {
  if (opts.workers <= 0) {
    throw InvalidArgument(
        fmt::format("workers must be positive, got {}", opts.workers));
  }
}

void RequireReferences(const std::vector<ManifestEntry> &entries) {
  for (const auto &e : entries) {
    if (!e.ref_text) {
      throw DataError(fmt::format("{}: missing field 'ref_text'", e.id));
    }
  }
}

ReportMetadata BaseMetadata(const EvalOptions &opts) {
  ReportMetadata m;
  m.conf_mode = ToString(opts.mode);
  m.eps = opts.eps;
  m.normalize = opts.normalize == NormalizePolicy::kBasic ? "basic" : "none";
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

AsrOutput TranscriptionCache::Transcribe(const Waveform &w,
                                         Recognizer &recognizer) {
  const uint64_t key = HashWaveform(w);
  std::promise<AsrOutput> promise;
  {
    std::unique_lock lock(mu_);
    auto [lo, hi] = slots_.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      if (it->second->audio == w) {
        auto result = it->second->result;
        lock.unlock();
        return result.get();
      }
    }
    auto slot = std::make_shared<Slot>();
    slot->audio = w;
    slot->result = promise.get_future().share();
    slots_.emplace(key, std::move(slot));
    ++decodes_;
  }
  try {
    AsrOutput out = recognizer.Transcribe(w);
    promise.set_value(out);
    return out;
  } catch (...) {
    promise.set_exception(std::current_exception());
    throw;
  }
}

int64_t TranscriptionCache::decodes() const {
  std::lock_guard lock(mu_);
  return decodes_;
}

// ---------------------------------------------------------------------------

UtteranceContext PrepareUtterance(const ManifestEntry &entry,
                                  Recognizer &recognizer,
                                  TranscriptionCache &cache,
                                  const EvalOptions &opts) {
  UtteranceContext ctx;
  ctx.id = entry.id;
  Waveform y = LoadWav(entry.noisy_path);
  Waveform x = LoadWav(entry.enhanced_path);
  try {
    std::tie(ctx.noisy, ctx.enhanced) =
        AlignPair(y, x, opts.max_len_mismatch_ratio);
  } catch (const InvalidArgument &e) {
    throw DataError(fmt::format("{}: {}", entry.id, e.what()));
  }
  ctx.out_noisy = cache.Transcribe(ctx.noisy, recognizer);
  ctx.out_enhanced = cache.Transcribe(ctx.enhanced, recognizer);
  ctx.conf_noisy = Confidence(ctx.out_noisy, opts.mode, entry.id);
  ctx.conf_enhanced = Confidence(ctx.out_enhanced, opts.mode, entry.id);
  if (entry.ref_text) {
    ctx.ref = NormalizeText(*entry.ref_text, opts.normalize);
    ctx.stats_noisy = Score(*ctx.ref, ctx.out_noisy.transcript, opts.normalize);
    ctx.stats_enhanced =
        Score(*ctx.ref, ctx.out_enhanced.transcript, opts.normalize);
  }
  return ctx;
}

void RequireInputs(const ManifestEntry &entry, const WeightStrategy &s) {
  auto missing = [&entry](const char *field) {
    return DataError(fmt::format("{}: missing field '{}'", entry.id, field));
  };
  std::visit(
      Overloaded{
          [&](const strategy::WerOracle &) {
            if (!entry.ref_text) throw missing("ref_text");
          },
          [&](const strategy::Snr &) {
            if (!entry.snr_db) throw missing("snr_db");
          },
          [&](const strategy::Dnsmos &) {
            if (!entry.dnsmos_bak) throw missing("dnsmos_bak");
            if (!entry.dnsmos_sig) throw missing("dnsmos_sig");
          },
          [&](const strategy::Classifier2 &) {
            if (!entry.classifier_posteriors ||
                entry.classifier_posteriors->size() != 2) {
              throw DataError(fmt::format(
                  "{}: 2-class strategy needs 2 classifier_posteriors",
                  entry.id));
            }
          },
          [&](const strategy::Classifier3 &) {
            if (!entry.classifier_posteriors ||
                entry.classifier_posteriors->size() != 3) {
              throw DataError(fmt::format(
                  "{}: 3-class strategy needs 3 classifier_posteriors",
                  entry.id));
            }
          },
          [](const auto &) {},
      },
      s);
}

StrategyResult RunStrategy(const UtteranceContext &ctx,
                           const ManifestEntry &entry,
                           const WeightStrategy &strategy,
                           Recognizer &recognizer, TranscriptionCache &cache,
                           const EvalOptions &opts) {
  RequireInputs(entry, strategy);
  StrategyResult r;

  if (std::holds_alternative<strategy::Switch>(strategy)) {
    Choice c = SwitchDecision(ctx.conf_noisy, ctx.conf_enhanced);
    r.weight = ScalarWeight{WeightOfChoice(c)};
    bool noisy = c == Choice::kNoisy;
    r.fused = noisy ? ctx.noisy : ctx.enhanced;
    r.output = noisy ? ctx.out_noisy : ctx.out_enhanced;
    r.stats = noisy ? ctx.stats_noisy : ctx.stats_enhanced;
    return r;
  }

  try {
    r.weight = std::visit(
        Overloaded{
            [&](const strategy::WerOracle &) -> FusionWeight {
              if (!ctx.stats_noisy || !ctx.stats_enhanced) {
                throw DataError(
                    fmt::format("{}: missing field 'ref_text'", entry.id));
              }
              return ScalarWeight{WeightFromWer(WerForReport(*ctx.stats_noisy),
                                                WerForReport(*ctx.stats_enhanced),
                                                opts.eps)};
            },
            [&](const strategy::Confidence &) -> FusionWeight {
              return ScalarWeight{
                  WeightFromConf(ctx.conf_noisy, ctx.conf_enhanced, opts.eps)};
            },
            [&](const strategy::Switch &) -> FusionWeight {
              return ScalarWeight{1.0};  // handled above
            },
            [&](const strategy::Snr &s) -> FusionWeight {
              return ScalarWeight{
                  WeightFromSnr(*entry.snr_db, s.snr_min_db, s.snr_max_db,
                                s.clip)};
            },
            [&](const strategy::Dnsmos &) -> FusionWeight {
              return ScalarWeight{
                  WeightFromDnsmos(*entry.dnsmos_bak, *entry.dnsmos_sig)};
            },
            [&](const strategy::Classifier2 &) -> FusionWeight {
              const auto &p = *entry.classifier_posteriors;
              return ScalarWeight{WeightFromClassifier2(p[0], p[1])};
            },
            [&](const strategy::Classifier3 &) -> FusionWeight {
              const auto &p = *entry.classifier_posteriors;
              return ScalarWeight{WeightFromClassifier3(p[0], p[1], p[2])};
            },
            [&](const strategy::FrameConfidence &) -> FusionWeight {
              return FrameConfidenceWeights(ctx, opts);
            },
        },
        strategy);
  } catch (const InvalidArgument &e) {
    throw DataError(fmt::format("{}: {}: {}", entry.id,
                                StrategyName(strategy), e.what()));
  }

  r.fused = Fuse(ctx.noisy, ctx.enhanced, r.weight);
  r.output = cache.Transcribe(r.fused, recognizer);
  if (ctx.ref) r.stats = Score(*ctx.ref, r.output.transcript, opts.normalize);
  return r;
}

// ---------------------------------------------------------------------------

EditStats MethodRow::Total() const {
  EditStats total;
  for (const auto &u : utterances) total += u.stats;
  return total;
}

double MethodRow::CorpusWer() const {
  std::vector<EditStats> all;
  all.reserve(utterances.size());
  for (const auto &u : utterances) all.push_back(u.stats);
  return oafuse::CorpusWer(all);
}

double MethodRow::MeanWeight() const {
  if (utterances.empty()) return 0.0;
  double sum = 0.0;
  for (const auto &u : utterances) sum += u.weight;
  return sum / static_cast<double>(utterances.size());
}

EvalRun Evaluate(const std::vector<ManifestEntry> &entries,
                 std::vector<WeightStrategy> strategies,
                 const RecognizerFactory &factory, const EvalOptions &opts) {
  CheckWorkers(opts);
  for (const auto &s : strategies) ValidateStrategy(s);
  std::stable_sort(strategies.begin(), strategies.end(),
                   [](const auto &a, const auto &b) {
                     return StrategyRank(a) < StrategyRank(b);
                   });
  strategies.erase(std::unique(strategies.begin(), strategies.end(),
                               [](const auto &a, const auto &b) {
                                 return StrategyRank(a) == StrategyRank(b);
                               }),
                   strategies.end());
  RequireReferences(entries);
  for (const auto &e : entries) {
    for (const auto &s : strategies) RequireInputs(e, s);
  }

  struct Outcome {
    std::vector<UtteranceScore> scores;  // one per row
    std::optional<UtteranceFailure> failure;
  };
  std::vector<Outcome> outcomes(entries.size());
  TranscriptionCache cache;

  RunPool(entries.size(), opts.workers, factory,
          [&](std::size_t i, Recognizer &rec) {
            const auto &e = entries[i];
            Outcome &o = outcomes[i];
            try {
              auto ctx = PrepareUtterance(e, rec, cache, opts);
              o.scores.push_back({e.id, *ctx.stats_noisy, 1.0});
              o.scores.push_back({e.id, *ctx.stats_enhanced, 0.0});
              for (const auto &s : strategies) {
                auto r = RunStrategy(ctx, e, s, rec, cache, opts);
                o.scores.push_back({e.id, *r.stats, oafuse::MeanWeight(r.weight)});
              }
            } catch (const BackendError &err) {
              o.scores.clear();
              o.failure = UtteranceFailure{e.id, err.what()};
            }
          });

  EvalRun run;
  EvalReport &report = run.report;
  report.metadata = BaseMetadata(opts);
  for (const auto &s : strategies) {
    report.metadata.strategies.push_back(StrategyToken(s));
  }

  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i != order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].id < entries[b].id;
  });

  std::vector<MethodRow> rows;
  rows.push_back({kNoisyRowName, {}});
  rows.push_back({kEnhancedRowName, {}});
  for (const auto &s : strategies) rows.push_back({StrategyName(s), {}});
  bool any = false;
  for (std::size_t i : order) {
    const auto &o = outcomes[i];
    if (o.failure) {
      report.failures.push_back(*o.failure);
      continue;
    }
    any = true;
    for (std::size_t k = 0; k != rows.size(); ++k) {
      rows[k].utterances.push_back(o.scores[k]);
    }
  }
  if (any) report.rows = std::move(rows);
  run.decodes = cache.decodes();
  return run;
}

// ---------------------------------------------------------------------------

std::string_view GroupName(Group g) {
  switch (g) {
    case Group::kAmbiguous:
      return "Ambiguous";
    case Group::kConfidenceCorrect:
      return "ConfidenceCorrect";
    case Group::kMiscalibrated:
      return "Miscalibrated";
  }
  return "?";
}

std::string_view SubgroupName(Subgroup s) {
  switch (s) {
    case Subgroup::kOaWin:
      return "OaWin";
    case Subgroup::kSwitchWin:
      return "SwitchWin";
    case Subgroup::kTie:
      return "Tie";
  }
  return "?";
}

Group ClassifyGroup(int64_t errors_noisy, int64_t errors_enhanced,
                    double conf_noisy, double conf_enhanced) {
  if (errors_noisy == errors_enhanced) return Group::kAmbiguous;
  bool noisy_worse = errors_noisy > errors_enhanced;
  double conf_worse = noisy_worse ? conf_noisy : conf_enhanced;
  double conf_better = noisy_worse ? conf_enhanced : conf_noisy;
  return conf_worse < conf_better ? Group::kConfidenceCorrect
                                  : Group::kMiscalibrated;
}

Subgroup ClassifySubgroup(int64_t errors_oa, int64_t errors_switch) {
  if (errors_oa < errors_switch) return Subgroup::kOaWin;
  if (errors_oa > errors_switch) return Subgroup::kSwitchWin;
  return Subgroup::kTie;
}

std::vector<GroupCell> BuildCells(const std::vector<GroupedUtterance> &utts) {
  constexpr Group kGroups[] = {Group::kAmbiguous, Group::kConfidenceCorrect,
                               Group::kMiscalibrated};
  constexpr Subgroup kSubs[] = {Subgroup::kOaWin, Subgroup::kSwitchWin,
                                Subgroup::kTie};
  std::vector<GroupCell> cells;
  for (Group g : kGroups) {
    int64_t group_total = 0;
    for (const auto &u : utts) group_total += u.group == g;
    for (Subgroup s : kSubs) {
      GroupCell c;
      c.group = g;
      c.subgroup = s;
      for (const auto &u : utts) {
        if (u.group != g || u.subgroup != s) continue;
        ++c.count;
        c.noisy += u.noisy;
        c.enhanced += u.enhanced;
        c.switched += u.switched;
        c.oa += u.oa;
      }
      c.share = group_total == 0 ? 0.0
                                 : static_cast<double>(c.count) /
                                       static_cast<double>(group_total);
      cells.push_back(c);
    }
  }
  return cells;
}

GroupAnalysis AnalyzeGroups(const std::vector<ManifestEntry> &entries,
                            const RecognizerFactory &factory,
                            const EvalOptions &opts) {
  CheckWorkers(opts);
  RequireReferences(entries);

  struct Outcome {
    std::optional<GroupedUtterance> utt;
    std::optional<UtteranceFailure> failure;
  };
  std::vector<Outcome> outcomes(entries.size());
  TranscriptionCache cache;
  const WeightStrategy oa = strategy::Confidence{};
  const WeightStrategy sw = strategy::Switch{};

  RunPool(entries.size(), opts.workers, factory,
          [&](std::size_t i, Recognizer &rec) {
            const auto &e = entries[i];
            try {
              auto ctx = PrepareUtterance(e, rec, cache, opts);
              auto r_oa = RunStrategy(ctx, e, oa, rec, cache, opts);
              auto r_sw = RunStrategy(ctx, e, sw, rec, cache, opts);
              GroupedUtterance g;
              g.id = e.id;
              g.noisy = *ctx.stats_noisy;
              g.enhanced = *ctx.stats_enhanced;
              g.oa = *r_oa.stats;
              g.switched = *r_sw.stats;
              g.conf_noisy = ctx.conf_noisy;
              g.conf_enhanced = ctx.conf_enhanced;
              g.group = ClassifyGroup(g.noisy.errors(), g.enhanced.errors(),
                                      g.conf_noisy, g.conf_enhanced);
              g.subgroup = ClassifySubgroup(g.oa.errors(), g.switched.errors());
              outcomes[i].utt = std::move(g);
            } catch (const BackendError &err) {
              outcomes[i].failure = UtteranceFailure{e.id, err.what()};
            }
          });

  GroupAnalysis ga;
  ga.metadata = BaseMetadata(opts);
  ga.metadata.strategies = {StrategyToken(oa), StrategyToken(sw)};
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i != order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].id < entries[b].id;
  });
  for (std::size_t i : order) {
    if (outcomes[i].failure) {
      ga.failures.push_back(*outcomes[i].failure);
    } else {
      ga.utterances.push_back(*outcomes[i].utt);
    }
  }
  ga.cells = BuildCells(ga.utterances);
  return ga;
}

}  // namespace oafuse
