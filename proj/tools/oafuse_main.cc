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

// Command-line front end: fusion, transcription, corpus evaluation and
// synthetic corpus generation.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "json.hpp"
#include "oafuse/corpus.h"
#include "oafuse/error.h"
#include "oafuse/evaluation.h"
#include "oafuse/manifest.h"
#include "oafuse/protocol.h"
#include "oafuse/recognizer.h"
#include "oafuse/report.h"

namespace {

using namespace oafuse;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct SharedFlags {
  std::string backend = "mock";
  std::string conf_mode = "token";
  std::optional<double> tsallis_q;
  double eps = kDefaultEps;
  int32_t workers = 1;
  std::string format = "tsv";
  std::optional<uint64_t> seed;
  std::string normalize = "basic";
  int32_t timeout_ms = 60000;
  double snr_min = kDefaultSnrMinDb;
  double snr_max = kDefaultSnrMaxDb;
  std::vector<double> snr_clip = {kDefaultSnrClip.lo, kDefaultSnrClip.hi};

  void Add(CLI::App *cmd) {
    cmd->add_option("--backend", backend,
                    "mock | mock:<tone_config.json> | cmd:<command> | "
                    "http:<url>")
        ->capture_default_str();
    cmd->add_option("--conf-mode", conf_mode, "segment | token | ctc[:q]")
        ->capture_default_str();
    cmd->add_option("--tsallis-q", tsallis_q,
                    "Tsallis q for posterior-based confidences (default 0.33)");
    cmd->add_option("--eps", eps, "Weight smoothing constant")
        ->capture_default_str();
    cmd->add_option("--workers", workers, "Parallel backend connections")
        ->capture_default_str();
    cmd->add_option("--format", format, "tsv | json")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed recorded in report metadata");
    cmd->add_option("--normalize", normalize, "basic | none")
        ->capture_default_str();
    cmd->add_option("--timeout-ms", timeout_ms, "Per-request backend timeout")
        ->capture_default_str();
    cmd->add_option("--snr-min", snr_min, "SNR mapped to weight 0 (dB)")
        ->capture_default_str();
    cmd->add_option("--snr-max", snr_max, "SNR mapped to weight 1 (dB)")
        ->capture_default_str();
    cmd->add_option("--snr-clip", snr_clip, "Clip range of snr-clip")
        ->expected(2)
        ->delimiter(',')
        ->capture_default_str();
  }

  EvalOptions Options() const {
    EvalOptions o;
    o.mode = ParseConfidenceMode(conf_mode);
    if (tsallis_q) {
      if (!(*tsallis_q > 0.0 && *tsallis_q < 1.0)) {
        throw InvalidArgument(
            fmt::format("--tsallis-q must lie in (0,1), got {}", *tsallis_q));
      }
      o.mode.q = *tsallis_q;
    }
    if (!(eps > 0.0)) throw InvalidArgument("--eps must be positive");
    o.eps = eps;
    if (workers <= 0) throw InvalidArgument("--workers must be positive");
    o.workers = workers;
    o.normalize = ParseNormalizePolicy(normalize);
    return o;
  }

  BackendSpec Backend() const { return BackendSpec::Parse(backend, timeout_ms); }

  ReportFormat Format() const { return ParseReportFormat(format); }

  WeightStrategy Strategy(std::string_view token) const {
    auto s = ParseStrategy(token, snr_min, snr_max,
                           ClipRange{snr_clip.at(0), snr_clip.at(1)});
    ValidateStrategy(s);
    return s;
  }
};

std::vector<std::string> SplitList(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

RecognizerFactory FactoryFor(const BackendSpec &spec) {
  return [spec] { return MakeRecognizer(spec); };
}

int ReportFailures(const std::vector<UtteranceFailure> &failures,
                   std::size_t total) {
  for (const auto &f : failures) {
    std::cerr << fmt::format("warning: {} failed: {}\n", f.id, f.message);
  }
  if (!failures.empty()) {
    std::cerr << fmt::format("warning: {} of {} utterances failed\n",
                             failures.size(), total);
  }
  return !failures.empty() && failures.size() == total ? kExitBackend
                                                       : kExitOk;
}

nlohmann::ordered_json OutputJson(const AsrOutput &o,
                                  const ConfidenceMode &mode) {
  nlohmann::ordered_json j;
  j["transcript"] = o.transcript;
  if (o.segments) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &s : *o.segments) {
      arr.push_back({{"avg_logprob", s.avg_logprob},
                     {"num_tokens", s.num_tokens}});
    }
    j["segments"] = arr;
  } else {
    j["segments"] = nullptr;
  }
  j["token_confidences"] = o.token_confidences
                               ? nlohmann::ordered_json(*o.token_confidences)
                               : nlohmann::ordered_json(nullptr);
  if (o.posterior) {
    j["posterior"] = {{"frames", o.posterior->num_frames()},
                      {"classes", o.posterior->num_classes()},
                      {"blank_id", o.posterior->blank_id()
                                       ? nlohmann::ordered_json(
                                             *o.posterior->blank_id())
                                       : nlohmann::ordered_json(nullptr)}};
  } else {
    j["posterior"] = nullptr;
  }
  j["class_labels"] = o.class_labels ? nlohmann::ordered_json(*o.class_labels)
                                     : nlohmann::ordered_json(nullptr);
  j["conf_mode"] = ToString(mode);
  try {
    j["confidence"] = UtteranceConfidence(o, mode);
  } catch (const InvalidArgument &) {
    j["confidence"] = nullptr;
  }
  return j;
}

int ValidateLines(const std::string &path, bool responses,
                  bool check_posterior_file) {
  std::ifstream is(path);
  if (!is) throw DataError(fmt::format("cannot open '{}'", path));
  std::string line;
  int64_t line_no = 0, bad = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (responses) {
        ValidateResponse(ParseResponse(line), check_posterior_file);
      } else {
        ParseRequest(line);
      }
      std::cout << fmt::format("{}:{}: ok\n", path, line_no);
    } catch (const Error &e) {
      ++bad;
      std::cout << fmt::format("{}:{}: invalid: {}\n", path, line_no,
                               e.what());
    }
  }
  std::cout << fmt::format("{} lines checked, {} invalid\n",
                           line_no, bad);
  return bad == 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Observation-addition fusion of noisy and enhanced speech"};
  app.require_subcommand(1);
  SharedFlags flags;

  // fuse
  auto *fuse = app.add_subcommand("fuse", "Fuse one noisy/enhanced pair");
  flags.Add(fuse);
  std::string noisy_path, enhanced_path, out_path, strategy_token =
                                                       "confidence";
  std::optional<double> fixed_weight;
  std::optional<std::string> ref_text;
  std::optional<double> snr_db, dnsmos_bak, dnsmos_sig;
  std::vector<double> classifier_posteriors;
  std::string encoding = "float32";
  fuse->add_option("--noisy", noisy_path, "Noisy WAV")->required();
  fuse->add_option("--enhanced", enhanced_path, "Enhanced WAV")->required();
  fuse->add_option("--out", out_path, "Fused WAV")->required();
  fuse->add_option("--strategy", strategy_token, "Weighting strategy")
      ->capture_default_str();
  fuse->add_option("--weight", fixed_weight,
                   "Use this S' directly (no backend)");
  fuse->add_option("--ref-text", ref_text, "Reference (wer-oracle)");
  fuse->add_option("--snr-db", snr_db, "Noisy SNR (snr, snr-clip)");
  fuse->add_option("--dnsmos-bak", dnsmos_bak, "DNSMOS BAK (dnsmos)");
  fuse->add_option("--dnsmos-sig", dnsmos_sig, "DNSMOS SIG (dnsmos)");
  fuse->add_option("--classifier-posteriors", classifier_posteriors,
                   "Classifier output (classifier2, classifier3)")
      ->delimiter(',');
  fuse->add_option("--encoding", encoding, "float32 | pcm16")
      ->capture_default_str();

  // transcribe
  auto *transcribe =
      app.add_subcommand("transcribe", "Decode one WAV and print the output");
  flags.Add(transcribe);
  std::string audio_path;
  transcribe->add_option("--audio", audio_path, "WAV file")->required();

  // eval
  auto *eval = app.add_subcommand("eval", "Evaluate strategies on a manifest");
  flags.Add(eval);
  std::string manifest_path, report_path = "-",
                             strategies = "wer-oracle,confidence,switch";
  eval->add_option("--manifest", manifest_path, "JSON-lines manifest")
      ->required();
  eval->add_option("--strategies", strategies,
                   "Comma-separated strategy list (may be empty)")
      ->capture_default_str();
  eval->add_option("--out", report_path, "Report path, - for stdout")
      ->capture_default_str();

  // analyze
  auto *analyze =
      app.add_subcommand("analyze", "Group utterances by confidence quality");
  flags.Add(analyze);
  analyze->add_option("--manifest", manifest_path, "JSON-lines manifest")
      ->required();
  analyze->add_option("--out", report_path, "Report path, - for stdout")
      ->capture_default_str();

  // frame-eval
  auto *frame_eval = app.add_subcommand(
      "frame-eval", "Compare utterance-level and frame-level Conf-OA");
  flags.Add(frame_eval);
  frame_eval->add_option("--manifest", manifest_path, "JSON-lines manifest")
      ->required();
  frame_eval->add_option("--out", report_path, "Report path, - for stdout")
      ->capture_default_str();

  // synth
  auto *synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  SynthParams sp;
  std::string out_dir;
  uint64_t synth_seed = sp.seed;
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_option("--n-utts", sp.n_utts)->capture_default_str();
  synth->add_option("--words-per-utt", sp.words_per_utt)->capture_default_str();
  synth->add_option("--vocab-size", sp.vocab_size)->capture_default_str();
  synth->add_option("--snr-grid", sp.snr_grid, "Comma-separated dB values")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_option("--residual-noise", sp.residual_noise)
      ->capture_default_str();
  synth->add_option("--artifact-drop-prob", sp.artifact_drop_prob)
      ->capture_default_str();
  synth->add_option("--frames-per-slot", sp.tone.frames_per_slot)
      ->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();

  // validate
  auto *validate = app.add_subcommand(
      "validate", "Check protocol messages, one JSON object per line");
  std::string messages_path, kind = "response";
  bool skip_posterior = false;
  validate->add_option("--input", messages_path, "JSON-lines file")
      ->required();
  validate->add_option("--kind", kind, "request | response")
      ->capture_default_str();
  validate->add_flag("--no-posterior-check", skip_posterior,
                     "Do not open referenced posterior files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) {
      sp.seed = synth_seed;
      auto manifest = SynthCorpus(sp, out_dir);
      std::cout << manifest.string() << "\n";
      return kExitOk;
    }
    if (*validate) {
      if (kind != "request" && kind != "response") {
        throw InvalidArgument("--kind must be request or response");
      }
      return ValidateLines(messages_path, kind == "response", !skip_posterior);
    }

    EvalOptions opts = flags.Options();

    if (*fuse) {
      if (encoding != "float32" && encoding != "pcm16") {
        throw InvalidArgument("--encoding must be float32 or pcm16");
      }
      const auto enc =
          encoding == "pcm16" ? WavEncoding::kPcm16 : WavEncoding::kFloat32;
      nlohmann::ordered_json j;
      if (fixed_weight) {
        auto [y, x] = AlignPair(LoadWav(noisy_path), LoadWav(enhanced_path));
        SaveWav(FuseUtterance(y, x, *fixed_weight), out_path, enc);
        j["weight"] = *fixed_weight;
      } else {
        ManifestEntry e;
        e.id = "fuse";
        e.noisy_path = noisy_path;
        e.enhanced_path = enhanced_path;
        e.ref_text = ref_text;
        e.snr_db = snr_db;
        e.dnsmos_bak = dnsmos_bak;
        e.dnsmos_sig = dnsmos_sig;
        if (!classifier_posteriors.empty()) {
          e.classifier_posteriors = classifier_posteriors;
        }
        auto s = flags.Strategy(strategy_token);
        RequireInputs(e, s);
        auto rec = MakeRecognizer(flags.Backend());
        TranscriptionCache cache;
        auto ctx = PrepareUtterance(e, *rec, cache, opts);
        auto r = RunStrategy(ctx, e, s, *rec, cache, opts);
        SaveWav(r.fused, out_path, enc);
        j["strategy"] = StrategyName(s);
        j["weight"] = MeanWeight(r.weight);
        j["conf_noisy"] = ctx.conf_noisy;
        j["conf_enhanced"] = ctx.conf_enhanced;
        j["transcript"] = r.output.transcript;
      }
      std::cout << j.dump() << "\n";
      return kExitOk;
    }

    if (*transcribe) {
      auto rec = MakeRecognizer(flags.Backend());
      auto out = rec->Transcribe(LoadWav(audio_path));
      std::cout << OutputJson(out, opts.mode).dump() << "\n";
      return kExitOk;
    }

    const auto spec = flags.Backend();
    const auto format = flags.Format();
    auto entries = LoadManifest(manifest_path);

    if (*eval || *frame_eval) {
      std::vector<WeightStrategy> chosen;
      if (*frame_eval) {
        chosen = {strategy::Confidence{}, strategy::FrameConfidence{}};
      } else {
        for (const auto &t : SplitList(strategies)) {
          chosen.push_back(flags.Strategy(t));
        }
      }
      auto run = Evaluate(entries, chosen, FactoryFor(spec), opts);
      run.report.metadata.backend = spec.Id();
      run.report.metadata.seed = flags.seed;
      EmitReport(run.report, format, report_path);
      return ReportFailures(run.report.failures, entries.size());
    }

    if (*analyze) {
      auto ga = AnalyzeGroups(entries, FactoryFor(spec), opts);
      ga.metadata.backend = spec.Id();
      ga.metadata.seed = flags.seed;
      EmitReport(ga, format, report_path);
      return ReportFailures(ga.failures, entries.size());
    }
  } catch (const InvalidArgument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const BackendError &e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
