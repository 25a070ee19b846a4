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

#include "oafuse/corpus.h"

#include <cmath>
#include <system_error>

#include "fmt/format.h"
#include "oafuse/error.h"
#include "oafuse/manifest.h"
#include "oafuse/synth.h"

namespace oafuse {

namespace {

// Seed streams.
constexpr uint64_t kWordStream = 1;
constexpr uint64_t kNoiseStream = 2;
constexpr uint64_t kDropStream = 3;

void CheckParams(const SynthParams &p) {
  if (p.n_utts <= 0 || p.words_per_utt <= 0 || p.vocab_size <= 0) {
    throw InvalidArgument(
        "n_utts, words_per_utt and vocab_size must be positive");
  }
  if (p.snr_grid.empty()) throw InvalidArgument("SNR grid is empty");
  for (double s : p.snr_grid) {
    if (!std::isfinite(s)) throw InvalidArgument("SNR grid must be finite");
  }
}

}  // namespace

std::filesystem::path SynthCorpus(const SynthParams &params,
                                  const std::filesystem::path &out_dir) {
  CheckParams(params);
  ToneConfig cfg = params.tone;
  cfg.vocab = ToneConfig::DefaultVocab(params.vocab_size);
  ValidateToneConfig(cfg);

  std::error_code ec;
  for (const char *sub : {"clean", "noisy", "enhanced"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) {
      throw DataError(fmt::format("cannot create '{}': {}",
                                  (out_dir / sub).string(), ec.message()));
    }
  }

  std::vector<ManifestEntry> entries;
  for (int32_t i = 0; i < params.n_utts; ++i) {
    const auto index = static_cast<uint64_t>(i);
    Rng word_rng(DeriveSeed(params.seed, kWordStream, index));
    std::vector<int32_t> words(params.words_per_utt);
    for (auto &w : words) w = word_rng.Index(params.vocab_size);

    double snr = params.snr_grid[i % params.snr_grid.size()];
    auto utt = SynthesizeUtterance(
        words, snr, DeriveSeed(params.seed, kNoiseStream, index), cfg);
    Waveform enhanced = SimulateEnhancement(
        utt.noisy, utt.clean, params.residual_noise, params.artifact_drop_prob,
        DeriveSeed(params.seed, kDropStream, index), cfg.slot_samples);

    ManifestEntry e;
    e.id = fmt::format("utt{:04d}", i);
    const std::string file = e.id + ".wav";
    e.clean_path = std::filesystem::path("clean") / file;
    e.noisy_path = std::filesystem::path("noisy") / file;
    e.enhanced_path = std::filesystem::path("enhanced") / file;
    SaveWav(utt.clean, out_dir / *e.clean_path, WavEncoding::kFloat32);
    SaveWav(utt.noisy, out_dir / e.noisy_path, WavEncoding::kFloat32);
    SaveWav(enhanced, out_dir / e.enhanced_path, WavEncoding::kFloat32);
    e.ref_text = std::move(utt.ref_text);
    e.snr_db = snr;
    entries.push_back(std::move(e));
  }

  SaveToneConfig(cfg, out_dir / "tone_config.json");
  auto manifest = out_dir / "manifest.jsonl";
  SaveManifest(entries, manifest);
  return manifest;
}

}  // namespace oafuse
