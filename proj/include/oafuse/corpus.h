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

#ifndef OAFUSE_CORPUS_H_
#define OAFUSE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "oafuse/tone_asr.h"

namespace oafuse {

struct SynthParams {
  int32_t n_utts = 200;
  int32_t words_per_utt = 6;
  int32_t vocab_size = 8;
  std::vector<double> snr_grid = {-5.0, 0.0, 5.0, 10.0};
  double residual_noise = 0.15;
  double artifact_drop_prob = 0.15;
  uint64_t seed = 42;
  // Tone layout; its vocabulary is replaced by DefaultVocab(vocab_size).
  ToneConfig tone;
};

// Writes a synthetic corpus:
//   out_dir/clean/uttNNNN.wav, noisy/..., enhanced/...  (32-bit float)
//   out_dir/tone_config.json                            (for the mock backend)
//   out_dir/manifest.jsonl                              (relative paths)
// Utterance i uses SNR snr_grid[i % size]. Returns the manifest path.
// Throws InvalidArgument on bad parameters and DataError on I/O failure.
std::filesystem::path SynthCorpus(const SynthParams &params,
                                  const std::filesystem::path &out_dir);

}  // namespace oafuse

#endif  // OAFUSE_CORPUS_H_
