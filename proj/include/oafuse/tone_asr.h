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

#ifndef OAFUSE_TONE_ASR_H_
#define OAFUSE_TONE_ASR_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oafuse/asr_output.h"
#include "oafuse/signal.h"

namespace oafuse {

// A toy language where word w is a pure tone at f0 + w * delta_f held for
// one slot. Used by both the synthetic corpus generator and the mock
// recognizer, so the two must share one config.
struct ToneConfig {
  int32_t sample_rate_hz = 16000;
  double f0_hz = 500.0;
  double delta_f_hz = 200.0;
  int32_t slot_samples = 3200;
  int32_t frames_per_slot = 1;
  // Score of the extra silence/blank class, in the same units as the tone
  // powers (amplitude squared).
  double noise_floor = 1e-9;
  // Peak amplitude of synthesized tones.
  double amplitude = 0.5;
  std::vector<std::string> vocab = DefaultVocab(8);

  int32_t vocab_size() const { return static_cast<int32_t>(vocab.size()); }
  double WordFrequency(int32_t word) const { return f0_hz + word * delta_f_hz; }
  int32_t blank_id() const { return vocab_size(); }

  static std::vector<std::string> DefaultVocab(int32_t size);
};

// Throws InvalidArgument: empty vocab, a tone at or above Nyquist,
// frames_per_slot not dividing slot_samples, non-positive sizes or floor.
void ValidateToneConfig(const ToneConfig &cfg);

ToneConfig LoadToneConfig(const std::filesystem::path &path);
void SaveToneConfig(const ToneConfig &cfg, const std::filesystem::path &path);
// One-line identifier used in report metadata.
std::string DescribeToneConfig(const ToneConfig &cfg);

// Squared DFT magnitude of `x` at `freq_hz` via the Goertzel recursion.
double GoertzelPower(std::span<const float> x, double freq_hz,
                     int32_t sample_rate_hz);

// Class distribution of one analysis window: each vocabulary class scores
// the squared amplitude estimate (2|X(f_w)|/N)^2, the trailing blank class
// scores cfg.noise_floor, and the scores are normalized to sum to one.
std::vector<double> TonePosterior(std::span<const float> window,
                                  const ToneConfig &cfg);

// Deterministic mock recognizer.
//
// The waveform is cut into floor(n / slot_samples) slots (a trailing partial
// slot is ignored). Each slot's posterior decides one word by argmax, lowest
// index on ties; blank slots emit nothing. Outputs:
//   transcript         the decided words, space separated
//   token_confidences  Tsallis confidence (q = 0.33) of each decided slot
//   segments           one segment: mean log p(argmax) over decided slots
//                      (empty when nothing was decided)
//   posterior          frames_per_slot rows per slot, blank = last class
//   class_labels       vocab + "<blank>"
AsrOutput ToneAsrTranscribe(const Waveform &w, const ToneConfig &cfg);

}  // namespace oafuse

#endif  // OAFUSE_TONE_ASR_H_
