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

#ifndef OAFUSE_SYNTH_H_
#define OAFUSE_SYNTH_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oafuse/signal.h"
#include "oafuse/tone_asr.h"

namespace oafuse {

// Seeded generator whose output is identical on every platform:
// std::mt19937_64 is fully specified, the distributions below are ours.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer on [0, n).
  int32_t Index(int32_t n);
  // Standard normal via Box-Muller.
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derives independent stream seeds from one user seed.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream, uint64_t index);

struct SynthUtterance {
  Waveform clean;
  Waveform noisy;
  std::string ref_text;
};

// Renders each word as one slot of its tone (phase restarting at every
// slot) and adds white Gaussian noise scaled so the utterance-level SNR is
// exactly snr_db (measured on the double-precision signals).
SynthUtterance SynthesizeUtterance(std::span<const int32_t> word_ids,
                                   double snr_db, uint64_t seed,
                                   const ToneConfig &cfg);

// Stand-in for a speech enhancer: clean + residual_noise * (noisy - clean),
// then every whole slot is independently zeroed with probability
// artifact_drop_prob, modelling an enhancer that deletes speech.
Waveform SimulateEnhancement(const Waveform &noisy, const Waveform &clean,
                             double residual_noise, double artifact_drop_prob,
                             uint64_t seed, int32_t slot_samples);

// Mean square of the samples (0 for an empty signal).
double SignalPower(std::span<const float> x);

}  // namespace oafuse

#endif  // OAFUSE_SYNTH_H_
