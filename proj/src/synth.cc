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

#include "oafuse/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

int32_t Rng::Index(int32_t n) {
  auto k = static_cast<int32_t>(Uniform() * n);
  return k < n ? k : n - 1;
}

double Rng::Normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = Uniform();
  } while (u1 <= 0.0);
  double u2 = Uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

uint64_t DeriveSeed(uint64_t seed, uint64_t stream, uint64_t index) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ stream) ^ index);
}

double SignalPower(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return acc / static_cast<double>(x.size());
}

SynthUtterance SynthesizeUtterance(std::span<const int32_t> word_ids,
                                   double snr_db, uint64_t seed,
                                   const ToneConfig &cfg) {
  ValidateToneConfig(cfg);
  std::string ref;
  for (int32_t id : word_ids) {
    if (id < 0 || id >= cfg.vocab_size()) {
      throw InvalidArgument(fmt::format("word id {} outside vocabulary of {}",
                                        id, cfg.vocab_size()));
    }
    if (!ref.empty()) ref += ' ';
    ref += cfg.vocab[id];
  }

  const std::size_t slot = static_cast<std::size_t>(cfg.slot_samples);
  const std::size_t n = word_ids.size() * slot;
  std::vector<double> clean(n);
  for (std::size_t k = 0; k != word_ids.size(); ++k) {
    double omega = 2.0 * std::numbers::pi * cfg.WordFrequency(word_ids[k]) /
                   cfg.sample_rate_hz;
    for (std::size_t i = 0; i != slot; ++i) {
      clean[k * slot + i] = cfg.amplitude * std::sin(omega * static_cast<double>(i));
    }
  }

  std::vector<double> noise(n);
  Rng rng(seed);
  for (double &v : noise) v = rng.Normal();

  double p_signal = 0.0, p_noise = 0.0;
  for (std::size_t i = 0; i != n; ++i) {
    p_signal += clean[i] * clean[i];
    p_noise += noise[i] * noise[i];
  }
  double scale = 0.0;
  if (n > 0 && p_noise > 0.0) {
    scale = std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));
  }

  std::vector<float> clean_f(n), noisy_f(n);
  for (std::size_t i = 0; i != n; ++i) {
    clean_f[i] = static_cast<float>(clean[i]);
    noisy_f[i] = static_cast<float>(clean[i] + scale * noise[i]);
  }
  return {Waveform(cfg.sample_rate_hz, std::move(clean_f)),
          Waveform(cfg.sample_rate_hz, std::move(noisy_f)), std::move(ref)};
}

Waveform SimulateEnhancement(const Waveform &noisy, const Waveform &clean,
                             double residual_noise, double artifact_drop_prob,
                             uint64_t seed, int32_t slot_samples) {
  if (noisy.size() != clean.size() ||
      noisy.sample_rate_hz() != clean.sample_rate_hz()) {
    throw InvalidArgument("SimulateEnhancement: unaligned inputs");
  }
  if (!(residual_noise >= 0.0 && residual_noise <= 1.0) ||
      !(artifact_drop_prob >= 0.0 && artifact_drop_prob <= 1.0)) {
    throw InvalidArgument(
        "residual_noise and artifact_drop_prob must lie in [0,1]");
  }
  if (slot_samples <= 0) throw InvalidArgument("slot_samples must be positive");

  const auto &y = noisy.samples();
  const auto &x = clean.samples();
  std::vector<float> out(y.size());
  for (std::size_t i = 0; i != y.size(); ++i) {
    if (residual_noise == 1.0) {
      out[i] = y[i];
    } else if (residual_noise == 0.0) {
      out[i] = x[i];
    } else {
      double xi = x[i];
      out[i] = static_cast<float>(xi + residual_noise * (y[i] - xi));
    }
  }

  Rng rng(seed);
  const std::size_t slot = static_cast<std::size_t>(slot_samples);
  for (std::size_t k = 0; k != out.size() / slot; ++k) {
    if (rng.Uniform() < artifact_drop_prob) {
      std::fill(out.begin() + static_cast<long>(k * slot),
                out.begin() + static_cast<long>((k + 1) * slot), 0.0f);
    }
  }
  return Waveform(noisy.sample_rate_hz(), std::move(out));
}

}  // namespace oafuse
