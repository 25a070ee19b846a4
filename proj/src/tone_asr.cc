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

#include "oafuse/tone_asr.h"

#include <cmath>
#include <fstream>
#include <numbers>

#include "fmt/format.h"
#include "json.hpp"
#include "oafuse/error.h"

namespace oafuse {

std::vector<std::string> ToneConfig::DefaultVocab(int32_t size) {
  static const char *kWords[] = {
      "zero",    "one",     "two",       "three",    "four",
      "five",    "six",     "seven",     "eight",    "nine",
      "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
      "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
  std::vector<std::string> out;
  for (int32_t i = 0; i < size; ++i) {
    out.push_back(i < 20 ? kWords[i] : fmt::format("w{}", i));
  }
  return out;
}

void ValidateToneConfig(const ToneConfig &cfg) {
  if (cfg.vocab.empty()) throw InvalidArgument("tone vocabulary is empty");
  if (cfg.sample_rate_hz <= 0 || cfg.slot_samples <= 0 ||
      cfg.frames_per_slot <= 0) {
    throw InvalidArgument("tone config sizes must be positive");
  }
  if (cfg.slot_samples % cfg.frames_per_slot != 0) {
    throw InvalidArgument(
        fmt::format("frames_per_slot {} does not divide slot_samples {}",
                    cfg.frames_per_slot, cfg.slot_samples));
  }
  if (!(cfg.noise_floor > 0.0)) {
    throw InvalidArgument("noise_floor must be positive");
  }
  if (!(cfg.f0_hz > 0.0) || !(cfg.delta_f_hz > 0.0)) {
    throw InvalidArgument("tone frequencies must be positive");
  }
  double top = cfg.WordFrequency(cfg.vocab_size() - 1);
  if (top >= cfg.sample_rate_hz / 2.0) {
    throw InvalidArgument(fmt::format(
        "highest word tone {} Hz is not below Nyquist ({} Hz)", top,
        cfg.sample_rate_hz / 2.0));
  }
}

ToneConfig LoadToneConfig(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) {
    throw DataError(fmt::format("cannot open tone config '{}'", path.string()));
  }
  ToneConfig cfg;
  try {
    auto j = nlohmann::json::parse(is);
    cfg.sample_rate_hz = j.at("sample_rate_hz").get<int32_t>();
    cfg.f0_hz = j.at("f0_hz").get<double>();
    cfg.delta_f_hz = j.at("delta_f_hz").get<double>();
    cfg.slot_samples = j.at("slot_samples").get<int32_t>();
    cfg.frames_per_slot = j.at("frames_per_slot").get<int32_t>();
    cfg.noise_floor = j.at("noise_floor").get<double>();
    cfg.amplitude = j.at("amplitude").get<double>();
    cfg.vocab = j.at("vocab").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw DataError(
        fmt::format("bad tone config '{}': {}", path.string(), e.what()));
  }
  try {
    ValidateToneConfig(cfg);
  } catch (const InvalidArgument &e) {
    throw DataError(
        fmt::format("bad tone config '{}': {}", path.string(), e.what()));
  }
  return cfg;
}

void SaveToneConfig(const ToneConfig &cfg, const std::filesystem::path &path) {
  nlohmann::ordered_json j;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  j["f0_hz"] = cfg.f0_hz;
  j["delta_f_hz"] = cfg.delta_f_hz;
  j["slot_samples"] = cfg.slot_samples;
  j["frames_per_slot"] = cfg.frames_per_slot;
  j["noise_floor"] = cfg.noise_floor;
  j["amplitude"] = cfg.amplitude;
  j["vocab"] = cfg.vocab;
  std::ofstream os(path, std::ios::trunc);
  os << j.dump(2) << "\n";
  if (!os) {
    throw DataError(fmt::format("cannot write tone config '{}'", path.string()));
  }
}

std::string DescribeToneConfig(const ToneConfig &cfg) {
  return fmt::format("mock(vocab={},f0={},df={},slot={},fps={},floor={})",
                     cfg.vocab_size(), cfg.f0_hz, cfg.delta_f_hz,
                     cfg.slot_samples, cfg.frames_per_slot, cfg.noise_floor);
}

double GoertzelPower(std::span<const float> x, double freq_hz,
                     int32_t sample_rate_hz) {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const double coeff = 2.0 * std::cos(omega);
  double s1 = 0.0, s2 = 0.0;
  for (float v : x) {
    double s0 = v + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

std::vector<double> TonePosterior(std::span<const float> window,
                                  const ToneConfig &cfg) {
  const int32_t v = cfg.vocab_size();
  std::vector<double> scores(v + 1);
  const double n = static_cast<double>(window.size());
  double total = 0.0;
  for (int32_t w = 0; w < v; ++w) {
    double power = GoertzelPower(window, cfg.WordFrequency(w), cfg.sample_rate_hz);
    scores[w] = 4.0 * power / (n * n);
    total += scores[w];
  }
  scores[v] = cfg.noise_floor;
  total += cfg.noise_floor;
  for (double &s : scores) s /= total;
  return scores;
}

AsrOutput ToneAsrTranscribe(const Waveform &w, const ToneConfig &cfg) {
  ValidateToneConfig(cfg);
  if (w.sample_rate_hz() != cfg.sample_rate_hz) {
    throw InvalidArgument(
        fmt::format("waveform rate {} Hz does not match tone config {} Hz",
                    w.sample_rate_hz(), cfg.sample_rate_hz));
  }
  const int32_t num_classes = cfg.vocab_size() + 1;
  const int32_t blank = cfg.blank_id();
  const std::size_t slot = static_cast<std::size_t>(cfg.slot_samples);
  const std::size_t num_slots = w.size() / slot;
  const std::size_t frame_len = slot / cfg.frames_per_slot;
  std::span<const float> all(w.samples());

  AsrOutput out;
  std::vector<double> confs;
  std::vector<float> probs;
  probs.reserve(num_slots * cfg.frames_per_slot * num_classes);
  double logprob_sum = 0.0;
  std::string transcript;

  for (std::size_t k = 0; k != num_slots; ++k) {
    auto window = all.subspan(k * slot, slot);
    auto p = TonePosterior(window, cfg);
    int32_t best = 0;
    for (int32_t c = 1; c < num_classes; ++c) {
      if (p[c] > p[best]) best = c;
    }
    if (best != blank) {
      if (!transcript.empty()) transcript += ' ';
      transcript += cfg.vocab[best];
      confs.push_back(TsallisConfidence(std::span<const double>(p)));
      logprob_sum += std::log(p[best]);
    }
    if (cfg.frames_per_slot == 1) {
      for (double x : p) probs.push_back(static_cast<float>(x));
    } else {
      for (int32_t f = 0; f < cfg.frames_per_slot; ++f) {
        auto fp = TonePosterior(window.subspan(f * frame_len, frame_len), cfg);
        for (double x : fp) probs.push_back(static_cast<float>(x));
      }
    }
  }

  out.transcript = std::move(transcript);
  std::vector<SegmentStat> segments;
  if (!confs.empty()) {
    int32_t n = static_cast<int32_t>(confs.size());
    segments.push_back({logprob_sum / n, n});
  }
  out.segments = std::move(segments);
  out.token_confidences = std::move(confs);
  if (num_slots > 0) {
    out.posterior = std::make_shared<const PosteriorMatrix>(
        static_cast<int32_t>(num_slots) * cfg.frames_per_slot, num_classes,
        std::move(probs), blank);
    auto labels = cfg.vocab;
    labels.push_back("<blank>");
    out.class_labels = std::move(labels);
  }
  return out;
}

}  // namespace oafuse
