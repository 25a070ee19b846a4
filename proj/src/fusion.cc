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

#include "oafuse/fusion.h"

#include <algorithm>
#include <cmath>

#include "fmt/format.h"
#include "oafuse/error.h"

namespace oafuse {

namespace {

void CheckEps(double eps) {
  if (!(eps > 0.0)) {
    throw InvalidArgument(fmt::format("eps must be positive, got {}", eps));
  }
}

void CheckDistribution(std::initializer_list<double> ps) {
  double sum = 0.0;
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument(
          fmt::format("classifier posterior {} outside [0,1]", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidArgument(
        fmt::format("classifier posteriors sum to {}, not 1", sum));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double WeightFromWer(double wer_noisy, double wer_enhanced, double eps) {
  CheckEps(eps);
  if (wer_noisy < 0.0 || wer_enhanced < 0.0 || std::isnan(wer_noisy) ||
      std::isnan(wer_enhanced)) {
    throw InvalidArgument(fmt::format("negative WER ({}, {})", wer_noisy,
                                      wer_enhanced));
  }
  double inv_y = 1.0 / (wer_noisy + eps);
  double inv_x = 1.0 / (wer_enhanced + eps);
  return inv_y / (inv_y + inv_x);
}

double WeightFromConf(double conf_noisy, double conf_enhanced, double eps) {
  CheckEps(eps);
  if (!(conf_noisy >= 0.0 && conf_noisy <= 1.0) ||
      !(conf_enhanced >= 0.0 && conf_enhanced <= 1.0)) {
    throw InvalidArgument(fmt::format("confidences ({}, {}) outside [0,1]",
                                      conf_noisy, conf_enhanced));
  }
  double a = conf_noisy + eps;
  double b = conf_enhanced + eps;
  return a / (a + b);
}

Choice SwitchDecision(double conf_noisy, double conf_enhanced) {
  return conf_noisy >= conf_enhanced ? Choice::kNoisy : Choice::kEnhanced;
}

double WeightFromSnr(double snr_db, double snr_min_db, double snr_max_db,
                     std::optional<ClipRange> clip) {
  ValidateStrategy(strategy::Snr{snr_min_db, snr_max_db, clip});
  double raw = (snr_db - snr_min_db) / (snr_max_db - snr_min_db);
  raw = std::clamp(raw, 0.0, 1.0);
  if (clip) raw = std::clamp(raw, clip->lo, clip->hi);
  return raw;
}

double WeightFromDnsmos(double bak, double sig) {
  if (!(bak >= 1.0 && bak <= 5.0) || !(sig >= 1.0 && sig <= 5.0)) {
    throw InvalidArgument(
        fmt::format("DNSMOS scores (bak={}, sig={}) outside [1,5]", bak, sig));
  }
  return ((bak - 1.0) / 4.0 + (sig - 1.0) / 4.0) / 2.0;
}

double WeightFromClassifier2(double p0, double p1) {
  CheckDistribution({p0, p1});
  return p0;
}

double WeightFromClassifier3(double p0, double p1, double p2) {
  CheckDistribution({p0, p1, p2});
  return std::min(p0 + 0.5 * p2, 1.0);
}

std::vector<double> FrameWeightsFromConf(
    std::span<const double> conf_frames_noisy,
    std::span<const double> conf_frames_enhanced, double eps) {
  if (conf_frames_noisy.size() != conf_frames_enhanced.size()) {
    throw InvalidArgument(fmt::format(
        "frame count mismatch: noisy has {} frames, enhanced has {}",
        conf_frames_noisy.size(), conf_frames_enhanced.size()));
  }
  if (conf_frames_noisy.empty()) {
    throw InvalidArgument("frame-level weights need at least one frame");
  }
  std::vector<double> out(conf_frames_noisy.size());
  for (std::size_t t = 0; t != out.size(); ++t) {
    out[t] = WeightFromConf(conf_frames_noisy[t], conf_frames_enhanced[t], eps);
  }
  return out;
}

void ValidateStrategy(const WeightStrategy &s) {
  const auto *snr = std::get_if<strategy::Snr>(&s);
  if (!snr) return;
  if (!(snr->snr_min_db < snr->snr_max_db)) {
    throw InvalidArgument(fmt::format("SNR range needs min < max, got [{}, {}]",
                                      snr->snr_min_db, snr->snr_max_db));
  }
  if (snr->clip && !(0.0 <= snr->clip->lo && snr->clip->lo <= snr->clip->hi &&
                     snr->clip->hi <= 1.0)) {
    throw InvalidArgument(fmt::format("SNR clip [{}, {}] is not inside [0,1]",
                                      snr->clip->lo, snr->clip->hi));
  }
}

std::string StrategyName(const WeightStrategy &s) {
  return std::visit(
      Overloaded{
          [](const strategy::WerOracle &) -> std::string { return "WER-OA"; },
          [](const strategy::Confidence &) -> std::string { return "Conf-OA"; },
          [](const strategy::Switch &) -> std::string { return "Conf-Switch"; },
          [](const strategy::Snr &v) -> std::string {
            return v.clip ? "SNR-OA_clip" : "SNR-OA_no-clip";
          },
          [](const strategy::Dnsmos &) -> std::string { return "DNSMOS-OA"; },
          [](const strategy::Classifier2 &) -> std::string {
            return "Classifier-OA_2class";
          },
          [](const strategy::Classifier3 &) -> std::string {
            return "Classifier-OA_3class";
          },
          [](const strategy::FrameConfidence &) -> std::string {
            return "Frame-Conf-OA";
          },
      },
      s);
}

std::string StrategyToken(const WeightStrategy &s) {
  return std::visit(
      Overloaded{
          [](const strategy::WerOracle &) -> std::string {
            return "wer-oracle";
          },
          [](const strategy::Confidence &) -> std::string {
            return "confidence";
          },
          [](const strategy::Switch &) -> std::string { return "switch"; },
          [](const strategy::Snr &v) -> std::string {
            return v.clip ? "snr-clip" : "snr";
          },
          [](const strategy::Dnsmos &) -> std::string { return "dnsmos"; },
          [](const strategy::Classifier2 &) -> std::string {
            return "classifier2";
          },
          [](const strategy::Classifier3 &) -> std::string {
            return "classifier3";
          },
          [](const strategy::FrameConfidence &) -> std::string {
            return "frame-confidence";
          },
      },
      s);
}

WeightStrategy ParseStrategy(std::string_view token, double snr_min_db,
                             double snr_max_db, ClipRange snr_clip) {
  WeightStrategy s;
  if (token == "wer-oracle") {
    s = strategy::WerOracle{};
  } else if (token == "confidence") {
    s = strategy::Confidence{};
  } else if (token == "switch") {
    s = strategy::Switch{};
  } else if (token == "snr") {
    s = strategy::Snr{snr_min_db, snr_max_db, std::nullopt};
  } else if (token == "snr-clip") {
    s = strategy::Snr{snr_min_db, snr_max_db, snr_clip};
  } else if (token == "dnsmos") {
    s = strategy::Dnsmos{};
  } else if (token == "classifier2") {
    s = strategy::Classifier2{};
  } else if (token == "classifier3") {
    s = strategy::Classifier3{};
  } else if (token == "frame-confidence") {
    s = strategy::FrameConfidence{};
  } else {
    throw InvalidArgument(fmt::format(
        "unknown strategy '{}' (expected wer-oracle, confidence, switch, snr, "
        "snr-clip, dnsmos, classifier2, classifier3, frame-confidence)",
        token));
  }
  ValidateStrategy(s);
  return s;
}

int StrategyRank(const WeightStrategy &s) {
  // Variant order, with the clipped SNR row directly after the unclipped one.
  int rank = static_cast<int>(s.index()) * 2;
  if (const auto *snr = std::get_if<strategy::Snr>(&s); snr && snr->clip) {
    ++rank;
  }
  return rank;
}

}  // namespace oafuse
