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

#ifndef OAFUSE_FUSION_H_
#define OAFUSE_FUSION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oafuse {

inline constexpr double kDefaultEps = 1e-8;

// Which signal a hard switch keeps.
enum class Choice { kNoisy, kEnhanced };

// Inverse-error-rate weighting of the noisy signal: lower WER, higher weight.
double WeightFromWer(double wer_noisy, double wer_enhanced,
                     double eps = kDefaultEps);

// (conf_y + eps) / ((conf_y + eps) + (conf_x + eps))
double WeightFromConf(double conf_noisy, double conf_enhanced,
                      double eps = kDefaultEps);

// Ties keep the noisy signal.
Choice SwitchDecision(double conf_noisy, double conf_enhanced);

inline double WeightOfChoice(Choice c) {
  return c == Choice::kNoisy ? 1.0 : 0.0;
}

struct ClipRange {
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr double kDefaultSnrMinDb = 0.0;
inline constexpr double kDefaultSnrMaxDb = 20.0;
inline constexpr ClipRange kDefaultSnrClip{0.6, 1.0};

// Affine map of [snr_min, snr_max] onto [0,1], clamped, then optionally
// clamped again to the clip range.
double WeightFromSnr(double snr_db, double snr_min_db = kDefaultSnrMinDb,
                     double snr_max_db = kDefaultSnrMaxDb,
                     std::optional<ClipRange> clip = std::nullopt);

// Mean of the BAK and SIG MOS scores, each mapped from [1,5] to [0,1].
double WeightFromDnsmos(double bak, double sig);

// S' = p0 for the binary "noisy is better" classifier.
double WeightFromClassifier2(double p0, double p1);

// S' = p0 + 0.5 * p2 for the {noisy better, enhanced better, tie} classifier.
double WeightFromClassifier3(double p0, double p1, double p2);

// Elementwise WeightFromConf. Throws on a frame-count mismatch.
std::vector<double> FrameWeightsFromConf(
    std::span<const double> conf_frames_noisy,
    std::span<const double> conf_frames_enhanced, double eps = kDefaultEps);

namespace strategy {
struct WerOracle {};
struct Confidence {};
struct Switch {};
struct Snr {
  double snr_min_db = kDefaultSnrMinDb;
  double snr_max_db = kDefaultSnrMaxDb;
  std::optional<ClipRange> clip;
};
struct Dnsmos {};
struct Classifier2 {};
struct Classifier3 {};
struct FrameConfidence {};
}  // namespace strategy

using WeightStrategy =
    std::variant<strategy::WerOracle, strategy::Confidence, strategy::Switch,
                 strategy::Snr, strategy::Dnsmos, strategy::Classifier2,
                 strategy::Classifier3, strategy::FrameConfidence>;

// Throws InvalidArgument for a bad SNR range or clip interval.
void ValidateStrategy(const WeightStrategy &s);

// Report label, e.g. "Conf-OA" or "SNR-OA_clip".
std::string StrategyName(const WeightStrategy &s);

// Short CLI token, e.g. "confidence" or "snr-clip".
std::string StrategyToken(const WeightStrategy &s);

// Parses a CLI token. SNR variants take their range and clip from the
// arguments. Throws InvalidArgument on an unknown token.
WeightStrategy ParseStrategy(std::string_view token,
                             double snr_min_db = kDefaultSnrMinDb,
                             double snr_max_db = kDefaultSnrMaxDb,
                             ClipRange snr_clip = kDefaultSnrClip);

// Position in the fixed report order.
int StrategyRank(const WeightStrategy &s);

}  // namespace oafuse

#endif  // OAFUSE_FUSION_H_
