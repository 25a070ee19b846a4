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

#ifndef OAFUSE_MANIFEST_H_
#define OAFUSE_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oafuse {

// One utterance of an evaluation corpus.
struct ManifestEntry {
  std::string id;
  std::filesystem::path noisy_path;
  std::filesystem::path enhanced_path;
  std::optional<std::filesystem::path> clean_path;
  std::optional<std::string> ref_text;
  std::optional<double> snr_db;
  std::optional<double> dnsmos_bak;  // [1,5]
  std::optional<double> dnsmos_sig;  // [1,5]
  std::optional<std::vector<double>> classifier_posteriors;  // 2 or 3 values

  friend bool operator==(const ManifestEntry &,
                         const ManifestEntry &) = default;
};

// Reads a JSON-lines manifest. Blank lines are skipped and unknown keys are
// ignored. Relative paths are resolved against the manifest's directory.
// Throws DataError naming the line number, or the id of a duplicate.
std::vector<ManifestEntry> LoadManifest(const std::filesystem::path &path);

// Parses one manifest line; `base_dir` resolves relative paths.
ManifestEntry ParseManifestLine(const std::string &line,
                                const std::filesystem::path &base_dir);

// Writes entries in a fixed key order. Paths are written as stored.
void SaveManifest(const std::vector<ManifestEntry> &entries,
                  const std::filesystem::path &path);

}  // namespace oafuse

#endif  // OAFUSE_MANIFEST_H_
