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

#include "oafuse/manifest.h"

#include <cmath>
#include <fstream>
#include <set>

#include "fmt/format.h"
#include "json.hpp"
#include "oafuse/error.h"

namespace oafuse {

namespace {

using nlohmann::json;

std::string RequireString(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(fmt::format("missing field '{}'", key));
  if (!it->is_string() || it->get_ref<const std::string &>().empty()) {
    throw DataError(fmt::format("field '{}' must be a non-empty string", key));
  }
  return it->get<std::string>();
}

std::optional<double> OptionalNumber(const json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw DataError(fmt::format("field '{}' must be a number", key));
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw DataError(fmt::format("field '{}' must be finite", key));
  }
  return v;
}

std::filesystem::path Resolve(const std::string &p,
                              const std::filesystem::path &base_dir) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base_dir.empty()) return base_dir / path;
  return path;
}

void CheckMos(const std::optional<double> &v, const char *key) {
  if (v && (*v < 1.0 || *v > 5.0)) {
    throw DataError(fmt::format("field '{}' = {} is outside [1,5]", key, *v));
  }
}

}  // namespace

ManifestEntry ParseManifestLine(const std::string &line,
                                const std::filesystem::path &base_dir) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw DataError(fmt::format("malformed JSON: {}", e.what()));
  }
  if (!j.is_object()) throw DataError("manifest line is not a JSON object");

  ManifestEntry e;
  e.id = RequireString(j, "id");
  e.noisy_path = Resolve(RequireString(j, "noisy_path"), base_dir);
  e.enhanced_path = Resolve(RequireString(j, "enhanced_path"), base_dir);
  if (j.contains("clean_path") && !j["clean_path"].is_null()) {
    e.clean_path = Resolve(RequireString(j, "clean_path"), base_dir);
  }
  if (j.contains("ref_text") && !j["ref_text"].is_null()) {
    if (!j["ref_text"].is_string()) {
      throw DataError("field 'ref_text' must be a string");
    }
    e.ref_text = j["ref_text"].get<std::string>();
  }
  e.snr_db = OptionalNumber(j, "snr_db");
  e.dnsmos_bak = OptionalNumber(j, "dnsmos_bak");
  e.dnsmos_sig = OptionalNumber(j, "dnsmos_sig");
  CheckMos(e.dnsmos_bak, "dnsmos_bak");
  CheckMos(e.dnsmos_sig, "dnsmos_sig");
  if (j.contains("classifier_posteriors") &&
      !j["classifier_posteriors"].is_null()) {
    const auto &p = j["classifier_posteriors"];
    if (!p.is_array() || (p.size() != 2 && p.size() != 3)) {
      throw DataError("field 'classifier_posteriors' must hold 2 or 3 numbers");
    }
    std::vector<double> v;
    for (const auto &x : p) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw DataError("field 'classifier_posteriors' must hold numbers");
      }
      v.push_back(x.get<double>());
    }
    e.classifier_posteriors = std::move(v);
  }
  return e;
}

std::vector<ManifestEntry> LoadManifest(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) {
    throw DataError(fmt::format("cannot open manifest '{}'", path.string()));
  }
  const auto base_dir = path.parent_path();
  std::vector<ManifestEntry> out;
  std::set<std::string> seen;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ManifestEntry e;
    try {
      e = ParseManifestLine(line, base_dir);
    } catch (const DataError &err) {
      throw DataError(
          fmt::format("{}:{}: {}", path.string(), line_no, err.what()));
    }
    if (!seen.insert(e.id).second) {
      throw DataError(fmt::format("{}:{}: duplicate id '{}'", path.string(),
                                  line_no, e.id));
    }
    out.push_back(std::move(e));
  }
  return out;
}

void SaveManifest(const std::vector<ManifestEntry> &entries,
                  const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw DataError(fmt::format("cannot write manifest '{}'", path.string()));
  }
  for (const auto &e : entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["noisy_path"] = e.noisy_path.generic_string();
    j["enhanced_path"] = e.enhanced_path.generic_string();
    if (e.clean_path) j["clean_path"] = e.clean_path->generic_string();
    if (e.ref_text) j["ref_text"] = *e.ref_text;
    if (e.snr_db) j["snr_db"] = *e.snr_db;
    if (e.dnsmos_bak) j["dnsmos_bak"] = *e.dnsmos_bak;
    if (e.dnsmos_sig) j["dnsmos_sig"] = *e.dnsmos_sig;
    if (e.classifier_posteriors) {
      j["classifier_posteriors"] = *e.classifier_posteriors;
    }
    os << j.dump() << '\n';
  }
  if (!os) {
    throw DataError(fmt::format("write failed for '{}'", path.string()));
  }
}

}  // namespace oafuse
