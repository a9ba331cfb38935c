// Copyright 2026 The EgoDemo Authors
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

#include "egodemo/mixing.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include <json.hpp>

#include "egodemo/error.hpp"

namespace egodemo {

using nlohmann::json;

namespace {

// Parses a non-negative decimal into num / den with den a power of ten.
void parse_decimal(const std::string& s, std::uint64_t& num, std::uint64_t& den, const std::string& whole) {
  if (s.empty()) throw InvalidArgument("malformed ratio '" + whole + "'");
  num = 0;
  den = 1;
  bool dot = false;
  bool digits = false;
  for (char c : s) {
    if (c == '.' && !dot) {
      dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw InvalidArgument("malformed ratio '" + whole + "'");
    digits = true;
    if (num > (std::numeric_limits<std::uint64_t>::max() - 9) / 10 || (dot && den > std::numeric_limits<std::uint64_t>::max() / 10)) {
      throw InvalidArgument("ratio '" + whole + "' has too many digits");
    }
    num = num * 10 + static_cast<std::uint64_t>(c - '0');
    if (dot) den *= 10;
  }
  if (!digits) throw InvalidArgument("malformed ratio '" + whole + "'");
}

std::string group_name(MixGroup g) { return g == MixGroup::kStandard ? "standard" : "generated"; }

}  // namespace

MixRatio MixRatio::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("ratio '" + text + "' must look like 1:0.5");
  MixRatio r;
  parse_decimal(text.substr(0, colon), r.standard_num, r.standard_den, text);
  parse_decimal(text.substr(colon + 1), r.generated_num, r.generated_den, text);
  if (r.standard_num == 0) throw InvalidArgument("ratio '" + text + "' has a zero standard share");
  r.text = text;
  return r;
}

std::size_t MixRatio::generated_count(std::size_t standard_count) const {
  using u128 = unsigned __int128;
  const u128 num = static_cast<u128>(standard_count) * generated_num * standard_den;
  const u128 den = static_cast<u128>(generated_den) * standard_num;
  return static_cast<std::size_t>(num / den);
}

std::size_t MixManifest::count(MixGroup group) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const MixEntry& e) { return e.group == group; }));
}

std::string MixManifest::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["ratio"] = ratio;
  j["seed"] = seed;
  j["standard_count"] = count(MixGroup::kStandard);
  j["generated_count"] = count(MixGroup::kGenerated);
  json list = json::array();
  for (const auto& e : entries) list.push_back({{"episode", e.episode}, {"group", group_name(e.group)}});
  j["entries"] = list;
  return j.dump(2) + "\n";
}

MixManifest MixManifest::from_json(const std::string& text, const std::string& source) {
  try {
    const json j = json::parse(text);
    MixManifest m;
    m.ratio = j.at("ratio").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("entries")) {
      const std::string g = e.at("group").get<std::string>();
      if (g != "standard" && g != "generated") throw DataError(source + ": unknown group '" + g + "'");
      m.entries.push_back({e.at("episode").get<std::string>(), g == "standard" ? MixGroup::kStandard : MixGroup::kGenerated});
    }
    if (j.at("standard_count").get<std::size_t>() != m.count(MixGroup::kStandard) ||
        j.at("generated_count").get<std::size_t>() != m.count(MixGroup::kGenerated)) {
      throw DataError(source + ": group counts disagree with the entry list");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
}

MixManifest mix_datasets(const std::vector<std::string>& standard, const std::vector<std::string>& generated,
                         const MixRatio& ratio, std::uint64_t seed) {
  if (standard.empty()) throw InvalidArgument("no standard episodes to mix");
  const std::size_t want = ratio.generated_count(standard.size());
  if (generated.size() < want) {
    throw DataError("ratio " + ratio.text + " over " + std::to_string(standard.size()) + " standard episodes needs " +
                    std::to_string(want) + " generated episodes, only " + std::to_string(generated.size()) +
                    " available (short by " + std::to_string(want - generated.size()) + ")");
  }
  MixManifest m;
  m.ratio = ratio.text;
  m.seed = seed;
  for (const auto& s : standard) m.entries.push_back({s, MixGroup::kStandard});
  std::vector<std::string> pool = generated;
  std::sort(pool.begin(), pool.end());
  seeded_shuffle(pool, seed);
  pool.resize(want);
  std::sort(pool.begin(), pool.end());
  for (auto& g : pool) m.entries.push_back({std::move(g), MixGroup::kGenerated});
  validate_manifest(m);
  return m;
}

void validate_manifest(const MixManifest& manifest) {
  const MixRatio ratio = MixRatio::parse(manifest.ratio);
  const std::size_t standard = manifest.count(MixGroup::kStandard);
  const std::size_t generated = manifest.count(MixGroup::kGenerated);
  if (standard == 0) throw DataError("manifest has no standard episodes");
  if (generated != ratio.generated_count(standard)) {
    throw DataError("manifest has " + std::to_string(generated) + " generated episodes; ratio " + manifest.ratio +
                    " over " + std::to_string(standard) + " standard requires " +
                    std::to_string(ratio.generated_count(standard)));
  }
  std::set<std::string> seen;
  for (const auto& e : manifest.entries) {
    if (!seen.insert(e.episode).second) throw DataError("manifest lists episode '" + e.episode + "' twice");
  }
}

}  // namespace egodemo
