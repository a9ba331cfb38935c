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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "egodemo/random.hpp"

namespace egodemo {

// Seeded Fisher-Yates shuffle (portable across standard libraries).
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Shuffled 9:1 split: train gets floor(9n/10) items, val the rest.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_val(std::vector<T> items, std::uint64_t seed) {
  seeded_shuffle(items, seed);
  const std::size_t train = items.size() * 9 / 10;
  std::vector<T> val(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(train)),
                     std::make_move_iterator(items.end()));
  items.resize(train);
  return {std::move(items), std::move(val)};
}

// "standard:generated" with non-negative decimal parts, e.g. "1:0.5". Both
// sides are kept as exact fractions num / den.
struct MixRatio {
  std::uint64_t standard_num = 1;
  std::uint64_t standard_den = 1;
  std::uint64_t generated_num = 0;
  std::uint64_t generated_den = 1;
  std::string text = "1:0";

  static MixRatio parse(const std::string& text);
  // floor(generated / standard * n_standard), computed exactly.
  std::size_t generated_count(std::size_t standard_count) const;
};

enum class MixGroup { kStandard, kGenerated };

struct MixEntry {
  std::string episode;
  MixGroup group = MixGroup::kStandard;
  friend bool operator==(const MixEntry&, const MixEntry&) = default;
};

struct MixManifest {
  std::string ratio;
  std::uint64_t seed = 0;
  std::vector<MixEntry> entries;

  std::size_t count(MixGroup group) const;
  std::string to_json() const;
  static MixManifest from_json(const std::string& text, const std::string& source = "<manifest>");
};

// Every standard episode, plus a seeded selection of generated ones sized by
// the ratio. Throws DataError naming the shortfall when there are too few.
MixManifest mix_datasets(const std::vector<std::string>& standard, const std::vector<std::string>& generated,
                         const MixRatio& ratio, std::uint64_t seed);

// Checks the group counts against the ratio and that no episode repeats.
void validate_manifest(const MixManifest& manifest);

}  // namespace egodemo
