// Copyright 2026 The RepAL Toolkit Authors.
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

#include "repal/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <vector>

#include "repal/error.hpp"
#include "repal/random.hpp"

namespace repal {

const std::array<std::string_view, 3> kBoilerplatePrefixes = {
    "as for those of us who have been",
    "and so it was that all of the",
    "but if you are with them in some",
};

const std::array<std::string_view, kContentVocabularySize> kContentVocabulary = {
    "apple",   "river",   "engine",  "guitar",  "planet",  "bakery",  "glacier",
    "tractor", "violin",  "lantern", "harbor",  "meadow",  "rocket",  "castle",
    "dolphin", "canyon",  "pepper",  "museum",  "blanket", "volcano", "compass",
    "orchard", "saddle",  "tunnel",  "helmet",  "falcon",  "pottery", "lagoon",
    "marble",  "quartz",  "ribbon",  "spinach", "thunder", "walnut",  "zipper",
    "anchor",  "banjo",   "cactus",  "desert",  "ferry",   "gravel",  "hammock",
    "igloo",   "jackal",  "kettle",  "lobster", "magnet",  "noodle",  "oyster",
    "pillow",
};

namespace {

std::vector<std::size_t> draw_content(SplitMix64& rng, std::size_t count,
                                      const std::set<std::size_t>& exclude) {
  std::vector<std::size_t> out;
  while (out.size() < count) {
    const auto id = static_cast<std::size_t>(rng.below(kContentVocabularySize));
    if (exclude.contains(id) ||
        std::find(out.begin(), out.end(), id) != out.end()) {
      continue;
    }
    out.push_back(id);
  }
  return out;
}

std::string render(std::string_view prefix, const std::vector<std::size_t>& content) {
  std::string out(prefix);
  for (std::size_t id : content) {
    out.push_back(' ');
    out += kContentVocabulary[id];
  }
  return out;
}

}  // namespace

std::string generate_synthetic_tsv(std::size_t n_pairs, std::uint64_t seed) {
  if (n_pairs < kSyntheticMinPairs) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic benchmark needs at least " +
                    std::to_string(kSyntheticMinPairs) + " pairs");
  }
  SplitMix64 rng(seed);
  std::string out;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const auto size_a = 1 + static_cast<std::size_t>(rng.below(kMaxContentTokens));
    const auto content_a = draw_content(rng, size_a, {});

    // b keeps a random number of a's tokens and tops up with fresh ones.
    const auto shared = static_cast<std::size_t>(rng.below(size_a + 1));
    const std::size_t min_b = std::max<std::size_t>(1, shared);
    const auto size_b =
        min_b + static_cast<std::size_t>(rng.below(kMaxContentTokens - min_b + 1));
    std::vector<std::size_t> content_b(content_a.begin(), content_a.begin() + shared);
    const std::set<std::size_t> used(content_a.begin(), content_a.end());
    for (std::size_t id : draw_content(rng, size_b - shared, used)) {
      content_b.push_back(id);
    }
    // Shuffle b so shared tokens are not always leading.
    for (std::size_t i = content_b.size(); i > 1; --i) {
      std::swap(content_b[i - 1], content_b[rng.below(i)]);
    }

    const auto prefix_a = kBoilerplatePrefixes[rng.below(kBoilerplatePrefixes.size())];
    const auto prefix_b = kBoilerplatePrefixes[rng.below(kBoilerplatePrefixes.size())];

    const std::set<std::size_t> set_a(content_a.begin(), content_a.end());
    const std::set<std::size_t> set_b(content_b.begin(), content_b.end());
    std::size_t inter = 0;
    for (std::size_t id : set_a) inter += set_b.contains(id) ? 1 : 0;
    const std::size_t uni = set_a.size() + set_b.size() - inter;
    const double gold = static_cast<double>(inter) / static_cast<double>(uni);

    char gold_text[32];
    std::snprintf(gold_text, sizeof gold_text, "%.6f", gold);
    out += render(prefix_a, content_a) + '\t' + render(prefix_b, content_b) + '\t' +
           gold_text + '\n';
  }
  return out;
}

SyntheticSplits synthetic_splits(std::size_t n_pairs, std::uint64_t seed,
                                 std::size_t n_dev) {
  LoadOptions options;
  options.name = "synthetic";
  SimilarityDataset all = parse_dataset(generate_synthetic_tsv(n_pairs, seed), options);
  if (n_dev < 2 || n_dev + 2 > all.pairs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "dev split must leave >= 2 pairs per side");
  }
  SyntheticSplits splits;
  splits.dev.name = "synthetic-dev";
  splits.dev.split = Split::kDev;
  splits.test.name = "synthetic-test";
  splits.test.split = Split::kTest;
  splits.dev.pairs.assign(all.pairs.begin(), all.pairs.begin() + n_dev);
  splits.test.pairs.assign(all.pairs.begin() + n_dev, all.pairs.end());
  return splits;
}

}  // namespace repal
