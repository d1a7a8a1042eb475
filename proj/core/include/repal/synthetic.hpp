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

// The boilerplate benchmark: every sentence is one of three fixed 8-token
// prefixes followed by 1-3 content tokens from a 50-word vocabulary. The gold
// score of a pair is the Jaccard overlap of the two content sets, so the
// shared prefixes carry no signal and only inflate raw similarity.

#ifndef REPAL_SYNTHETIC_HPP_
#define REPAL_SYNTHETIC_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "repal/eval.hpp"

namespace repal {

inline constexpr std::size_t kSyntheticMinPairs = 10;
inline constexpr std::size_t kBoilerplateLength = 8;
inline constexpr std::size_t kContentVocabularySize = 50;
inline constexpr std::size_t kMaxContentTokens = 3;

extern const std::array<std::string_view, 3> kBoilerplatePrefixes;
extern const std::array<std::string_view, kContentVocabularySize> kContentVocabulary;

// TSV text (no header). Throws InvalidArgument for n_pairs < 10.
std::string generate_synthetic_tsv(std::size_t n_pairs, std::uint64_t seed);

// First n_dev pairs become the dev split, the rest the test split.
struct SyntheticSplits {
  SimilarityDataset dev;
  SimilarityDataset test;
};
SyntheticSplits synthetic_splits(std::size_t n_pairs, std::uint64_t seed,
                                 std::size_t n_dev);

}  // namespace repal

#endif  // REPAL_SYNTHETIC_HPP_
