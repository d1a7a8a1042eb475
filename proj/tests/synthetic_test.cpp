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

#include <set>

#include <gtest/gtest.h>

#include "repal/error.hpp"
#include "test_support.hpp"

namespace repal {
namespace {

using testing::error_of;

std::set<std::string> content_words(const Sentence& s) {
  std::set<std::string> out;
  for (std::size_t i = kBoilerplateLength; i < s.size(); ++i) out.insert(s.tokens[i].normalized);
  return out;
}

TEST(Synthetic, Deterministic) {
  EXPECT_EQ(generate_synthetic_tsv(50, 42), generate_synthetic_tsv(50, 42));
  EXPECT_NE(generate_synthetic_tsv(50, 42), generate_synthetic_tsv(50, 43));
}

TEST(Synthetic, MinimumSize) {
  EXPECT_EQ(error_of([] { generate_synthetic_tsv(9, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(generate_synthetic_tsv(10, 1));
}

TEST(Synthetic, Structure) {
  const auto ds = parse_dataset(generate_synthetic_tsv(300, 5));
  ASSERT_EQ(ds.pairs.size(), 300u);
  const std::set<std::string_view> prefixes(kBoilerplatePrefixes.begin(),
                                            kBoilerplatePrefixes.end());
  const std::set<std::string_view> vocabulary(kContentVocabulary.begin(),
                                              kContentVocabulary.end());
  const auto stopwords = default_stopwords();
  bool saw_identical = false;
  for (const auto& p : ds.pairs) {
    for (const Sentence* s : {&p.a, &p.b}) {
      ASSERT_GE(s->size(), kBoilerplateLength + 1);
      ASSERT_LE(s->size(), kBoilerplateLength + kMaxContentTokens);
      std::string prefix;
      for (std::size_t i = 0; i < kBoilerplateLength; ++i) {
        if (i > 0) prefix += ' ';
        prefix += s->tokens[i].text;
        EXPECT_TRUE(stopwords.contains(s->tokens[i].normalized)) << s->tokens[i].text;
      }
      EXPECT_TRUE(prefixes.contains(prefix)) << prefix;
      for (const auto& w : content_words(*s)) EXPECT_TRUE(vocabulary.contains(w)) << w;
    }
    const auto a = content_words(p.a);
    const auto b = content_words(p.b);
    std::size_t inter = 0;
    for (const auto& w : a) inter += b.contains(w) ? 1 : 0;
    const double jaccard =
        static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
    EXPECT_NEAR(p.gold, jaccard, 5e-7);
    EXPECT_GE(p.gold, 0.0);
    EXPECT_LE(p.gold, 1.0);
    if (a == b) {
      EXPECT_EQ(p.gold, 1.0);
      saw_identical = true;
    }
  }
  EXPECT_TRUE(saw_identical);
}

TEST(Synthetic, Splits) {
  const auto splits = synthetic_splits(200, 42, 100);
  EXPECT_EQ(splits.dev.pairs.size(), 100u);
  EXPECT_EQ(splits.test.pairs.size(), 100u);
  EXPECT_EQ(splits.dev.split, Split::kDev);
  const auto all = parse_dataset(generate_synthetic_tsv(200, 42));
  EXPECT_EQ(splits.test.pairs[0].a, all.pairs[100].a);
  EXPECT_EQ(error_of([] { synthetic_splits(20, 1, 19); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace repal
