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

#include "repal/encoder.hpp"

#include <atomic>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "repal/error.hpp"
#include "repal/random.hpp"
#include "test_support.hpp"

namespace repal {
namespace {

using testing::error_of;
using testing::TempDir;

// Reference values from tests/oracle/oracles.py.
constexpr double kTokenA = -0.25653807312918164;
const std::vector<double> kDog{0.8665923279825352, 0.11405004820993736, 0.7304372060754216,
                               -0.35569664004270396};
const std::vector<double> kCat{-0.9056141643182383, -0.9251524346319183,
                               -0.9987004204442429, -0.6101268115324678};
const std::vector<double> kDogCat{-0.019510918167851554, -0.4055511932109905,
                                  -0.13413160718441064, -0.4829117257875859};

MockEncoder mock(std::size_t dim, std::uint64_t salt = 0) {
  return MockEncoder(MockEncoderConfig{dim, salt});
}

TEST(Hashing, Fnv1a64KnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Hashing, ContentHashIsSha256) {
  EXPECT_EQ(content_hash("dog"),
            "cd6357efdd966de8c0cb2f876cc89ec74ce35f0968e11743987084bd42fb8944");
  EXPECT_EQ(content_hash(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(TokenVector, MatchesReference) {
  EXPECT_EQ(token_vector("a", 1, 0)[0], kTokenA);
  EXPECT_EQ(token_vector("dog", 4, 0).data(), kDog);
  EXPECT_EQ(token_vector("cat", 4, 0).data(), kCat);
}

TEST(TokenVector, DeterministicAndDistinct) {
  EXPECT_EQ(token_vector("river", 16, 3), token_vector("river", 16, 3));
  EXPECT_NE(token_vector("river", 16, 3), token_vector("river", 16, 4));
  const char* words[] = {"the", "a", "of", "dog", "cat", "dogs", "[MASK]", "é", "日", "0"};
  std::set<std::vector<double>> seen;
  for (const char* w : words) seen.insert(token_vector(w, 8, 0).data());
  EXPECT_EQ(seen.size(), std::size(words));
  for (const char* w : words) {
    const auto v = token_vector(w, 8, 0);
    for (double x : v.values()) {
      EXPECT_GE(x, -1.0);
      EXPECT_LT(x, 1.0);
    }
  }
}

TEST(TokenVector, Errors) {
  EXPECT_EQ(error_of([] { token_vector("", 4, 0); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(error_of([] { token_vector("x", 0, 0); }), ErrorCode::kInvalidArgument);
}

TEST(MockEncoder, MeanOfTokenVectors) {
  const MockEncoder enc = mock(4);
  EXPECT_EQ(enc.encode_one("dog").data(), kDog);
  EXPECT_EQ(enc.encode_one("dog cat").data(), kDogCat);
  EXPECT_EQ(enc.encode_one("Dog, CAT!").data(), kDogCat);
  EXPECT_EQ(enc.dim(), 4u);
  EXPECT_EQ(enc.describe(), "mock:4:0");
}

TEST(MockEncoder, MaskLiteralIsOneToken) {
  const MockEncoder enc = mock(6);
  const auto got = enc.encode_one("the [MASK] sat");
  const auto the = token_vector("the", 6, 0);
  const auto m = token_vector("[MASK]", 6, 0);
  const auto sat = token_vector("sat", 6, 0);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(got[i], (the[i] + m[i] + sat[i]) / 3.0);
  }
  MockEncoder custom(MockEncoderConfig{6, 0, "<mask>"});
  EXPECT_EQ(custom.encode_one("<mask>").data(), token_vector("<mask>", 6, 0).data());
}

TEST(MockEncoder, BatchMatchesSingles) {
  const MockEncoder enc = mock(8, 17);
  const std::vector<std::string> texts{"one", "two words", "three word sentence"};
  const auto batch = enc.encode(texts);
  for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(batch[i], enc.encode_one(texts[i]));
}

TEST(Encoder, RejectsEmptyInput) {
  const MockEncoder enc = mock(4);
  EXPECT_EQ(error_of([&] { enc.encode(std::span<const std::string>{}); }),
            ErrorCode::kEmptyInput);
  const std::vector<std::string> texts{"ok", ""};
  EXPECT_EQ(error_of([&] { enc.encode(texts); }), ErrorCode::kEmptyInput);
}

TEST(EmbeddingCache, InsertFindAndWidth) {
  EmbeddingCache cache(2);
  cache.insert("hello", EmbeddingVector({1.0, 2.0}));
  ASSERT_TRUE(cache.find("hello"));
  EXPECT_EQ(cache.find("hello")->data(), (std::vector<double>{1.0, 2.0}));
  EXPECT_TRUE(cache.find_hash(content_hash("hello")));
  EXPECT_FALSE(cache.find("other"));
  EXPECT_EQ(error_of([&] { cache.insert("x", EmbeddingVector({1.0})); }),
            ErrorCode::kDimensionMismatch);
}

TEST(EmbeddingCache, SaveLoadRoundTrip) {
  TempDir dir;
  const MockEncoder enc = mock(5);
  const std::vector<std::string> texts{"b sentence", "a sentence", "ünïcödé text"};
  const EmbeddingCache cache = build_cache(enc, texts);
  cache.save(dir.file("c.jsonl"));
  const EmbeddingCache loaded = EmbeddingCache::load(dir.file("c.jsonl"));
  EXPECT_EQ(loaded.size(), 3u);
  EXPECT_EQ(loaded.dim(), 5u);
  for (const auto& t : texts) EXPECT_EQ(*loaded.find(t), enc.encode_one(t));

  // Hash order makes the file independent of insertion order.
  const std::vector<std::string> reversed(texts.rbegin(), texts.rend());
  build_cache(enc, reversed).save(dir.file("d.jsonl"));
  EXPECT_EQ(testing::slurp(dir.file("c.jsonl")), testing::slurp(dir.file("d.jsonl")));
}

TEST(EmbeddingCache, LoadErrorsNameTheLine) {
  TempDir dir;
  const std::string header = R"({"format":"repal-cache","version":1,"dim":2})";
  const std::string good = R"({"hash":")" + content_hash("x") +
                           R"(","text":"x","vector":[1,2]})";
  auto line_of = [&](const std::string& contents) -> std::size_t {
    const auto p = dir.write("bad.jsonl", contents);
    try {
      EmbeddingCache::load(p);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of(header + "\n" + good + "\n{oops\n"), 3u);
  EXPECT_EQ(line_of(R"({"format":"other","version":1,"dim":2})"), 1u);
  EXPECT_EQ(line_of(header + "\n" + R"({"hash":"00","text":"x","vector":[1,2]})"), 2u);
  EXPECT_EQ(line_of(header + "\n" + R"({"hash":")" + content_hash("x") +
                    R"(","text":"x","vector":[1,2,3]})"),
            2u);
  const auto empty = dir.write("empty.jsonl", "");
  EXPECT_EQ(error_of([&] { EmbeddingCache::load(empty); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([&] { EmbeddingCache::load(dir.file("missing.jsonl")); }),
            ErrorCode::kIoError);
}

TEST(EmbeddingCache, ConcurrentReaders) {
  const MockEncoder enc = mock(4);
  std::vector<std::string> texts;
  for (int i = 0; i < 50; ++i) texts.push_back("text " + std::to_string(i));
  const EmbeddingCache cache = build_cache(enc, texts);
  std::vector<std::thread> threads;
  std::atomic<int> hits{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (const auto& s : texts) hits += cache.find(s) ? 1 : 0;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(hits.load(), 200);
}

TEST(FileEncoder, ServesCachedVectors) {
  TempDir dir;
  const MockEncoder enc = mock(3);
  const std::vector<std::string> texts{"alpha", "beta gamma"};
  build_cache(enc, texts).save(dir.file("c.jsonl"));
  FileEncoder file(dir.file("c.jsonl"));
  EXPECT_EQ(file.dim(), 3u);
  EXPECT_EQ(file.encode(texts), enc.encode(texts));
}

TEST(FileEncoder, MissingTextNamesItsHash) {
  TempDir dir;
  const MockEncoder enc = mock(3);
  const std::vector<std::string> texts{"alpha"};
  build_cache(enc, texts).save(dir.file("c.jsonl"));
  FileEncoder file(dir.file("c.jsonl"));
  try {
    file.encode_one("unknown text");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEmbedding);
    EXPECT_NE(std::string(e.what()).find(content_hash("unknown text")), std::string::npos);
    EXPECT_TRUE(is_encoder_error(e.code()));
  }
}

TEST(CachedEncoder, ForwardsEachTextOnce) {
  auto inner = std::make_shared<MockEncoder>(MockEncoderConfig{4, 0});
  CachedEncoder cached(inner);
  const std::vector<std::string> a{"x", "y", "x"};
  const auto first = cached.encode(a);
  EXPECT_EQ(cached.forwarded_texts(), 2u);
  EXPECT_EQ(first, inner->encode(a));
  cached.encode(a);
  EXPECT_EQ(cached.forwarded_texts(), 2u);
  ASSERT_NE(cached.cache(), nullptr);
  EXPECT_EQ(cached.cache()->size(), 2u);
}

TEST(MakeEncoder, Specs) {
  const auto def = make_encoder("mock");
  EXPECT_EQ(def->kind(), EncoderKind::kMock);
  EXPECT_EQ(def->dim(), 64u);
  const auto custom = make_encoder("mock:8:5");
  EXPECT_EQ(custom->dim(), 8u);
  EXPECT_EQ(custom->encode_one("dog"), token_vector("dog", 8, 5));

  TempDir dir;
  const std::vector<std::string> texts{"alpha"};
  build_cache(*custom, texts).save(dir.file("c.jsonl"));
  const auto file = make_encoder("file:" + dir.file("c.jsonl"));
  EXPECT_EQ(file->kind(), EncoderKind::kFile);
  EXPECT_EQ(file->dim(), 8u);

  for (const char* bad : {"", "mock:", "mock:x", "mock:8:-1", "file:", "onnx:model", "mock:0"}) {
    EXPECT_EQ(error_of([&] { make_encoder(bad); }), ErrorCode::kInvalidArgument) << bad;
  }
}

}  // namespace
}  // namespace repal
