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

// The sentence-encoder boundary. Encoders are opaque: the toolkit only ever
// asks for one vector per text. Three backends share the Encoder interface:
//
//   mock    deterministic hash-based token vectors, mean pooled
//   file    vectors precomputed offline and stored as an embedding cache file
//   remote  an HTTP embedding service speaking POST /v1/encode
//
// Cache file format (JSON Lines):
//   {"format": "repal-cache", "version": 1, "dim": D}
//   {"hash": "<sha256 hex of text>", "text": "...", "vector": [...]}
//   ...

#ifndef REPAL_ENCODER_HPP_
#define REPAL_ENCODER_HPP_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repal/keyword.hpp"
#include "repal/vecmath.hpp"

namespace repal {

enum class EncoderKind { kMock, kFile, kRemote, kCached };

class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual EncoderKind kind() const = 0;
  // Zero only for a remote encoder that has not yet seen a response.
  virtual std::size_t dim() const = 0;
  virtual std::string describe() const = 0;

  // One vector per text, in request order. Throws EmptyInput for an empty
  // batch or an empty text; backends add their own errors.
  std::vector<EmbeddingVector> encode(std::span<const std::string> texts) const;
  EmbeddingVector encode_one(const std::string& text) const;

 protected:
  virtual std::vector<EmbeddingVector> encode_batch(
      std::span<const std::string> texts) const = 0;
};

// Hex SHA-256 of the exact text bytes.
std::string content_hash(std::string_view text);

// ---------------------------------------------------------------------------
// Mock encoder

// FNV-1a 64 of the token bytes, XOR salt, seeds a splitmix64 stream; each of
// the dim outputs u maps to u / 2^63 - 1.
EmbeddingVector token_vector(std::string_view token, std::size_t dim,
                             std::uint64_t salt);

struct MockEncoderConfig {
  std::size_t dim = 64;
  std::uint64_t salt = 0;
  // Recognized as a single token so masked text pools the mask vector.
  std::string mask_token = std::string(kDefaultMaskToken);
};

// Sentence vector = arithmetic mean of token_vector over the lowercased
// tokens of tokenize(text).
class MockEncoder final : public Encoder {
 public:
  explicit MockEncoder(MockEncoderConfig config = {});

  EncoderKind kind() const override { return EncoderKind::kMock; }
  std::size_t dim() const override { return config_.dim; }
  std::string describe() const override;

  const MockEncoderConfig& config() const { return config_; }

 protected:
  std::vector<EmbeddingVector> encode_batch(
      std::span<const std::string> texts) const override;

 private:
  MockEncoderConfig config_;
};

// ---------------------------------------------------------------------------
// Embedding cache

// Content-hash keyed vector store. Concurrent readers, exclusive writers.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::size_t dim);
  EmbeddingCache(EmbeddingCache&& other) noexcept;
  EmbeddingCache& operator=(EmbeddingCache&&) = delete;

  std::size_t dim() const { return dim_; }
  std::size_t size() const;

  std::optional<EmbeddingVector> find(std::string_view text) const;
  std::optional<EmbeddingVector> find_hash(const std::string& hash) const;
  // Throws DimensionMismatch for a vector of another width.
  void insert(const std::string& text, const EmbeddingVector& vector);

  // Records are written in hash order so the file is reproducible.
  void save(const std::filesystem::path& path) const;
  // Throws ParseError with the offending line number.
  static EmbeddingCache load(const std::filesystem::path& path);

 private:
  struct Entry {
    std::string text;
    EmbeddingVector vector;
  };

  std::size_t dim_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;  // keyed by content hash
};

// ---------------------------------------------------------------------------
// File encoder

// Serves vectors from a loaded cache file; unknown texts raise
// MissingEmbedding naming the text hash.
class FileEncoder final : public Encoder {
 public:
  explicit FileEncoder(const std::filesystem::path& path);
  explicit FileEncoder(std::shared_ptr<const EmbeddingCache> store,
                       std::string origin = "memory");

  EncoderKind kind() const override { return EncoderKind::kFile; }
  std::size_t dim() const override { return store_->dim(); }
  std::string describe() const override { return "file:" + origin_; }

 protected:
  std::vector<EmbeddingVector> encode_batch(
      std::span<const std::string> texts) const override;

 private:
  std::shared_ptr<const EmbeddingCache> store_;
  std::string origin_;
};

// ---------------------------------------------------------------------------
// Remote encoder

struct RetryPolicy {
  int retries = 2;
  std::chrono::milliseconds initial_backoff{250};  // doubles per retry
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleep_for
};

struct RemoteEncoderConfig {
  std::string base_url;  // e.g. http://localhost:8080 or http://host/prefix
  std::chrono::milliseconds timeout{30000};
  std::size_t batch_size = 32;
  std::size_t expected_dim = 0;  // 0: adopt the width of the first response
  RetryPolicy retry;
};

// Client for POST {base_url}/v1/encode with body {"texts": [...]} answering
// {"vectors": [[...], ...], "dim": D}. Transport failures, 5xx and 429 are
// retried; other non-200 statuses and malformed bodies fail immediately with
// RemoteUnavailable. Vectors of the wrong width raise DimMismatch.
class RemoteEncoder final : public Encoder {
 public:
  explicit RemoteEncoder(RemoteEncoderConfig config);

  EncoderKind kind() const override { return EncoderKind::kRemote; }
  std::size_t dim() const override { return dim_.load(); }
  std::string describe() const override { return "http:" + config_.base_url; }

  const RemoteEncoderConfig& config() const { return config_; }

 protected:
  std::vector<EmbeddingVector> encode_batch(
      std::span<const std::string> texts) const override;

 private:
  std::vector<EmbeddingVector> post_once(std::span<const std::string> texts,
                                         bool& transient) const;

  RemoteEncoderConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // prefix + /v1/encode
  mutable std::atomic<std::size_t> dim_;
};

// ---------------------------------------------------------------------------
// Caching decorator

// Forwards only texts it has not seen before (deduplicated, first-seen
// order) and memoizes the answers. calls() counts texts sent downstream.
class CachedEncoder final : public Encoder {
 public:
  explicit CachedEncoder(std::shared_ptr<const Encoder> inner);
  CachedEncoder(std::shared_ptr<const Encoder> inner,
                std::shared_ptr<EmbeddingCache> cache);

  EncoderKind kind() const override { return EncoderKind::kCached; }
  std::size_t dim() const override { return inner_->dim(); }
  std::string describe() const override { return inner_->describe(); }

  std::size_t forwarded_texts() const { return forwarded_.load(); }
  const EmbeddingCache* cache() const { return cache_.get(); }

 protected:
  std::vector<EmbeddingVector> encode_batch(
      std::span<const std::string> texts) const override;

 private:
  std::shared_ptr<const Encoder> inner_;
  mutable std::shared_ptr<EmbeddingCache> cache_;
  mutable std::mutex init_mutex_;
  mutable std::atomic<std::size_t> forwarded_{0};
};

// Encodes texts through the encoder and stores every vector in a new cache.
EmbeddingCache build_cache(const Encoder& encoder,
                           std::span<const std::string> texts);

// "mock[:dim[:salt]]", "file:<path>" or "http:<url>". mask_token is the
// literal the mock encoder treats as one token. The remote timeout defaults to
// 30 s unless timeout_override is set.
std::shared_ptr<const Encoder> make_encoder(
    std::string_view spec, std::string_view mask_token = kDefaultMaskToken,
    std::optional<std::chrono::milliseconds> timeout_override = std::nullopt);

}  // namespace repal

#endif  // REPAL_ENCODER_HPP_
