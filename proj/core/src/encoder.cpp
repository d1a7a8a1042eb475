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

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "repal/error.hpp"
#include "repal/random.hpp"

namespace repal {

using nlohmann::json;

std::vector<EmbeddingVector> Encoder::encode(
    std::span<const std::string> texts) const {
  if (texts.empty()) throw Error(ErrorCode::kEmptyInput, "no texts to encode");
  for (const auto& t : texts) {
    if (t.empty()) throw Error(ErrorCode::kEmptyInput, "cannot encode empty text");
  }
  auto out = encode_batch(texts);
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::kRemoteUnavailable,
                "encoder returned " + std::to_string(out.size()) +
                    " vectors for " + std::to_string(texts.size()) + " texts");
  }
  return out;
}

EmbeddingVector Encoder::encode_one(const std::string& text) const {
  return encode(std::span<const std::string>(&text, 1)).front();
}

std::string content_hash(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------

EmbeddingVector token_vector(std::string_view token, std::size_t dim,
                             std::uint64_t salt) {
  if (token.empty()) throw Error(ErrorCode::kEmptyInput, "empty token");
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  SplitMix64 rng(fnv1a64(token) ^ salt);
  std::vector<double> values(dim);
  for (double& v : values) v = rng.signed_unit();
  return EmbeddingVector(std::move(values));
}

MockEncoder::MockEncoder(MockEncoderConfig config) : config_(std::move(config)) {
  if (config_.dim == 0) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
}

std::string MockEncoder::describe() const {
  return "mock:" + std::to_string(config_.dim) + ":" + std::to_string(config_.salt);
}

std::vector<EmbeddingVector> MockEncoder::encode_batch(
    std::span<const std::string> texts) const {
  TokenizeOptions options;
  if (!config_.mask_token.empty()) options.special_tokens.push_back(config_.mask_token);

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    const Sentence s = tokenize(text, options);
    std::vector<double> sum(config_.dim, 0.0);
    for (const auto& t : s.tokens) {
      const EmbeddingVector v = token_vector(t.normalized, config_.dim, config_.salt);
      for (std::size_t i = 0; i < config_.dim; ++i) sum[i] += v[i];
    }
    const double n = static_cast<double>(s.tokens.size());
    for (double& x : sum) x /= n;
    out.emplace_back(std::move(sum));
  }
  return out;
}

// ---------------------------------------------------------------------------

EmbeddingCache::EmbeddingCache(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "cache dim must be >= 1");
}

EmbeddingCache::EmbeddingCache(EmbeddingCache&& other) noexcept : dim_(other.dim_) {
  std::unique_lock lock(other.mutex_);
  entries_ = std::move(other.entries_);
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::optional<EmbeddingVector> EmbeddingCache::find(std::string_view text) const {
  return find_hash(content_hash(text));
}

std::optional<EmbeddingVector> EmbeddingCache::find_hash(
    const std::string& hash) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(hash);
  if (it == entries_.end()) return std::nullopt;
  return it->second.vector;
}

void EmbeddingCache::insert(const std::string& text, const EmbeddingVector& vector) {
  if (vector.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cache holds dim " + std::to_string(dim_) + ", got " +
                    std::to_string(vector.dim()));
  }
  std::string hash = content_hash(text);
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(std::move(hash), Entry{text, vector});
}

void EmbeddingCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << json{{"format", "repal-cache"}, {"version", 1}, {"dim", dim_}}.dump() << '\n';
  std::shared_lock lock(mutex_);
  for (const auto& [hash, entry] : entries_) {
    out << json{{"hash", hash}, {"text", entry.text}, {"vector", entry.vector.data()}}
               .dump()
        << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

EmbeddingCache EmbeddingCache::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingCache> cache;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!cache) {
      if (!record.is_object() || record.value("format", "") != "repal-cache" ||
          record.value("version", 0) != 1 || !record.contains("dim") ||
          !record["dim"].is_number_unsigned() || record["dim"].get<std::size_t>() == 0) {
        throw ParseError(line_no, "expected header {\"format\": \"repal-cache\", "
                                  "\"version\": 1, \"dim\": D}");
      }
      cache.emplace(record["dim"].get<std::size_t>());
      continue;
    }
    if (!record.is_object() || !record.contains("hash") || !record.contains("text") ||
        !record.contains("vector") || !record["text"].is_string() ||
        !record["hash"].is_string() || !record["vector"].is_array()) {
      throw ParseError(line_no, "record needs hash, text and vector fields");
    }
    const auto text = record["text"].get<std::string>();
    if (record["hash"].get<std::string>() != content_hash(text)) {
      throw ParseError(line_no, "hash does not match SHA-256 of text");
    }
    std::vector<double> values;
    for (const auto& v : record["vector"]) {
      if (!v.is_number()) throw ParseError(line_no, "non-numeric vector entry");
      values.push_back(v.get<double>());
    }
    if (values.size() != cache->dim()) {
      throw ParseError(line_no, "vector has " + std::to_string(values.size()) +
                                    " entries, header says " +
                                    std::to_string(cache->dim()));
    }
    try {
      cache->insert(text, EmbeddingVector(std::move(values)));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!cache) throw ParseError(line_no, "missing cache header");
  return std::move(*cache);
}

// ---------------------------------------------------------------------------

FileEncoder::FileEncoder(const std::filesystem::path& path)
    : store_(std::make_shared<EmbeddingCache>(EmbeddingCache::load(path))),
      origin_(path.string()) {}

FileEncoder::FileEncoder(std::shared_ptr<const EmbeddingCache> store,
                         std::string origin)
    : store_(std::move(store)), origin_(std::move(origin)) {}

std::vector<EmbeddingVector> FileEncoder::encode_batch(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    const std::string hash = content_hash(text);
    auto v = store_->find_hash(hash);
    if (!v) {
      throw Error(ErrorCode::kMissingEmbedding,
                  "no stored embedding for text with hash " + hash);
    }
    out.push_back(std::move(*v));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Splits "http://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "remote URL needs a scheme: " + url);
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_begin);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_begin), prefix};
}

}  // namespace

RemoteEncoder::RemoteEncoder(RemoteEncoderConfig config)
    : config_(std::move(config)), dim_(config_.expected_dim) {
  if (config_.batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  }
  auto [origin, prefix] = split_url(config_.base_url);
  origin_ = std::move(origin);
  path_ = prefix + "/v1/encode";
  if (!config_.retry.sleep) {
    config_.retry.sleep = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

std::vector<EmbeddingVector> RemoteEncoder::post_once(
    std::span<const std::string> texts, bool& transient) const {
  transient = false;
  httplib::Client client(origin_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  const json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  auto response = client.Post(path_, body.dump(), "application/json");
  if (!response) {
    transient = true;
    throw Error(ErrorCode::kRemoteUnavailable,
                "request to " + origin_ + path_ + " failed: " +
                    httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    transient = response->status >= 500 || response->status == 429;
    throw Error(ErrorCode::kRemoteUnavailable,
                "encoder service answered HTTP " + std::to_string(response->status));
  }

  json parsed;
  try {
    parsed = json::parse(response->body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::kRemoteUnavailable, "malformed response body");
  }
  if (!parsed.is_object() || !parsed.contains("vectors") ||
      !parsed["vectors"].is_array() || !parsed.contains("dim") ||
      !parsed["dim"].is_number_unsigned()) {
    throw Error(ErrorCode::kRemoteUnavailable,
                "response lacks \"vectors\" array or \"dim\"");
  }
  const auto& vectors = parsed["vectors"];
  if (vectors.size() != texts.size()) {
    throw Error(ErrorCode::kRemoteUnavailable,
                "response has " + std::to_string(vectors.size()) + " vectors for " +
                    std::to_string(texts.size()) + " texts");
  }

  const auto reported = parsed["dim"].get<std::size_t>();
  std::size_t expected = dim_.load();
  if (expected == 0) {
    if (reported == 0) throw Error(ErrorCode::kDimMismatch, "service reported dim 0");
    dim_.compare_exchange_strong(expected, reported);
    expected = dim_.load();
  }
  if (reported != expected) {
    throw Error(ErrorCode::kDimMismatch,
                "service reported dim " + std::to_string(reported) + ", expected " +
                    std::to_string(expected));
  }

  std::vector<EmbeddingVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!v.is_array()) throw Error(ErrorCode::kRemoteUnavailable, "vector is not an array");
    if (v.size() != expected) {
      throw Error(ErrorCode::kDimMismatch,
                  "vector of width " + std::to_string(v.size()) + ", expected " +
                      std::to_string(expected));
    }
    std::vector<double> values;
    values.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) {
        throw Error(ErrorCode::kRemoteUnavailable, "non-numeric vector entry");
      }
      values.push_back(x.get<double>());
    }
    try {
      out.emplace_back(std::move(values));
    } catch (const Error& e) {
      throw Error(ErrorCode::kRemoteUnavailable, e.what());
    }
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEncoder::encode_batch(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += config_.batch_size) {
    const auto batch = texts.subspan(
        begin, std::min(config_.batch_size, texts.size() - begin));
    auto backoff = config_.retry.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      bool transient = false;
      try {
        auto vectors = post_once(batch, transient);
        for (auto& v : vectors) out.push_back(std::move(v));
        break;
      } catch (const Error&) {
        if (!transient || attempt >= config_.retry.retries) throw;
      }
      config_.retry.sleep(backoff);
      backoff *= 2;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CachedEncoder::CachedEncoder(std::shared_ptr<const Encoder> inner)
    : CachedEncoder(std::move(inner), nullptr) {}

CachedEncoder::CachedEncoder(std::shared_ptr<const Encoder> inner,
                             std::shared_ptr<EmbeddingCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
  if (!inner_) throw Error(ErrorCode::kInvalidArgument, "null inner encoder");
}

std::vector<EmbeddingVector> CachedEncoder::encode_batch(
    std::span<const std::string> texts) const {
  std::shared_ptr<EmbeddingCache> cache;
  {
    std::lock_guard lock(init_mutex_);
    cache = cache_;
  }

  std::vector<std::optional<EmbeddingVector>> found(texts.size());
  std::vector<std::string> missing;
  std::unordered_map<std::string, std::size_t> missing_index;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (cache) found[i] = cache->find(texts[i]);
    if (!found[i] && !missing_index.contains(texts[i])) {
      missing_index.emplace(texts[i], missing.size());
      missing.push_back(texts[i]);
    }
  }

  if (!missing.empty()) {
    auto fresh = inner_->encode(missing);
    forwarded_ += missing.size();
    {
      std::lock_guard lock(init_mutex_);
      if (!cache_) cache_ = std::make_shared<EmbeddingCache>(fresh.front().dim());
      cache = cache_;
    }
    for (std::size_t k = 0; k < missing.size(); ++k) cache->insert(missing[k], fresh[k]);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (!found[i]) found[i] = fresh[missing_index.at(texts[i])];
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& v : found) out.push_back(std::move(*v));
  return out;
}

EmbeddingCache build_cache(const Encoder& encoder,
                           std::span<const std::string> texts) {
  const auto vectors = encoder.encode(texts);
  EmbeddingCache cache(vectors.front().dim());
  for (std::size_t i = 0; i < texts.size(); ++i) cache.insert(texts[i], vectors[i]);
  return cache;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad " + std::string(what) + " in encoder spec: '" +
                    std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::shared_ptr<const Encoder> make_encoder(
    std::string_view spec, std::string_view mask_token,
    std::optional<std::chrono::milliseconds> timeout_override) {
  if (spec == "mock" || spec.starts_with("mock:")) {
    MockEncoderConfig config;
    config.mask_token = std::string(mask_token);
    if (spec.starts_with("mock:")) {
      std::string_view rest = spec.substr(5);
      const auto colon = rest.find(':');
      config.dim = parse_number<std::size_t>(rest.substr(0, colon), "dim");
      if (colon != std::string_view::npos) {
        config.salt = parse_number<std::uint64_t>(rest.substr(colon + 1), "salt");
      }
    }
    return std::make_shared<MockEncoder>(config);
  }
  if (spec.starts_with("file:")) {
    const std::string_view path = spec.substr(5);
    if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "file encoder needs a path");
    return std::make_shared<FileEncoder>(std::filesystem::path(path));
  }
  if (spec.starts_with("http:")) {
    RemoteEncoderConfig config;
    // Both "http:http://host:port" and "http://host:port" are accepted.
    const std::string_view rest = spec.substr(5);
    config.base_url = rest.starts_with("//") ? "http:" + std::string(rest)
                                             : std::string(rest);
    if (timeout_override) config.timeout = *timeout_override;
    return std::make_shared<RemoteEncoder>(std::move(config));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown encoder spec '" + std::string(spec) +
                  "' (expected mock[:dim[:salt]], file:<path> or http:<url>)");
}

}  // namespace repal
