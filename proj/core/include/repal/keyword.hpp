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

// Tokenization, TF-IDF keyword scoring and partial masking.
//
// A sentence's keywords are its highest TF-IDF tokens. Masking them leaves a
// sentence made only of trivial context words, whose encoding is the
// sentence-level redundancy subtracted during refinement.

#ifndef REPAL_KEYWORD_HPP_
#define REPAL_KEYWORD_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace repal {

inline constexpr std::string_view kDefaultMaskToken = "[MASK]";
inline constexpr double kDefaultMaskRatio = 0.3;

struct Token {
  std::string text;        // as it appears in the raw string
  std::string normalized;  // lowercased lookup key
  std::size_t begin = 0;   // byte offsets into Sentence::raw
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string raw;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  // Token texts joined by single spaces.
  std::string joined() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TokenizeOptions {
  // Literals recognized as single, case-preserved tokens (e.g. "[MASK]").
  std::vector<std::string> special_tokens;
};

// Splits on anything that is not a letter or digit. Characters of scripts
// written without spaces (Han, Kana, Thai, ...) become one token each, with
// trailing combining marks attached. Throws EmptyInput when no token remains.
Sentence tokenize(std::string_view text, const TokenizeOptions& options = {});

// One token per space-separated field, kept verbatim apart from lowercasing
// of the lookup key.
Sentence from_pretokenized(std::string_view line);

// The sentence with one token removed, the rest re-joined by single spaces.
Sentence without_token(const Sentence& s, std::size_t position);

// Lowercase mapping for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
std::string to_lower_utf8(std::string_view text);

using StopwordSet = std::unordered_set<std::string>;

StopwordSet default_stopwords();

// UTF-8, one token per line, '#' starts a comment.
StopwordSet load_stopwords(const std::filesystem::path& path);

class TfIdfModel {
 public:
  TfIdfModel(std::size_t doc_count,
             std::unordered_map<std::string, std::size_t> doc_freq,
             StopwordSet stopwords);

  std::size_t doc_count() const { return doc_count_; }
  // Zero for unseen tokens.
  std::size_t doc_freq(const std::string& normalized) const;
  bool is_stopword(const std::string& normalized) const;

  // ln((N + 1) / (df + 1)) + 1
  double idf(const std::string& normalized) const;

 private:
  std::size_t doc_count_;
  std::unordered_map<std::string, std::size_t> doc_freq_;
  StopwordSet stopwords_;
};

// Document frequency counts each token at most once per sentence.
TfIdfModel build_tfidf(std::span<const Sentence> corpus,
                       StopwordSet stopwords = default_stopwords());

// tf * idf per normalized token, with tf = count / N. Stopwords score 0.
std::map<std::string, double> keyword_scores(const Sentence& s,
                                             const TfIdfModel& model);

// All positions ordered by score descending, earlier position first on ties.
std::vector<std::size_t> rank_positions(const Sentence& s,
                                        const TfIdfModel& model);

// The K = max(1, ceil(ratio * N)) best-scoring positions, ascending. Zero-score
// positions are never picked; if every score is zero the earliest position is
// returned alone.
std::vector<std::size_t> select_keywords(const Sentence& s,
                                         const TfIdfModel& model,
                                         double ratio = kDefaultMaskRatio);

struct MaskedSentence {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<std::size_t> masked_positions;  // ascending
  Sentence source;
};

// Replaces the keyword tokens in the raw text with mask_token, leaving all
// other characters in place. Throws IndexOutOfRange.
MaskedSentence partial_mask(const Sentence& s,
                            std::span<const std::size_t> keywords,
                            std::string_view mask_token = kDefaultMaskToken);

}  // namespace repal

#endif  // REPAL_KEYWORD_HPP_
