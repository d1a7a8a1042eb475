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

#include "repal/keyword.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "repal/error.hpp"

namespace repal {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
  char32_t cp;
  std::size_t length;
};

// Invalid sequences decode to U+FFFD consuming one byte.
Decoded decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {kReplacement, 1};
  }
  if (i + len > s.size()) return {kReplacement, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {kReplacement, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

enum class CharClass { kSeparator, kWord, kSolo, kMark };

bool is_combining_mark(char32_t cp) {
  return in(cp, 0x0300, 0x036F) || in(cp, 0x0483, 0x0489) ||
         in(cp, 0x0591, 0x05BD) || in(cp, 0x0610, 0x061A) ||
         in(cp, 0x064B, 0x065F) || in(cp, 0x0900, 0x0903) ||
         in(cp, 0x093A, 0x094F) || in(cp, 0x1AB0, 0x1AFF) ||
         in(cp, 0x1DC0, 0x1DFF) || in(cp, 0x20D0, 0x20FF) ||
         in(cp, 0xFE20, 0xFE2F) || in(cp, 0x3099, 0x309A) ||
         cp == 0x0E31 || in(cp, 0x0E34, 0x0E3A) || in(cp, 0x0E47, 0x0E4E) ||
         cp == 0x0EB1 || in(cp, 0x0EB4, 0x0EBC) || in(cp, 0x0EC8, 0x0ECD) ||
         in(cp, 0xFE00, 0xFE0F) || cp == 0x200D;
}

// Scripts written without spaces between words.
bool is_unsegmented_script(char32_t cp) {
  return in(cp, 0x4E00, 0x9FFF) || in(cp, 0x3400, 0x4DBF) ||
         in(cp, 0x20000, 0x2FFFF) || in(cp, 0xF900, 0xFAFF) ||
         in(cp, 0x3040, 0x309F) || in(cp, 0x30A0, 0x30FF) ||
         in(cp, 0x31F0, 0x31FF) || in(cp, 0xFF66, 0xFF9F) ||
         in(cp, 0x0E00, 0x0E7F) || in(cp, 0x0E80, 0x0EFF) ||
         in(cp, 0x1000, 0x109F) || in(cp, 0x1780, 0x17FF) || cp == 0x3005;
}

bool is_non_ascii_separator(char32_t cp) {
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return false;  // ordinal letters
  return cp == kReplacement || in(cp, 0x80, 0xBF) || cp == 0xD7 || cp == 0xF7 ||
         in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) ||
         in(cp, 0x2100, 0x214F) || in(cp, 0x2190, 0x2BFF) ||
         in(cp, 0x3000, 0x303F) || in(cp, 0xFE30, 0xFE4F) ||
         in(cp, 0xFE50, 0xFE6F) || in(cp, 0xFF00, 0xFF0F) ||
         in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) ||
         in(cp, 0xFF5B, 0xFF65) || in(cp, 0xE000, 0xF8FF) ||
         in(cp, 0x1F000, 0x1FAFF) || cp == 0xFEFF;
}

CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    const bool alnum = (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
                       (cp >= 'A' && cp <= 'Z');
    return alnum ? CharClass::kWord : CharClass::kSeparator;
  }
  if (is_combining_mark(cp)) return CharClass::kMark;
  if (is_non_ascii_separator(cp)) return CharClass::kSeparator;
  if (is_unsegmented_script(cp)) return CharClass::kSolo;
  return CharClass::kWord;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp < 0x80) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return cp | 1;
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) {
    return (cp & 1) ? cp + 1 : cp;
  }
  if (cp == 0x178) return 0xFF;
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

Token make_token(std::string_view raw, std::size_t begin, std::size_t end) {
  Token t;
  t.text = std::string(raw.substr(begin, end - begin));
  t.normalized = to_lower_utf8(t.text);
  t.begin = begin;
  t.end = end;
  return t;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\v\f");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\v\f");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string Sentence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

std::string to_lower_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const Decoded d = decode_utf8(text, i);
    if (d.cp == kReplacement && d.length == 1 &&
        static_cast<unsigned char>(text[i]) >= 0x80) {
      out.push_back(text[i]);  // keep undecodable bytes untouched
    } else {
      append_utf8(out, to_lower(d.cp));
    }
    i += d.length;
  }
  return out;
}

Sentence tokenize(std::string_view text, const TokenizeOptions& options) {
  Sentence s;
  s.raw = std::string(text);
  std::string_view raw = s.raw;

  std::size_t word_begin = std::string_view::npos;
  auto flush_word = [&](std::size_t end) {
    if (word_begin != std::string_view::npos) {
      s.tokens.push_back(make_token(raw, word_begin, end));
      word_begin = std::string_view::npos;
    }
  };

  std::size_t i = 0;
  while (i < raw.size()) {
    bool matched_special = false;
    for (const auto& special : options.special_tokens) {
      if (!special.empty() && raw.substr(i, special.size()) == special) {
        flush_word(i);
        Token t;
        t.text = special;
        t.normalized = special;
        t.begin = i;
        t.end = i + special.size();
        s.tokens.push_back(std::move(t));
        i += special.size();
        matched_special = true;
        break;
      }
    }
    if (matched_special) continue;

    const Decoded d = decode_utf8(raw, i);
    switch (classify(d.cp)) {
      case CharClass::kWord:
        if (word_begin == std::string_view::npos) word_begin = i;
        break;
      case CharClass::kSeparator:
        flush_word(i);
        break;
      case CharClass::kSolo:
        flush_word(i);
        word_begin = i;
        // Trailing marks belong to this cluster.
        {
          std::size_t end = i + d.length;
          while (end < raw.size()) {
            const Decoded next = decode_utf8(raw, end);
            if (classify(next.cp) != CharClass::kMark) break;
            end += next.length;
          }
          flush_word(end);
          i = end;
          continue;
        }
      case CharClass::kMark:
        // Marks extend the current word; a stray mark is dropped.
        if (word_begin == std::string_view::npos && !s.tokens.empty() &&
            s.tokens.back().end == i) {
          Token& prev = s.tokens.back();
          prev = make_token(raw, prev.begin, i + d.length);
        }
        break;
    }
    i += d.length;
  }
  flush_word(raw.size());

  if (s.tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no tokens in input text");
  }
  return s;
}

Sentence from_pretokenized(std::string_view line) {
  Sentence s;
  s.raw = std::string(line);
  std::string_view raw = s.raw;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r' || raw[i] == '\n') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r' &&
           raw[j] != '\n') {
      ++j;
    }
    s.tokens.push_back(make_token(raw, i, j));
    i = j;
  }
  if (s.tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no tokens in pre-tokenized line");
  }
  return s;
}

Sentence without_token(const Sentence& s, std::size_t position) {
  if (position >= s.tokens.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "token position " + std::to_string(position) + " out of range");
  }
  if (s.tokens.size() < 2) {
    throw Error(ErrorCode::kSentenceTooShort,
                "deleting a token would leave an empty sentence");
  }
  Sentence out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i == position) continue;
    if (!out.raw.empty()) out.raw.push_back(' ');
    Token t = s.tokens[i];
    t.begin = out.raw.size();
    out.raw += t.text;
    t.end = out.raw.size();
    out.tokens.push_back(std::move(t));
  }
  return out;
}

StopwordSet default_stopwords() {
  static const char* const kWords[] = {
      // articles and determiners
      "a", "an", "the", "this", "that", "these", "those", "some", "any", "each",
      "every", "all", "both", "either", "neither", "no", "such",
      // prepositions
      "about", "above", "across", "after", "against", "along", "among", "around",
      "at", "before", "behind", "below", "beneath", "beside", "between", "beyond",
      "by", "down", "during", "for", "from", "in", "inside", "into", "near", "of",
      "off", "on", "onto", "out", "outside", "over", "past", "since", "through",
      "throughout", "to", "toward", "towards", "under", "until", "up", "upon",
      "with", "within", "without",
      // conjunctions
      "and", "but", "or", "nor", "so", "yet", "if", "because", "although",
      "though", "while", "whereas", "than", "as", "whether",
      // pronouns
      "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves",
      "you", "your", "yours", "yourself", "yourselves", "he", "him", "his",
      "himself", "she", "her", "hers", "herself", "it", "its", "itself", "they",
      "them", "their", "theirs", "themselves", "who", "whom", "whose", "which",
      "what",
      // auxiliaries
      "is", "am", "are", "was", "were", "be", "been", "being", "do", "does",
      "did", "has", "have", "had",
  };
  StopwordSet out;
  for (const char* w : kWords) out.insert(w);
  return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open stopword file " + path.string());
  }
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (!view.empty()) out.insert(to_lower_utf8(view));
  }
  return out;
}

TfIdfModel::TfIdfModel(std::size_t doc_count,
                       std::unordered_map<std::string, std::size_t> doc_freq,
                       StopwordSet stopwords)
    : doc_count_(doc_count),
      doc_freq_(std::move(doc_freq)),
      stopwords_(std::move(stopwords)) {
  if (doc_count_ == 0) throw Error(ErrorCode::kEmptyCorpus, "no documents");
  for (const auto& [token, df] : doc_freq_) {
    if (df == 0 || df > doc_count_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "document frequency of '" + token + "' out of range");
    }
  }
}

std::size_t TfIdfModel::doc_freq(const std::string& normalized) const {
  const auto it = doc_freq_.find(normalized);
  return it == doc_freq_.end() ? 0 : it->second;
}

bool TfIdfModel::is_stopword(const std::string& normalized) const {
  return stopwords_.contains(normalized);
}

double TfIdfModel::idf(const std::string& normalized) const {
  const double n = static_cast<double>(doc_count_);
  const double df = static_cast<double>(doc_freq(normalized));
  return std::log((n + 1.0) / (df + 1.0)) + 1.0;
}

TfIdfModel build_tfidf(std::span<const Sentence> corpus, StopwordSet stopwords) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& s : corpus) {
    std::unordered_set<std::string> seen;
    for (const auto& t : s.tokens) {
      if (seen.insert(t.normalized).second) ++df[t.normalized];
    }
  }
  return TfIdfModel(corpus.size(), std::move(df), std::move(stopwords));
}

std::map<std::string, double> keyword_scores(const Sentence& s,
                                             const TfIdfModel& model) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : s.tokens) ++counts[t.normalized];
  const double n = static_cast<double>(s.tokens.size());
  std::map<std::string, double> scores;
  for (const auto& [token, count] : counts) {
    scores[token] = model.is_stopword(token)
                        ? 0.0
                        : (static_cast<double>(count) / n) * model.idf(token);
  }
  return scores;
}

std::vector<std::size_t> rank_positions(const Sentence& s,
                                        const TfIdfModel& model) {
  const auto scores = keyword_scores(s, model);
  std::vector<double> by_position(s.tokens.size());
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    by_position[i] = scores.at(s.tokens[i].normalized);
  }
  std::vector<std::size_t> order(s.tokens.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return by_position[a] > by_position[b];
  });
  return order;
}

std::vector<std::size_t> select_keywords(const Sentence& s,
                                         const TfIdfModel& model, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mask ratio must be in (0, 1]");
  }
  if (s.tokens.empty()) return {};
  const std::size_t n = s.tokens.size();
  // The small slack keeps products like 0.3 * 10 from rounding up to 4.
  const auto budget = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(n) - 1e-9));
  const std::size_t k = std::clamp<std::size_t>(budget, 1, n);

  const auto scores = keyword_scores(s, model);
  std::vector<std::size_t> chosen;
  for (std::size_t pos : rank_positions(s, model)) {
    if (chosen.size() == k) break;
    if (scores.at(s.tokens[pos].normalized) <= 0.0) break;
    chosen.push_back(pos);
  }
  if (chosen.empty()) chosen.push_back(0);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

MaskedSentence partial_mask(const Sentence& s,
                            std::span<const std::size_t> keywords,
                            std::string_view mask_token) {
  std::set<std::size_t> masked;
  for (std::size_t k : keywords) {
    if (k >= s.tokens.size()) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "keyword position " + std::to_string(k) + " out of range for " +
                      std::to_string(s.tokens.size()) + " tokens");
    }
    masked.insert(k);
  }

  MaskedSentence out;
  out.source = s;
  out.masked_positions.assign(masked.begin(), masked.end());
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Token& t = s.tokens[i];
    if (masked.contains(i)) {
      out.raw.append(s.raw, cursor, t.begin - cursor);
      out.raw += mask_token;
      cursor = t.end;
      out.tokens.emplace_back(mask_token);
    } else {
      out.tokens.push_back(t.text);
    }
  }
  out.raw.append(s.raw, cursor, std::string::npos);
  return out;
}

}  // namespace repal
