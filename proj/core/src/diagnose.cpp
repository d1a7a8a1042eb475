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

#include "repal/diagnose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "repal/error.hpp"
#include "repal/random.hpp"

namespace repal {

namespace {

std::string format_g6(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

// Applies G to raw encodings given their masked-variant encodings.
class RefinementMap {
 public:
  RefinementMap(const Refinement* refinement, std::size_t dim)
      : refinement_(refinement), zero_(EmbeddingVector::zeros(dim)) {
    if (refinement_ && refinement_->cfg.lambda2 != 0.0 &&
        !refinement_->corpus_redundancy) {
      throw Error(ErrorCode::kInvalidArgument,
                  "corpus redundancy required when lambda2 != 0");
    }
  }

  bool needs_masks() const {
    return refinement_ != nullptr && refinement_->cfg.lambda1 != 0.0;
  }

  EmbeddingVector apply(const EmbeddingVector& v, const EmbeddingVector* v_star) const {
    if (!refinement_) return v;
    const auto& cfg = refinement_->cfg;
    const EmbeddingVector& star = v_star ? *v_star : zero_;
    const EmbeddingVector& hat =
        refinement_->corpus_redundancy ? *refinement_->corpus_redundancy : zero_;
    return refine(v, star, hat, cfg.lambda1, cfg.lambda2);
  }

 private:
  const Refinement* refinement_;
  EmbeddingVector zero_;
};

}  // namespace

std::vector<double> importance_profile(const Sentence& first, const Sentence& second,
                                       const Encoder& encoder,
                                       const Refinement* refinement) {
  if (first.size() < 2) {
    throw Error(ErrorCode::kSentenceTooShort,
                "importance needs a first sentence of at least 2 tokens");
  }
  if (refinement) refinement->cfg.validate();

  std::vector<Sentence> sentences{first, second};
  for (std::size_t i = 0; i < first.size(); ++i) {
    sentences.push_back(without_token(first, i));
  }
  std::vector<std::string> texts;
  texts.reserve(sentences.size());
  for (const auto& s : sentences) texts.push_back(s.raw);
  const auto raw = encoder.encode(texts);

  const RefinementMap g(refinement, raw.front().dim());
  std::vector<EmbeddingVector> starred;
  if (g.needs_masks()) {
    if (!refinement->model) {
      throw Error(ErrorCode::kInvalidArgument, "refinement needs a keyword model");
    }
    std::vector<std::string> masked;
    masked.reserve(sentences.size());
    for (const auto& s : sentences) {
      masked.push_back(redundancy_mask(s, *refinement->model, refinement->cfg).raw);
    }
    starred = encoder.encode(masked);
  }
  auto mapped = [&](std::size_t k) {
    return g.apply(raw[k], starred.empty() ? nullptr : &starred[k]);
  };

  const EmbeddingVector second_vec = mapped(1);
  const double full = cosine(mapped(0), second_vec);
  std::vector<double> h;
  h.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    h.push_back(full - cosine(mapped(2 + i), second_vec));
  }
  return h;
}

double word_importance(const Sentence& first, const Sentence& second,
                       std::size_t position, const Encoder& encoder,
                       const Refinement* refinement) {
  if (position >= first.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "word position " + std::to_string(position) + " out of range");
  }
  return importance_profile(first, second, encoder, refinement)[position];
}

ImportanceTable importance_table(std::span<const SimilarityPair> pairs,
                                 const Encoder& encoder,
                                 const Refinement& refinement) {
  struct Sums {
    double raw = 0.0;
    double refined = 0.0;
    std::size_t count = 0;
  };
  std::map<std::string, Sums> by_word;
  ImportanceTable table;
  for (const auto& pair : pairs) {
    if (pair.a.size() < 2) {
      ++table.skipped_pairs;
      continue;
    }
    const auto h_raw = importance_profile(pair.a, pair.b, encoder, nullptr);
    const auto h_refined = importance_profile(pair.a, pair.b, encoder, &refinement);
    for (std::size_t i = 0; i < pair.a.size(); ++i) {
      Sums& s = by_word[pair.a.tokens[i].normalized];
      s.raw += h_raw[i];
      s.refined += h_refined[i];
      ++s.count;
    }
  }
  for (const auto& [word, s] : by_word) {
    ImportanceRecord r;
    r.word = word;
    r.h_raw = s.raw / static_cast<double>(s.count);
    r.h_refined = s.refined / static_cast<double>(s.count);
    r.delta = r.h_refined - r.h_raw;
    r.occurrences = s.count;
    table.records.push_back(std::move(r));
  }
  std::stable_sort(table.records.begin(), table.records.end(),
                   [](const ImportanceRecord& a, const ImportanceRecord& b) {
                     return a.delta < b.delta;
                   });
  return table;
}

std::string importance_tsv(const ImportanceTable& table) {
  std::string out = "word\th_raw\th_refined\tdelta\n";
  for (const auto& r : table.records) {
    out += r.word + '\t' + format_g6(r.h_raw) + '\t' + format_g6(r.h_refined) + '\t' +
           format_g6(r.delta) + '\n';
  }
  return out;
}

std::vector<std::size_t> top_importance_positions(std::span<const double> h,
                                                  std::size_t top_k) {
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });
  order.resize(std::min(top_k, order.size()));
  return order;
}

double overlap_ratio(const Sentence& first, const Sentence& second,
                     const TfIdfModel& model, const Refinement& refinement,
                     const Encoder& encoder, std::size_t top_k) {
  if (top_k == 0) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (first.size() < top_k + 1) {
    throw Error(ErrorCode::kSentenceTooShort,
                "overlap ratio needs more than " + std::to_string(top_k) + " tokens");
  }
  const auto h = importance_profile(first, second, encoder, &refinement);
  const auto top = top_importance_positions(h, top_k);

  const auto keywords = select_keywords(first, model, refinement.cfg.mask_ratio);
  const std::set<std::size_t> keyword_set(keywords.begin(), keywords.end());
  std::size_t trivial_in_top = 0;
  for (std::size_t pos : top) {
    if (!keyword_set.contains(pos)) ++trivial_in_top;
  }
  return static_cast<double>(trivial_in_top) / static_cast<double>(top.size());
}

OverlapReport average_overlap(std::span<const SimilarityPair> pairs,
                              const TfIdfModel& model, const Refinement& refinement,
                              const Encoder& encoder, const OverlapOptions& options) {
  std::vector<std::size_t> ids;
  if (options.sample_size && *options.sample_size < pairs.size()) {
    SplitMix64 rng(options.seed);
    ids = rng.sample_indices(pairs.size(), *options.sample_size);
    std::sort(ids.begin(), ids.end());
  } else {
    ids.resize(pairs.size());
    std::iota(ids.begin(), ids.end(), 0);
  }

  OverlapReport report;
  double sum = 0.0;
  for (std::size_t id : ids) {
    const auto& pair = pairs[id];
    if (pair.a.size() < options.top_k + 1) {
      ++report.skipped;
      continue;
    }
    const double r =
        overlap_ratio(pair.a, pair.b, model, refinement, encoder, options.top_k);
    report.per_pair.push_back(PairOverlap{id, r});
    sum += r;
  }
  if (report.per_pair.empty()) {
    throw Error(ErrorCode::kNoEligiblePairs,
                "no pair has a first sentence longer than top_k tokens");
  }
  report.r_hat = sum / static_cast<double>(report.per_pair.size());
  return report;
}

std::vector<SweepRecord> lambda_sweep(const PairScorer& scorer, SweepAxis axis,
                                      std::span<const double> values,
                                      double fixed_other) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sweep");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0 || (i > 0 && !(values[i] > values[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sweep values must be ascending and >= 0");
    }
  }
  std::vector<SweepRecord> records;
  records.reserve(values.size());
  for (double lambda : values) {
    const double l1 = axis == SweepAxis::kLambda1 ? lambda : fixed_other;
    const double l2 = axis == SweepAxis::kLambda2 ? lambda : fixed_other;
    const SpectralReport spectrum = spectral_report(scorer.refined(l1, l2));
    records.push_back(SweepRecord{lambda, scorer.spearman_at(l1, l2),
                                  spectrum.lambda_max, spectrum.trace_bound});
  }
  return records;
}

std::vector<SweepRecord> lambda_sweep(const SimilarityDataset& dataset, SweepAxis axis,
                                      std::span<const double> values,
                                      double fixed_other, const Encoder& encoder,
                                      const TfIdfModel& model,
                                      const RefinementConfig& base) {
  const PairScorer scorer(dataset, model, base, encoder);
  return lambda_sweep(scorer, axis, values, fixed_other);
}

namespace {

std::string format_fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

// Two decimals for grid points such as 0.10; finer steps keep their digits.
std::string format_lambda(double v) {
  const double cents = std::round(v * 100.0) / 100.0;
  return std::abs(cents - v) <= 1e-12 * std::max(1.0, std::abs(v)) ? format_fixed(v, 2)
                                                                     : format_g6(v);
}

}  // namespace

std::string sweep_csv(std::span<const SweepRecord> records) {
  std::string out = "lambda,spearman,lambda_max,trace_bound\n";
  for (const auto& r : records) {
    out += format_lambda(r.lambda) + ',' + format_fixed(r.spearman, 4) + ',' +
           format_fixed(r.lambda_max, 4) + ',' + format_fixed(r.trace_bound, 4) + '\n';
  }
  return out;
}

EvalReport whitening_baseline(const SimilarityDataset& dataset, const Encoder& encoder,
                              double eps) {
  if (dataset.pairs.size() < 2) {
    throw Error(ErrorCode::kTooFewPairs, "whitening baseline needs at least 2 pairs");
  }
  const auto sentences = dataset.pooled_sentences();
  std::vector<std::string> texts;
  texts.reserve(sentences.size());
  for (const auto& s : sentences) texts.push_back(s.raw);
  const EmbeddingMatrix raw(encoder.encode(texts));
  const EmbeddingMatrix white = whiten(raw, eps);

  const auto gold = dataset.gold_scores();
  std::vector<double> raw_pred, white_pred;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    raw_pred.push_back(cosine(raw.row(2 * i), raw.row(2 * i + 1)));
    white_pred.push_back(cosine(white.row(2 * i), white.row(2 * i + 1)));
  }
  EvalReport report;
  report.dataset = dataset.name;
  report.spearman_raw = spearman(raw_pred, gold);
  report.spearman_refined = spearman(white_pred, gold);
  return report;
}

}  // namespace repal
