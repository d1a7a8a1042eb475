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

#include "repal/refine.hpp"

#include <cmath>

#include "repal/error.hpp"

namespace repal {

namespace {

std::vector<std::string> raw_texts(std::span<const Sentence> corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& s : corpus) texts.push_back(s.raw);
  return texts;
}

}  // namespace

void RefinementConfig::validate() const {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || lambda1 < 0.0 ||
      lambda2 < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "lambdas must be finite and >= 0");
  }
  if (!(mask_ratio > 0.0 && mask_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mask ratio must be in (0, 1]");
  }
  if (mask_token.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mask token must not be empty");
  }
}

MaskedSentence redundancy_mask(const Sentence& s, const TfIdfModel& model,
                               const RefinementConfig& cfg) {
  const auto keywords = select_keywords(s, model, cfg.mask_ratio);
  return partial_mask(s, keywords, cfg.mask_token);
}

EmbeddingVector sentence_redundancy(const Sentence& s, const TfIdfModel& model,
                                    const RefinementConfig& cfg,
                                    const Encoder& encoder) {
  return encoder.encode_one(redundancy_mask(s, model, cfg).raw);
}

EmbeddingVector corpus_redundancy(std::span<const Sentence> corpus,
                                  const Encoder& encoder) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty corpus");
  const auto vectors = encoder.encode(raw_texts(corpus));
  return mean_vector(vectors);
}

EmbeddingVector refine(const EmbeddingVector& v, const EmbeddingVector& v_star,
                       const EmbeddingVector& v_hat, double lambda1,
                       double lambda2) {
  if (v.dim() != v_star.dim() || v.dim() != v_hat.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "refinement inputs have different dimensions");
  }
  std::vector<double> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out[i] = v[i] - lambda1 * v_star[i] - lambda2 * v_hat[i];
  }
  return EmbeddingVector(std::move(out));
}

EmbeddingVector refine(const EmbeddingVector& v, const EmbeddingVector& v_star,
                       const EmbeddingVector& v_hat, const RefinementConfig& cfg) {
  return refine(v, v_star, v_hat, cfg.lambda1, cfg.lambda2);
}

RedundancyBundle build_redundancy(std::span<const Sentence> corpus,
                                  const TfIdfModel& model,
                                  const RefinementConfig& cfg,
                                  const Encoder& encoder,
                                  std::span<const Sentence> redundancy_corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty corpus");
  cfg.validate();

  std::vector<std::string> masked;
  masked.reserve(corpus.size());
  for (const auto& s : corpus) masked.push_back(redundancy_mask(s, model, cfg).raw);

  auto raw = encoder.encode(raw_texts(corpus));
  auto starred = encoder.encode(masked);
  // Sum over f(x_i) of the raw sentences, never the masked ones.
  EmbeddingVector v_hat = redundancy_corpus.empty()
                              ? mean_vector(raw)
                              : corpus_redundancy(redundancy_corpus, encoder);
  return RedundancyBundle{std::move(raw), std::move(starred), std::move(v_hat)};
}

EmbeddingMatrix apply_refinement(const RedundancyBundle& bundle, double lambda1,
                                 double lambda2) {
  std::vector<EmbeddingVector> rows;
  rows.reserve(bundle.size());
  for (std::size_t i = 0; i < bundle.size(); ++i) {
    rows.push_back(refine(bundle.raw[i], bundle.sentence_redundancy[i],
                          bundle.corpus_redundancy, lambda1, lambda2));
  }
  return EmbeddingMatrix(std::move(rows));
}

RefinedCorpus refine_corpus(std::span<const Sentence> corpus,
                            const TfIdfModel& model, const RefinementConfig& cfg,
                            const Encoder& encoder) {
  RedundancyBundle bundle = build_redundancy(corpus, model, cfg, encoder);
  EmbeddingMatrix refined = apply_refinement(bundle, cfg.lambda1, cfg.lambda2);
  return RefinedCorpus{std::move(refined), std::move(bundle)};
}

}  // namespace repal
