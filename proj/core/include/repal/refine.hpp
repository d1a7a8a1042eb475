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

// Redundancy removal. A refined embedding is
//
//   v' = f(x) - lambda1 * f(x*) - lambda2 * mean_j f(x_j)
//
// where x* is x with its keywords masked (sentence-level redundancy) and the
// mean runs over the raw encodings of the corpus (corpus-level redundancy).
// Both redundancy terms are independent of the lambdas, so they are computed
// once into a RedundancyBundle and reused for every (lambda1, lambda2).

#ifndef REPAL_REFINE_HPP_
#define REPAL_REFINE_HPP_

#include <span>
#include <string>
#include <vector>

#include "repal/encoder.hpp"
#include "repal/keyword.hpp"
#include "repal/vecmath.hpp"

namespace repal {

struct RefinementConfig {
  double lambda1 = 0.0;  // sentence-level weight
  double lambda2 = 0.0;  // corpus-level weight
  double mask_ratio = kDefaultMaskRatio;
  std::string mask_token = std::string(kDefaultMaskToken);

  // Throws InvalidArgument for negative/non-finite weights or a ratio outside
  // (0, 1].
  void validate() const;
};

struct RedundancyBundle {
  std::vector<EmbeddingVector> raw;                  // f(x_i), corpus order
  std::vector<EmbeddingVector> sentence_redundancy;  // f(x_i*), corpus order
  EmbeddingVector corpus_redundancy;                 // mean of raw encodings

  std::size_t size() const { return raw.size(); }
  std::size_t dim() const { return corpus_redundancy.dim(); }
};

struct RefinedCorpus {
  EmbeddingMatrix refined;
  RedundancyBundle bundle;
};

// The keyword-masked variant of s used for its sentence-level redundancy.
MaskedSentence redundancy_mask(const Sentence& s, const TfIdfModel& model,
                               const RefinementConfig& cfg);

EmbeddingVector sentence_redundancy(const Sentence& s, const TfIdfModel& model,
                                    const RefinementConfig& cfg,
                                    const Encoder& encoder);

// Mean of the unmasked encodings. Throws EmptyCorpus.
EmbeddingVector corpus_redundancy(std::span<const Sentence> corpus,
                                  const Encoder& encoder);

// v - lambda1 * v_star - lambda2 * v_hat. Throws DimensionMismatch.
EmbeddingVector refine(const EmbeddingVector& v, const EmbeddingVector& v_star,
                       const EmbeddingVector& v_hat, const RefinementConfig& cfg);
EmbeddingVector refine(const EmbeddingVector& v, const EmbeddingVector& v_star,
                       const EmbeddingVector& v_hat, double lambda1, double lambda2);

// Encodes every sentence and its masked variant once (two encoder batches).
// When redundancy_corpus is non-empty the corpus-level term is taken from it
// instead of from corpus.
RedundancyBundle build_redundancy(std::span<const Sentence> corpus,
                                  const TfIdfModel& model,
                                  const RefinementConfig& cfg,
                                  const Encoder& encoder,
                                  std::span<const Sentence> redundancy_corpus = {});

// Refined rows in bundle order; no encoder calls.
EmbeddingMatrix apply_refinement(const RedundancyBundle& bundle, double lambda1,
                                 double lambda2);

RefinedCorpus refine_corpus(std::span<const Sentence> corpus,
                            const TfIdfModel& model, const RefinementConfig& cfg,
                            const Encoder& encoder);

}  // namespace repal

#endif  // REPAL_REFINE_HPP_
