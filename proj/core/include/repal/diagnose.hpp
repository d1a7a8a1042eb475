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

// Diagnostics for refined embeddings:
//
//  * word importance H(x, x'; w) = Sim(G(x), G(x')) - Sim(G(x \ w), G(x')),
//    where G is the refinement (the identity when both lambdas are zero) and
//    x \ w deletes one token of the first sentence;
//  * the redundancy overlap ratio r = |S & T| / |T| of a pair, with T the
//    top-k positions by H and S the non-keyword positions, and its average;
//  * lambda sweeps recording Spearman next to the spectrum of the refined
//    embedding matrix;
//  * the whitening baseline.

#ifndef REPAL_DIAGNOSE_HPP_
#define REPAL_DIAGNOSE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repal/encoder.hpp"
#include "repal/eval.hpp"
#include "repal/keyword.hpp"
#include "repal/refine.hpp"
#include "repal/vecmath.hpp"

namespace repal {

inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::uint64_t kDefaultSampleSeed = 42;

// What G needs: lambdas and masking settings, the keyword model for the
// masked variants, and the corpus redundancy when lambda2 != 0.
struct Refinement {
  const TfIdfModel* model = nullptr;
  RefinementConfig cfg;
  std::optional<EmbeddingVector> corpus_redundancy;
};

// H for every token position of pair.first. Throws SentenceTooShort when the
// first sentence has a single token.
std::vector<double> importance_profile(const Sentence& first, const Sentence& second,
                                       const Encoder& encoder,
                                       const Refinement* refinement = nullptr);

double word_importance(const Sentence& first, const Sentence& second,
                       std::size_t position, const Encoder& encoder,
                       const Refinement* refinement = nullptr);

struct ImportanceRecord {
  std::string word;
  double h_raw = 0.0;
  double h_refined = 0.0;
  double delta = 0.0;  // h_refined - h_raw
  std::size_t occurrences = 0;
};

struct ImportanceTable {
  std::vector<ImportanceRecord> records;  // delta ascending, then word
  std::size_t skipped_pairs = 0;          // first sentence too short
};

// Mean H per lowercased word over all occurrences in first sentences.
ImportanceTable importance_table(std::span<const SimilarityPair> pairs,
                                 const Encoder& encoder,
                                 const Refinement& refinement);

// "word\th_raw\th_refined\tdelta" header plus one row per record.
std::string importance_tsv(const ImportanceTable& table);

// Positions of T: the top_k positions by H, ties to the earlier position.
std::vector<std::size_t> top_importance_positions(std::span<const double> h,
                                                  std::size_t top_k);

// Throws SentenceTooShort unless the first sentence has > top_k tokens.
// refinement->cfg.mask_ratio also decides the keyword set behind S.
double overlap_ratio(const Sentence& first, const Sentence& second,
                     const TfIdfModel& model, const Refinement& refinement,
                     const Encoder& encoder, std::size_t top_k = kDefaultTopK);

struct PairOverlap {
  std::size_t pair_id = 0;
  double ratio = 0.0;
};

struct OverlapReport {
  std::vector<PairOverlap> per_pair;
  double r_hat = 0.0;
  std::size_t skipped = 0;  // ineligible (too short) pairs
};

struct OverlapOptions {
  std::size_t top_k = kDefaultTopK;
  std::optional<std::size_t> sample_size;  // sample without replacement
  std::uint64_t seed = kDefaultSampleSeed;
};

// Throws NoEligiblePairs when every selected pair is too short.
OverlapReport average_overlap(std::span<const SimilarityPair> pairs,
                              const TfIdfModel& model, const Refinement& refinement,
                              const Encoder& encoder,
                              const OverlapOptions& options = {});

enum class SweepAxis { kLambda1, kLambda2 };

struct SweepRecord {
  double lambda = 0.0;
  double spearman = 0.0;
  double lambda_max = 0.0;
  double trace_bound = 0.0;
};

// One record per value; the other lambda is held at fixed_other. Uses the
// scorer's bundle so nothing is re-encoded.
std::vector<SweepRecord> lambda_sweep(const PairScorer& scorer, SweepAxis axis,
                                      std::span<const double> values,
                                      double fixed_other);
std::vector<SweepRecord> lambda_sweep(const SimilarityDataset& dataset, SweepAxis axis,
                                      std::span<const double> values,
                                      double fixed_other, const Encoder& encoder,
                                      const TfIdfModel& model,
                                      const RefinementConfig& base = {});

// "lambda,spearman,lambda_max,trace_bound" header, 6 significant digits.
std::string sweep_csv(std::span<const SweepRecord> records);

// Raw encodings whitened, then scored by cosine. spearman_refined holds the
// whitened score.
EvalReport whitening_baseline(const SimilarityDataset& dataset, const Encoder& encoder,
                              double eps = 1e-8);

}  // namespace repal

#endif  // REPAL_DIAGNOSE_HPP_
