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

// Semantic-similarity evaluation: dataset loading, Spearman correlation,
// pair scoring with and without refinement, and lambda grid search.

#ifndef REPAL_EVAL_HPP_
#define REPAL_EVAL_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repal/encoder.hpp"
#include "repal/keyword.hpp"
#include "repal/refine.hpp"
#include "repal/vecmath.hpp"

namespace repal {

enum class Split { kTrain, kDev, kTest };
enum class Ablation { kNone, kNoSen, kNoCor };

std::string_view split_name(Split split);
std::string_view ablation_name(Ablation ablation);  // "none", "no-sen", "no-cor"
// Accepts "none", "no-sen"/"no_sen", "no-cor"/"no_cor".
Ablation parse_ablation(std::string_view text);

struct SimilarityPair {
  Sentence a;
  Sentence b;
  double gold = 0.0;
};

struct SimilarityDataset {
  std::string name;
  Split split = Split::kTest;
  std::vector<SimilarityPair> pairs;

  // a_0, b_0, a_1, b_1, ...
  std::vector<Sentence> pooled_sentences() const;
  std::vector<double> gold_scores() const;
};

struct LoadOptions {
  std::string name;  // defaults to the file stem
  Split split = Split::kTest;
  bool pretokenized = false;
};

// Tab-separated sentence_a, sentence_b, gold. '#' lines and blank lines are
// skipped. Throws ParseError(line) and TooFewPairs.
SimilarityDataset load_dataset(const std::filesystem::path& path,
                               const LoadOptions& options = {});
SimilarityDataset parse_dataset(std::string_view contents,
                                const LoadOptions& options = {});

// Mean ranks for ties, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws LengthMismatch (also for
// fewer than two values) and DegenerateRanking (a constant input).
double spearman(std::span<const double> x, std::span<const double> y);

struct EvalReport {
  std::string dataset;
  double spearman_raw = 0.0;
  double spearman_refined = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Ablation ablation = Ablation::kNone;
};

// The lambdas actually applied once an ablation zeroes one of them.
RefinementConfig effective_config(RefinementConfig cfg, Ablation ablation);

// Encodes and masks a dataset once, then scores it for any lambda pair.
class PairScorer {
 public:
  PairScorer(const SimilarityDataset& dataset, const TfIdfModel& model,
             const RefinementConfig& cfg, const Encoder& encoder,
             std::span<const Sentence> redundancy_corpus = {});

  const RedundancyBundle& bundle() const { return bundle_; }
  const std::vector<double>& gold() const { return gold_; }

  EmbeddingMatrix refined(double lambda1, double lambda2) const;
  // Cosine of each refined pair.
  std::vector<double> predictions(double lambda1, double lambda2) const;
  double spearman_at(double lambda1, double lambda2) const;

 private:
  RedundancyBundle bundle_;
  std::vector<double> gold_;
};

// Both sides of every pair are pooled for refinement; prediction is the
// cosine of the refined pair. spearman_raw is the lambda = (0, 0) score.
EvalReport score_pairs(const SimilarityDataset& dataset,
                       const RefinementConfig& cfg, const Encoder& encoder,
                       const TfIdfModel& model, Ablation ablation = Ablation::kNone);

struct GridSpec {
  std::vector<double> lambda1_values;
  std::vector<double> lambda2_values;

  // Non-empty, ascending, all >= 0. Throws BadGridSpec.
  void validate() const;
};

// "start:stop:step" (inclusive, points start + k * step) or "a,b,c".
std::vector<double> parse_grid(std::string_view spec);

struct GridCell {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double spearman = 0.0;
};

struct GridResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double best_spearman = 0.0;
  double raw_spearman = 0.0;
  std::vector<GridCell> surface;  // lambda2-major, both ascending
};

// Exhaustive search reusing one redundancy bundle. The argmax prefers the
// smaller lambda2, then the smaller lambda1, among equal scores.
GridResult grid_search(const SimilarityDataset& dev, const GridSpec& grid,
                       const Encoder& encoder, const TfIdfModel& model,
                       const RefinementConfig& base = {});
GridResult grid_search(const PairScorer& scorer, const GridSpec& grid);

}  // namespace repal

#endif  // REPAL_EVAL_HPP_
