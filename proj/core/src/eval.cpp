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

#include "repal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "repal/error.hpp"

namespace repal {

namespace {

bool parse_double(std::string_view text, double& out) {
  // strtod needs a terminated buffer; from_chars for double is missing on
  // older standard libraries.
  const std::string buffer(text);
  if (buffer.empty()) return false;
  char* end = nullptr;
  out = std::strtod(buffer.c_str(), &end);
  return end == buffer.c_str() + buffer.size() && std::isfinite(out);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "test";
}

std::string_view ablation_name(Ablation ablation) {
  switch (ablation) {
    case Ablation::kNone: return "none";
    case Ablation::kNoSen: return "no-sen";
    case Ablation::kNoCor: return "no-cor";
  }
  return "none";
}

Ablation parse_ablation(std::string_view text) {
  if (text == "none") return Ablation::kNone;
  if (text == "no-sen" || text == "no_sen") return Ablation::kNoSen;
  if (text == "no-cor" || text == "no_cor") return Ablation::kNoCor;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown ablation '" + std::string(text) + "'");
}

std::vector<Sentence> SimilarityDataset::pooled_sentences() const {
  std::vector<Sentence> out;
  out.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    out.push_back(p.a);
    out.push_back(p.b);
  }
  return out;
}

std::vector<double> SimilarityDataset::gold_scores() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.gold);
  return out;
}

SimilarityDataset parse_dataset(std::string_view contents,
                                const LoadOptions& options) {
  SimilarityDataset ds;
  ds.name = options.name;
  ds.split = options.split;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto newline = contents.find('\n', pos);
    if (newline == std::string_view::npos) newline = contents.size();
    std::string_view line = contents.substr(pos, newline - pos);
    pos = newline + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;

    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated columns, found " +
                                    std::to_string(fields.size()));
    }
    double gold = 0.0;
    if (!parse_double(trim(fields[2]), gold)) {
      throw ParseError(line_no, "gold score '" + std::string(fields[2]) +
                                    "' is not a finite decimal");
    }
    SimilarityPair pair;
    try {
      pair.a = options.pretokenized ? from_pretokenized(fields[0]) : tokenize(fields[0]);
      pair.b = options.pretokenized ? from_pretokenized(fields[1]) : tokenize(fields[1]);
    } catch (const Error& e) {
      throw ParseError(line_no, std::string("sentence has no tokens (") + e.what() + ")");
    }
    pair.gold = gold;
    ds.pairs.push_back(std::move(pair));
  }
  if (ds.pairs.size() < 2) {
    throw Error(ErrorCode::kTooFewPairs,
                "dataset has " + std::to_string(ds.pairs.size()) +
                    " pairs; Spearman needs at least 2");
  }
  return ds;
}

SimilarityDataset load_dataset(const std::filesystem::path& path,
                               const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open dataset " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  LoadOptions resolved = options;
  if (resolved.name.empty()) resolved.name = path.stem().string();
  return parse_dataset(buffer.str(), resolved);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 share the mean of ranks i+1..j.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "lengths " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()) + " differ");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kLengthMismatch, "Spearman needs at least two values");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateRanking, "constant input has no ranking");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

RefinementConfig effective_config(RefinementConfig cfg, Ablation ablation) {
  if (ablation == Ablation::kNoSen) cfg.lambda1 = 0.0;
  if (ablation == Ablation::kNoCor) cfg.lambda2 = 0.0;
  return cfg;
}

PairScorer::PairScorer(const SimilarityDataset& dataset, const TfIdfModel& model,
                       const RefinementConfig& cfg, const Encoder& encoder,
                       std::span<const Sentence> redundancy_corpus)
    : bundle_(build_redundancy(dataset.pooled_sentences(), model, cfg, encoder,
                               redundancy_corpus)),
      gold_(dataset.gold_scores()) {}

EmbeddingMatrix PairScorer::refined(double lambda1, double lambda2) const {
  return apply_refinement(bundle_, lambda1, lambda2);
}

std::vector<double> PairScorer::predictions(double lambda1, double lambda2) const {
  const EmbeddingMatrix m = refined(lambda1, lambda2);
  std::vector<double> out;
  out.reserve(gold_.size());
  for (std::size_t i = 0; i < gold_.size(); ++i) {
    out.push_back(cosine(m.row(2 * i), m.row(2 * i + 1)));
  }
  return out;
}

double PairScorer::spearman_at(double lambda1, double lambda2) const {
  const auto predicted = predictions(lambda1, lambda2);
  return spearman(predicted, gold_);
}

EvalReport score_pairs(const SimilarityDataset& dataset,
                       const RefinementConfig& cfg, const Encoder& encoder,
                       const TfIdfModel& model, Ablation ablation) {
  const RefinementConfig effective = effective_config(cfg, ablation);
  effective.validate();
  const PairScorer scorer(dataset, model, effective, encoder);
  EvalReport report;
  report.dataset = dataset.name;
  report.spearman_raw = scorer.spearman_at(0.0, 0.0);
  report.spearman_refined = scorer.spearman_at(effective.lambda1, effective.lambda2);
  report.lambda1 = effective.lambda1;
  report.lambda2 = effective.lambda2;
  report.ablation = ablation;
  return report;
}

void GridSpec::validate() const {
  for (const auto* values : {&lambda1_values, &lambda2_values}) {
    if (values->empty()) throw Error(ErrorCode::kBadGridSpec, "empty lambda grid");
    for (std::size_t i = 0; i < values->size(); ++i) {
      const double v = (*values)[i];
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::kBadGridSpec, "grid values must be finite and >= 0");
      }
      if (i > 0 && !(v > (*values)[i - 1])) {
        throw Error(ErrorCode::kBadGridSpec, "grid values must be strictly ascending");
      }
    }
  }
}

std::vector<double> parse_grid(std::string_view spec) {
  const std::string text(trim(spec));
  if (text.empty()) throw Error(ErrorCode::kBadGridSpec, "empty grid spec");

  if (text.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    while (true) {
      const auto colon = rest.find(':');
      parts.push_back(trim(rest.substr(0, colon)));
      if (colon == std::string_view::npos) break;
      rest = rest.substr(colon + 1);
    }
    double start = 0.0, stop = 0.0, step = 0.0;
    if (parts.size() != 3 || !parse_double(parts[0], start) ||
        !parse_double(parts[1], stop) || !parse_double(parts[2], step)) {
      throw Error(ErrorCode::kBadGridSpec,
                  "expected start:stop:step, got '" + text + "'");
    }
    if (!(step > 0.0) || start > stop) {
      throw Error(ErrorCode::kBadGridSpec,
                  "'" + text + "' needs step > 0 and start <= stop");
    }
    constexpr double kSlack = 1e-9;
    const double span = (stop - start) / step;
    if (span > 1e7) throw Error(ErrorCode::kBadGridSpec, "grid is too large");
    std::vector<double> values;
    for (std::size_t k = 0;; ++k) {
      // Snapped to 12 significant digits so 0:1:0.1 yields 0.3, not 0.30000000000000004.
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.12g", start + static_cast<double>(k) * step);
      const double v = std::strtod(buffer, nullptr);
      if (v > stop + kSlack) break;
      values.push_back(std::abs(v - stop) <= kSlack ? stop : v);
    }
    return values;
  }

  std::vector<double> values;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    double v = 0.0;
    if (!parse_double(item, v)) {
      throw Error(ErrorCode::kBadGridSpec,
                  "bad grid value '" + std::string(item) + "' in '" + text + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return values;
}

GridResult grid_search(const PairScorer& scorer, const GridSpec& grid) {
  grid.validate();
  GridResult result;
  result.raw_spearman = scorer.spearman_at(0.0, 0.0);
  bool have_best = false;
  for (double l2 : grid.lambda2_values) {
    for (double l1 : grid.lambda1_values) {
      const double score = scorer.spearman_at(l1, l2);
      result.surface.push_back(GridCell{l1, l2, score});
      // Strict improvement only: earlier cells (smaller lambda2, then smaller
      // lambda1) win ties.
      if (!have_best || score > result.best_spearman) {
        result.lambda1 = l1;
        result.lambda2 = l2;
        result.best_spearman = score;
        have_best = true;
      }
    }
  }
  return result;
}

GridResult grid_search(const SimilarityDataset& dev, const GridSpec& grid,
                       const Encoder& encoder, const TfIdfModel& model,
                       const RefinementConfig& base) {
  grid.validate();
  const PairScorer scorer(dev, model, base, encoder);
  return grid_search(scorer, grid);
}

}  // namespace repal
