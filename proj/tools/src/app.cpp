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

#include "repal/cli/app.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repal/diagnose.hpp"
#include "repal/encoder.hpp"
#include "repal/error.hpp"
#include "repal/eval.hpp"
#include "repal/keyword.hpp"
#include "repal/refine.hpp"
#include "repal/synthetic.hpp"

namespace repal::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kTimeoutEnv = "REPAL_HTTP_TIMEOUT_MS";

struct RunConfig {
  std::string encoder = "mock";
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::string params;
  double mask_ratio = kDefaultMaskRatio;
  std::string mask_token = std::string(kDefaultMaskToken);
  std::string stopwords;
  std::string tfidf_corpus;
  std::string redundancy_corpus;
  bool pretokenized = false;
  std::uint64_t seed = kDefaultSampleSeed;
  std::string out;
};

// ---------------------------------------------------------------------------
// Files and formatting

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

// --out when set, stdout otherwise.
void emit(const RunConfig& cfg, std::ostream& out, std::string_view text) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_file(cfg.out, text);
  }
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::string format_g6(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

double percent2(double v) { return std::round(v * 10000.0) / 100.0; }

// "NAME: 59.04 -> 66.35 (+7.31)"
std::string arrow_line(const std::string& name, double before, double after) {
  const double a = percent2(before);
  const double b = percent2(after);
  double delta = b - a;
  if (std::abs(delta) < 0.005) delta = 0.0;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.2f -> %.2f (%+.2f)", a, b, delta);
  return name + ": " + buffer;
}

// ---------------------------------------------------------------------------
// Inputs

Sentence parse_sentence(const std::string& line, const RunConfig& cfg) {
  if (cfg.pretokenized) return from_pretokenized(line);
  TokenizeOptions options;
  options.special_tokens.push_back(cfg.mask_token);
  return tokenize(line, options);
}

// One sentence per line. With skip_blank, blank lines are ignored; otherwise
// they are parse errors so line order maps one to one.
std::vector<Sentence> load_sentences(const std::string& path, const RunConfig& cfg,
                                     bool skip_blank) {
  const auto lines = split_lines(read_file(path));
  std::vector<Sentence> sentences;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (skip_blank && lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    try {
      sentences.push_back(parse_sentence(lines[i], cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyInput) throw;
      throw ParseError(i + 1, "empty sentence in " + path);
    }
  }
  return sentences;
}

SimilarityDataset open_dataset(const std::string& path, Split split,
                               const RunConfig& cfg) {
  LoadOptions options;
  options.split = split;
  options.pretokenized = cfg.pretokenized;
  return load_dataset(path, options);
}

TfIdfModel open_model(std::span<const Sentence> fallback, const RunConfig& cfg) {
  StopwordSet stopwords =
      cfg.stopwords.empty() ? default_stopwords() : load_stopwords(cfg.stopwords);
  if (!cfg.tfidf_corpus.empty()) {
    const auto corpus = load_sentences(cfg.tfidf_corpus, cfg, true);
    if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty TF-IDF corpus");
    return build_tfidf(corpus, std::move(stopwords));
  }
  return build_tfidf(fallback, std::move(stopwords));
}

std::vector<Sentence> open_redundancy_corpus(const RunConfig& cfg) {
  if (cfg.redundancy_corpus.empty()) return {};
  auto corpus = load_sentences(cfg.redundancy_corpus, cfg, true);
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "empty redundancy corpus");
  return corpus;
}

std::optional<std::chrono::milliseconds> timeout_from_env() {
  const char* value = std::getenv(kTimeoutEnv);
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long long ms = std::strtoll(value, &end, 10);
  if (errno != 0 || *end != '\0' || ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(kTimeoutEnv) + " must be a positive integer");
  }
  return std::chrono::milliseconds(ms);
}

std::shared_ptr<const Encoder> open_encoder(const RunConfig& cfg) {
  return std::make_shared<CachedEncoder>(
      make_encoder(cfg.encoder, cfg.mask_token, timeout_from_env()));
}

// Fills the lambdas from a tune report when --params is given.
void resolve_lambdas(RunConfig& cfg) {
  if (cfg.params.empty()) return;
  json report;
  try {
    report = json::parse(read_file(cfg.params));
    cfg.lambda1 = report.at("lambda1").get<double>();
    cfg.lambda2 = report.at("lambda2").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad params file " + cfg.params + ": " + e.what());
  }
}

RefinementConfig refinement_config(const RunConfig& cfg) {
  RefinementConfig rc;
  rc.lambda1 = cfg.lambda1;
  rc.lambda2 = cfg.lambda2;
  rc.mask_ratio = cfg.mask_ratio;
  rc.mask_token = cfg.mask_token;
  rc.validate();
  return rc;
}

json report_json(const std::string& dataset, double lambda1, double lambda2,
                 double raw, double refined, Ablation ablation, const RunConfig& cfg) {
  json j;
  j["dataset"] = dataset;
  j["lambda1"] = lambda1;
  j["lambda2"] = lambda2;
  j["spearman_raw"] = raw;
  j["spearman_refined"] = refined;
  j["ablation"] = std::string(ablation_name(ablation));
  j["encoder"] = cfg.encoder;
  j["seed"] = cfg.seed;
  return j;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_mask(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  const auto sentences = load_sentences(input, cfg, false);
  if (sentences.empty()) throw Error(ErrorCode::kEmptyInput, "empty input");
  const TfIdfModel model = open_model(sentences, cfg);
  const RefinementConfig rc = refinement_config(cfg);
  std::string text;
  for (const auto& s : sentences) text += redundancy_mask(s, model, rc).raw + '\n';
  emit(cfg, out, text);
}

void cmd_encode_cache(const RunConfig& cfg, const std::vector<std::string>& datasets,
                      const std::vector<std::string>& inputs, bool deletions,
                      std::ostream& out) {
  const RefinementConfig rc = refinement_config(cfg);
  std::vector<std::string> texts;
  std::set<std::string> seen;
  auto add = [&](const Sentence& s, const TfIdfModel& model) {
    for (std::string text : {s.raw, redundancy_mask(s, model, rc).raw}) {
      if (seen.insert(text).second) texts.push_back(std::move(text));
    }
  };

  for (const auto& path : datasets) {
    const SimilarityDataset ds = open_dataset(path, Split::kTest, cfg);
    const auto pooled = ds.pooled_sentences();
    const TfIdfModel model = open_model(pooled, cfg);
    for (const auto& s : pooled) add(s, model);
    if (!deletions) continue;
    for (const auto& pair : ds.pairs) {
      if (pair.a.size() < 2) continue;
      for (std::size_t i = 0; i < pair.a.size(); ++i) add(without_token(pair.a, i), model);
    }
  }
  for (const auto& path : inputs) {
    const auto sentences = load_sentences(path, cfg, true);
    if (sentences.empty()) continue;
    const TfIdfModel model = open_model(sentences, cfg);
    for (const auto& s : sentences) add(s, model);
  }
  if (texts.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to encode");

  const auto encoder = open_encoder(cfg);
  const EmbeddingCache cache = build_cache(*encoder, texts);
  cache.save(cfg.out);
  out << "cached " << cache.size() << " texts, dim " << cache.dim() << " -> " << cfg.out
      << '\n';
}

void cmd_tune(const RunConfig& cfg, const std::string& dev_path, const std::string& grid1,
              const std::string& grid2, std::ostream& out) {
  const SimilarityDataset dev = open_dataset(dev_path, Split::kDev, cfg);
  GridSpec grid{parse_grid(grid1), parse_grid(grid2)};
  grid.validate();
  const auto encoder = open_encoder(cfg);
  const TfIdfModel model = open_model(dev.pooled_sentences(), cfg);
  const auto redundancy = open_redundancy_corpus(cfg);
  RunConfig base = cfg;
  base.lambda1 = base.lambda2 = 0.0;
  const PairScorer scorer(dev, model, refinement_config(base), *encoder, redundancy);
  const GridResult result = grid_search(scorer, grid);

  out << dev.name << ": best lambda1=" << format_g6(result.lambda1)
      << " lambda2=" << format_g6(result.lambda2) << ' '
      << arrow_line("spearman", result.raw_spearman, result.best_spearman) << '\n';

  if (cfg.out.empty()) return;
  json j = report_json(dev.name, result.lambda1, result.lambda2, result.raw_spearman,
                       result.best_spearman, Ablation::kNone, cfg);
  j["grid"] = {{"lambda1", grid.lambda1_values}, {"lambda2", grid.lambda2_values}};
  json surface = json::array();
  for (const auto& cell : result.surface) {
    surface.push_back(
        {{"lambda1", cell.lambda1}, {"lambda2", cell.lambda2}, {"spearman", cell.spearman}});
  }
  j["surface"] = std::move(surface);
  write_file(cfg.out, j.dump(2) + '\n');
}

void cmd_eval(const RunConfig& cfg, const std::string& test_path,
              const std::string& ablation_text, std::ostream& out) {
  const SimilarityDataset ds = open_dataset(test_path, Split::kTest, cfg);
  const Ablation ablation = parse_ablation(ablation_text);
  const RefinementConfig rc = effective_config(refinement_config(cfg), ablation);
  const auto encoder = open_encoder(cfg);
  const TfIdfModel model = open_model(ds.pooled_sentences(), cfg);
  const auto redundancy = open_redundancy_corpus(cfg);
  const PairScorer scorer(ds, model, rc, *encoder, redundancy);
  const double raw = scorer.spearman_at(0.0, 0.0);
  const double refined = scorer.spearman_at(rc.lambda1, rc.lambda2);

  out << arrow_line(ds.name, raw, refined) << '\n';
  if (!cfg.out.empty()) {
    write_file(cfg.out,
               report_json(ds.name, rc.lambda1, rc.lambda2, raw, refined, ablation, cfg)
                       .dump(2) +
                   '\n');
  }
}

// G for the importance and overlap diagnostics.
Refinement make_refinement(const RunConfig& cfg, const TfIdfModel& model,
                           std::span<const Sentence> pooled, const Encoder& encoder) {
  Refinement g{&model, refinement_config(cfg), std::nullopt};
  if (g.cfg.lambda2 != 0.0) {
    const auto redundancy = open_redundancy_corpus(cfg);
    g.corpus_redundancy =
        corpus_redundancy(redundancy.empty() ? pooled : std::span<const Sentence>(redundancy),
                          encoder);
  }
  return g;
}

void cmd_importance(const RunConfig& cfg, const std::string& path, std::ostream& out,
                    std::ostream& err) {
  const SimilarityDataset ds = open_dataset(path, Split::kTest, cfg);
  const auto pooled = ds.pooled_sentences();
  const TfIdfModel model = open_model(pooled, cfg);
  const auto encoder = open_encoder(cfg);
  const Refinement g = make_refinement(cfg, model, pooled, *encoder);

  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    if (ds.pairs[i].a.size() < 2) {
      err << "warning: pair " << i << " skipped: first sentence has a single token\n";
    }
  }
  const ImportanceTable table = importance_table(ds.pairs, *encoder, g);
  std::string text = importance_tsv(table);
  if (table.skipped_pairs > 0) {
    text += "# skipped " + std::to_string(table.skipped_pairs) +
            " pair(s) with a single-token first sentence\n";
  }
  emit(cfg, out, text);
}

void cmd_overlap(const RunConfig& cfg, const std::string& path, std::size_t top_k,
                 std::optional<std::size_t> sample, std::ostream& out) {
  const SimilarityDataset ds = open_dataset(path, Split::kTest, cfg);
  const auto pooled = ds.pooled_sentences();
  const TfIdfModel model = open_model(pooled, cfg);
  const auto encoder = open_encoder(cfg);

  RunConfig identity_cfg = cfg;
  identity_cfg.lambda1 = identity_cfg.lambda2 = 0.0;
  const Refinement identity{&model, refinement_config(identity_cfg), std::nullopt};
  const Refinement g = make_refinement(cfg, model, pooled, *encoder);

  OverlapOptions options;
  options.top_k = top_k;
  options.sample_size = sample;
  options.seed = cfg.seed;
  const OverlapReport before = average_overlap(ds.pairs, model, identity, *encoder, options);
  const OverlapReport after = average_overlap(ds.pairs, model, g, *encoder, options);

  std::string text = "pair\tr_raw\tr_refined\n";
  for (std::size_t i = 0; i < before.per_pair.size(); ++i) {
    text += std::to_string(before.per_pair[i].pair_id) + '\t' +
            format_g6(before.per_pair[i].ratio) + '\t' +
            format_g6(after.per_pair[i].ratio) + '\n';
  }
  text += "# r_hat raw=" + format_g6(before.r_hat) + " refined=" + format_g6(after.r_hat) +
          " pairs=" + std::to_string(before.per_pair.size()) +
          " skipped=" + std::to_string(before.skipped) + '\n';
  emit(cfg, out, text);
}

void cmd_sweep(const RunConfig& cfg, const std::string& path, const std::string& axis_text,
               const std::string& values_text, std::ostream& out) {
  const SimilarityDataset ds = open_dataset(path, Split::kTest, cfg);
  const SweepAxis axis = axis_text == "lambda1" ? SweepAxis::kLambda1 : SweepAxis::kLambda2;
  const auto values = parse_grid(values_text);
  const auto encoder = open_encoder(cfg);
  const TfIdfModel model = open_model(ds.pooled_sentences(), cfg);
  const auto redundancy = open_redundancy_corpus(cfg);
  const PairScorer scorer(ds, model, refinement_config(cfg), *encoder, redundancy);
  const double fixed = axis == SweepAxis::kLambda2 ? cfg.lambda1 : cfg.lambda2;
  emit(cfg, out, sweep_csv(lambda_sweep(scorer, axis, values, fixed)));
}

void cmd_whitening(const RunConfig& cfg, const std::string& path, double eps,
                   std::ostream& out) {
  const SimilarityDataset ds = open_dataset(path, Split::kTest, cfg);
  const auto encoder = open_encoder(cfg);
  const EvalReport report = whitening_baseline(ds, *encoder, eps);
  out << arrow_line(ds.name, report.spearman_raw, report.spearman_refined) << '\n';
  if (cfg.out.empty()) return;
  json j = report_json(ds.name, 0.0, 0.0, report.spearman_raw, report.spearman_refined,
                       Ablation::kNone, cfg);
  j["method"] = "whitening";
  j["eps"] = eps;
  write_file(cfg.out, j.dump(2) + '\n');
}

void cmd_gen_synthetic(const RunConfig& cfg, std::size_t n_pairs,
                       const std::string& dev_out, const std::string& test_out,
                       std::size_t n_dev, std::ostream& out) {
  if (dev_out.empty() != test_out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--dev-out and --test-out go together");
  }
  const std::string tsv = generate_synthetic_tsv(n_pairs, cfg.seed);
  if (!dev_out.empty()) {
    if (n_dev < 2 || n_dev + 2 > n_pairs) {
      throw Error(ErrorCode::kInvalidArgument, "dev split must leave >= 2 pairs per side");
    }
    const auto lines = split_lines(tsv);
    std::string dev, test;
    for (std::size_t i = 0; i < lines.size(); ++i) (i < n_dev ? dev : test) += lines[i] + '\n';
    write_file(dev_out, dev);
    write_file(test_out, test);
  }
  if (cfg.out.empty() && dev_out.empty()) {
    out << tsv;
    return;
  }
  if (!cfg.out.empty()) write_file(cfg.out, tsv);
  out << "wrote " << n_pairs << " pairs (seed " << cfg.seed << ")\n";
}

// ---------------------------------------------------------------------------
// Flags

void add_encoder_flag(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--encoder", cfg.encoder,
                  "mock[:dim[:salt]], file:<path> or http:<url>")
      ->capture_default_str();
}

void add_mask_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--mask-ratio", cfg.mask_ratio, "share of tokens masked as keywords")
      ->capture_default_str();
  sub->add_option("--mask-token", cfg.mask_token, "mask literal")->capture_default_str();
  sub->add_option("--stopwords", cfg.stopwords, "stopword list, one per line")
      ->check(CLI::ExistingFile);
  sub->add_option("--tfidf-corpus", cfg.tfidf_corpus,
                  "sentences for document frequencies (default: the input)")
      ->check(CLI::ExistingFile);
  sub->add_flag("--pretokenized", cfg.pretokenized, "split on whitespace only");
}

void add_lambda_flags(CLI::App* sub, RunConfig& cfg) {
  auto* l1 = sub->add_option("--lambda1", cfg.lambda1, "sentence-level weight")
                 ->capture_default_str();
  auto* l2 = sub->add_option("--lambda2", cfg.lambda2, "corpus-level weight")
                 ->capture_default_str();
  sub->add_option("--params", cfg.params, "tune JSON supplying lambda1 and lambda2")
      ->check(CLI::ExistingFile)
      ->excludes(l1)
      ->excludes(l2);
}

void add_redundancy_flag(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--redundancy-corpus", cfg.redundancy_corpus,
                  "sentences whose mean encoding is removed (default: the dataset)")
      ->check(CLI::ExistingFile);
}

void add_seed_flag(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "seed for every random choice")->capture_default_str();
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return is_encoder_error(err->code()) ? kExitEncoder : kExitInput;
  }
  return kExitInput;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Training-free refinement of sentence embeddings.", "repal"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::string input;
  auto* mask = app.add_subcommand("mask", "mask the top TF-IDF keywords of each line");
  mask->add_option("--input,input", input, "one sentence per line")
      ->required()
      ->check(CLI::ExistingFile);
  add_mask_flags(mask, cfg);
  mask->add_option("--out", cfg.out, "output file (default: stdout)");

  std::vector<std::string> cache_datasets, cache_inputs;
  bool deletions = false;
  auto* cache = app.add_subcommand(
      "encode-cache", "encode dataset sentences and their masked variants into a cache file");
  cache->add_option("--dataset", cache_datasets, "similarity TSV (repeatable)")
      ->check(CLI::ExistingFile);
  cache->add_option("--input", cache_inputs, "sentence file (repeatable)")
      ->check(CLI::ExistingFile);
  cache->add_flag("--deletions", deletions,
                  "also cache single-token deletions of first sentences");
  add_encoder_flag(cache, cfg);
  add_mask_flags(cache, cfg);
  cache->add_option("--out", cfg.out, "cache file")->required();

  std::string dev_path, grid1 = "0:1:0.1", grid2 = "0:2:0.1";
  auto* tune = app.add_subcommand("tune", "grid-search lambda1 and lambda2 on a dev set");
  tune->add_option("--dev,--dataset", dev_path, "dev TSV")
      ->required()
      ->check(CLI::ExistingFile);
  tune->add_option("--grid1", grid1, "lambda1 grid, start:stop:step or a,b,c")
      ->capture_default_str();
  tune->add_option("--grid2", grid2, "lambda2 grid")->capture_default_str();
  add_encoder_flag(tune, cfg);
  add_mask_flags(tune, cfg);
  add_redundancy_flag(tune, cfg);
  add_seed_flag(tune, cfg);
  tune->add_option("--out", cfg.out, "JSON report with the full grid");

  std::string test_path, ablation = "none";
  auto* eval = app.add_subcommand("eval", "score a dataset before and after refinement");
  eval->add_option("--test,--dataset,dataset", test_path, "test TSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--ablation", ablation, "drop one refinement term")
      ->check(CLI::IsMember({"none", "no-sen", "no-cor"}))
      ->capture_default_str();
  add_encoder_flag(eval, cfg);
  add_lambda_flags(eval, cfg);
  add_mask_flags(eval, cfg);
  add_redundancy_flag(eval, cfg);
  add_seed_flag(eval, cfg);
  eval->add_option("--out", cfg.out, "JSON report");

  auto* diagnose = app.add_subcommand("diagnose", "importance, overlap, sweep, whitening");
  diagnose->require_subcommand(1);
  std::string diag_path;
  auto add_diag = [&](const char* name, const char* help) {
    auto* sub = diagnose->add_subcommand(name, help);
    sub->add_option("--dataset", diag_path, "similarity TSV")
        ->required()
        ->check(CLI::ExistingFile);
    add_encoder_flag(sub, cfg);
    add_seed_flag(sub, cfg);
    return sub;
  };

  auto* importance = add_diag("importance", "per-word importance before and after refinement");
  add_lambda_flags(importance, cfg);
  add_mask_flags(importance, cfg);
  add_redundancy_flag(importance, cfg);
  importance->add_option("--out", cfg.out, "TSV output (default: stdout)");

  std::size_t top_k = kDefaultTopK;
  std::optional<std::size_t> sample;
  auto* overlap = add_diag("overlap", "share of trivial words among the most important");
  overlap->add_option("--top-k", top_k, "size of the importance set")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  overlap->add_option("--sample", sample, "pairs sampled without replacement");
  add_lambda_flags(overlap, cfg);
  add_mask_flags(overlap, cfg);
  add_redundancy_flag(overlap, cfg);
  overlap->add_option("--out", cfg.out, "TSV output (default: stdout)");

  std::string axis = "lambda2", values = "0:2:0.1";
  auto* sweep = add_diag("sweep", "Spearman and spectrum along one lambda");
  sweep->add_option("--axis", axis, "swept lambda")
      ->check(CLI::IsMember({"lambda1", "lambda2"}))
      ->capture_default_str();
  sweep->add_option("--values", values, "swept values")->capture_default_str();
  add_lambda_flags(sweep, cfg);
  add_mask_flags(sweep, cfg);
  add_redundancy_flag(sweep, cfg);
  sweep->add_option("--out", cfg.out, "CSV output (default: stdout)");

  double eps = 1e-8;
  auto* whitening = add_diag("whitening", "whitening baseline");
  whitening->add_option("--eps", eps, "eigenvalue floor")->capture_default_str();
  add_mask_flags(whitening, cfg);
  whitening->add_option("--out", cfg.out, "JSON report");

  std::size_t n_pairs = 200, n_dev = 100;
  std::string dev_out, test_out;
  auto* gen = app.add_subcommand(
      "gen-synthetic",
      "write the boilerplate benchmark: each sentence is one of 3 fixed 8-token "
      "prefixes plus 1-3 words from a 50-word vocabulary; gold is the Jaccard "
      "overlap of the two word sets");
  gen->add_option("--pairs", n_pairs, "number of pairs (>= 10)")->capture_default_str();
  add_seed_flag(gen, cfg);
  gen->add_option("--out", cfg.out, "TSV output (default: stdout)");
  gen->add_option("--dev-out", dev_out, "first --dev-pairs pairs");
  gen->add_option("--test-out", test_out, "remaining pairs");
  gen->add_option("--dev-pairs", n_dev, "size of the dev split")->capture_default_str();

  std::vector<const char*> argv{"repal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (mask->parsed()) {
      cmd_mask(cfg, input, out);
    } else if (cache->parsed()) {
      cmd_encode_cache(cfg, cache_datasets, cache_inputs, deletions, out);
    } else if (tune->parsed()) {
      cmd_tune(cfg, dev_path, grid1, grid2, out);
    } else if (eval->parsed()) {
      resolve_lambdas(cfg);
      cmd_eval(cfg, test_path, ablation, out);
    } else if (importance->parsed()) {
      resolve_lambdas(cfg);
      cmd_importance(cfg, diag_path, out, err);
    } else if (overlap->parsed()) {
      resolve_lambdas(cfg);
      cmd_overlap(cfg, diag_path, top_k, sample, out);
    } else if (sweep->parsed()) {
      resolve_lambdas(cfg);
      cmd_sweep(cfg, diag_path, axis, values, out);
    } else if (whitening->parsed()) {
      cmd_whitening(cfg, diag_path, eps, out);
    } else if (gen->parsed()) {
      cmd_gen_synthetic(cfg, n_pairs, dev_out, test_out, n_dev, out);
    }
  } catch (const std::exception& e) {
    err << "repal: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace repal::cli
