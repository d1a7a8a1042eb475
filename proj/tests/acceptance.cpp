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

// End-to-end checks, one PASS/FAIL line each. Exit status is the number of
// failures.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracle/reference.hpp"
#include "repal/cli/app.hpp"
#include "repal/diagnose.hpp"
#include "repal/encoder.hpp"
#include "repal/error.hpp"
#include "repal/eval.hpp"
#include "repal/random.hpp"
#include "repal/refine.hpp"
#include "repal/synthetic.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

namespace {

using namespace repal;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

// Test-split gain of the tuned refinement on the 200-pair, seed-42 benchmark.
constexpr double kFrozenGain = 0.58881443218989682;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult repal_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// The synthetic benchmark, tuned once and shared by several checks.
struct Benchmark {
  SyntheticSplits splits = synthetic_splits(200, 42, 100);
  MockEncoder encoder{MockEncoderConfig{64, 0}};
  TfIdfModel dev_model = build_tfidf(splits.dev.pooled_sentences());
  TfIdfModel test_model = build_tfidf(splits.test.pooled_sentences());
  GridResult tuned;
  double seconds = 0.0;
  std::unique_ptr<PairScorer> test_scorer;

  Benchmark() {
    const auto start = Clock::now();
    const PairScorer dev(splits.dev, dev_model, RefinementConfig{}, encoder);
    tuned = grid_search(dev, GridSpec{parse_grid("0:1:0.1"), parse_grid("0:2:0.1")});
    test_scorer = std::make_unique<PairScorer>(splits.test, test_model, RefinementConfig{},
                                               encoder);
    seconds = seconds_since(start);
  }

  double raw() const { return test_scorer->spearman_at(0.0, 0.0); }
  double full() const { return test_scorer->spearman_at(tuned.lambda1, tuned.lambda2); }
};

Outcome identity(testing::TempDir& dir) {
  const auto start = Clock::now();
  SplitMix64 rng(2024);
  int mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.below(64);
    std::vector<double> a(d), b(d), c(d);
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = rng.signed_unit() * std::pow(10.0, static_cast<double>(rng.below(7)) - 3.0);
      b[i] = rng.signed_unit();
      c[i] = rng.signed_unit();
    }
    RefinementConfig cfg;
    cfg.mask_ratio = 0.05 + 0.95 * rng.uniform();
    const EmbeddingVector v(a);
    const EmbeddingVector out = refine(v, EmbeddingVector(b), EmbeddingVector(c), cfg);
    for (std::size_t i = 0; i < d; ++i) {
      if (std::bit_cast<std::uint64_t>(out[i]) != std::bit_cast<std::uint64_t>(a[i])) {
        ++mismatches;
        break;
      }
    }
  }
  const double core_seconds = seconds_since(start);

  repal_cli({"gen-synthetic", "--pairs", "40", "--seed", "5", "--out", dir.file("id.tsv")});
  const auto r = repal_cli({"eval", dir.file("id.tsv"), "--lambda1", "0", "--lambda2", "0"});
  const auto arrow = r.out.find(" -> ");
  const auto colon = r.out.find(": ");
  bool cli_equal = r.code == 0 && arrow != std::string::npos && colon != std::string::npos;
  if (cli_equal) {
    const std::string before = r.out.substr(colon + 2, arrow - colon - 2);
    const std::string after = r.out.substr(arrow + 4, r.out.find(' ', arrow + 4) - arrow - 4);
    cli_equal = before == after && r.out.find("(+0.00)") != std::string::npos;
  }
  Outcome o;
  o.pass = mismatches == 0 && cli_equal && core_seconds < 1.0;
  o.detail = fmt("%d/100 cases differ, cli line '%s', %.3fs", mismatches,
                 r.out.substr(0, r.out.size() - (r.out.empty() ? 0 : 1)).c_str(), core_seconds);
  return o;
}

Outcome centering() {
  const auto start = Clock::now();
  const auto splits = synthetic_splits(50, 7, 25);
  auto corpus = splits.dev.pooled_sentences();
  corpus.resize(50);
  const TfIdfModel model = build_tfidf(corpus);
  const MockEncoder enc(MockEncoderConfig{64, 0});
  RefinementConfig raw_cfg, centered_cfg;
  centered_cfg.lambda2 = 1.0;
  const auto raw = refine_corpus(corpus, model, raw_cfg, enc);
  const auto centered = refine_corpus(corpus, model, centered_cfg, enc);
  double mean_norm = 0.0;
  for (const auto& r : raw.refined.rows()) mean_norm += norm(r);
  mean_norm /= static_cast<double>(corpus.size());
  const double residual = norm(mean_vector(centered.refined));
  const double before = largest_eigenvalue(raw.refined);
  const double after = largest_eigenvalue(centered.refined);
  const double secs = seconds_since(start);
  return {residual <= 1e-9 * mean_norm && after <= before && secs < 1.0,
          fmt("|mean|=%.3g (limit %.3g), lambda_max %.4f -> %.4f, %.3fs", residual,
              1e-9 * mean_norm, before, after, secs)};
}

Outcome spearman_oracle() {
  SplitMix64 rng(99);
  double worst = 0.0, worst_invariance = 0.0;
  int cases = 0;
  while (cases < 200) {
    const std::size_t n = 2 + rng.below(99);
    const std::size_t levels = 1 + rng.below(n + 1);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(levels));
      y[i] = static_cast<double>(rng.below(1 + rng.below(n)));
    }
    const auto rx = oracle::brute_ranks(x);
    const auto ry = oracle::brute_ranks(y);
    if (std::all_of(rx.begin(), rx.end(), [&](double r) { return r == rx[0]; }) ||
        std::all_of(ry.begin(), ry.end(), [&](double r) { return r == ry[0]; })) {
      continue;
    }
    ++cases;
    const double got = spearman(x, y);
    worst = std::max(worst, std::abs(got - oracle::brute_spearman(x, y)));
    std::vector<double> tx(n);
    for (std::size_t i = 0; i < n; ++i) tx[i] = std::exp(0.3 * x[i]) * 5.0 - 2.0;
    worst_invariance = std::max(worst_invariance, std::abs(spearman(tx, y) - got));
  }
  return {worst <= 1e-12 && worst_invariance <= 1e-12,
          fmt("max |diff| %.3g vs oracle, %.3g under monotone maps, 200 cases", worst,
              worst_invariance)};
}

EmbeddingMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
  std::vector<EmbeddingVector> out;
  for (const auto& r : rows) out.emplace_back(r);
  return EmbeddingMatrix(std::move(out));
}

Outcome spectral_oracle() {
  double worst = 0.0;
  int checked = 0;
  auto record = [&](double got, double expected) {
    worst = std::max(worst, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
    ++checked;
  };
  const double v2[] = {-2, -1, 0, 0.5, 1, 3};
  for (double a : v2) {
    for (double b : v2) {
      for (double c : v2) {
        for (double d : v2) {
          const auto e = matrix_of({{a, b}, {c, d}});
          const auto g = gram_matrix(e);
          record(largest_eigenvalue(e),
                 oracle::largest_root_2x2(g.at(0, 0), g.at(0, 1), g.at(1, 1)));
        }
      }
    }
  }
  const double v3[] = {-1, 0, 1};
  for (int code = 0; code < 19683; ++code) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(3));
    int rest = code;
    for (auto& r : rows) {
      for (double& x : r) {
        x = v3[rest % 3];
        rest /= 3;
      }
    }
    const auto e = matrix_of(rows);
    const auto g = gram_matrix(e);
    std::array<std::array<double, 3>, 3> a{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = g.at(i, j);
    }
    record(largest_eigenvalue(e), oracle::largest_root_3x3(a));
  }

  SplitMix64 rng(7);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.below(20);
    const std::size_t d = 1 + rng.below(20);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows) {
      for (double& x : r) x = rng.signed_unit() * 4.0;
    }
    const auto report = spectral_report(matrix_of(rows));
    if (report.lambda_max > report.trace_bound * (1.0 + 1e-12)) ++violations;
  }
  return {worst <= 1e-6 && violations == 0,
          fmt("max relative error %.3g over %d matrices, %d/1000 bound violations", worst,
              checked, violations)};
}

Outcome end_to_end(const Benchmark& b) {
  const double raw = b.raw();
  const double refined = b.full();
  const double gain = refined - raw;
  const bool frozen = std::abs(gain - kFrozenGain) <= 1e-9;
  return {gain >= 0.05 && frozen && b.seconds < 60.0,
          fmt("lambda=(%g, %g), test %.6f -> %.6f, gain %.17g (frozen %.17g), %.2fs",
              b.tuned.lambda1, b.tuned.lambda2, raw, refined, gain, kFrozenGain, b.seconds)};
}

Outcome ablation(const Benchmark& b) {
  const double raw = b.raw();
  const double full = b.full();
  const double no_sen = b.test_scorer->spearman_at(0.0, b.tuned.lambda2);
  const double no_cor = b.test_scorer->spearman_at(b.tuned.lambda1, 0.0);
  const bool pass = full >= no_sen && full >= no_cor && no_sen >= raw - 1e-9 &&
                    no_cor >= raw - 1e-9;
  return {pass, fmt("full %.6f, w/o sentence %.6f, w/o corpus %.6f, raw %.6f", full, no_sen,
                    no_cor, raw)};
}

Outcome overlap(const Benchmark& b) {
  RefinementConfig id_cfg, sen_cfg;
  sen_cfg.lambda1 = b.tuned.lambda1;
  const Refinement identity{&b.test_model, id_cfg, std::nullopt};
  const Refinement sentence{&b.test_model, sen_cfg, std::nullopt};
  const auto before = average_overlap(b.splits.test.pairs, b.test_model, identity, b.encoder);
  const auto after = average_overlap(b.splits.test.pairs, b.test_model, sentence, b.encoder);
  return {after.r_hat <= before.r_hat,
          fmt("r_hat %.4f -> %.4f with lambda1=%g over %zu pairs", before.r_hat, after.r_hat,
              b.tuned.lambda1, before.per_pair.size())};
}

Outcome sweep(const Benchmark& b, testing::TempDir& dir) {
  const auto records =
      lambda_sweep(*b.test_scorer, SweepAxis::kLambda2, parse_grid("0:2:0.1"), b.tuned.lambda1);
  std::size_t best = 0, flattest = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].spearman > records[best].spearman) best = i;
    if (records[i].lambda_max < records[flattest].lambda_max) flattest = i;
  }
  const double gap = std::abs(records[best].lambda - records[flattest].lambda);

  repal_cli({"gen-synthetic", "--seed", "42", "--dev-out", dir.file("sw-dev.tsv"),
             "--test-out", dir.file("sw-test.tsv")});
  const std::vector<std::string> args{"diagnose", "sweep", "--dataset", dir.file("sw-test.tsv"),
                                      "--lambda1", fmt("%g", b.tuned.lambda1)};
  const auto first = repal_cli(args);
  const auto second = repal_cli(args);
  const bool identical = first.code == 0 && first.out == second.out &&
                         sweep_csv(records) == sweep_csv(records);
  return {gap <= 0.3 + 1e-12 && identical,
          fmt("argmax spearman at lambda2=%g, argmin lambda_max at lambda2=%g, csv %s",
              records[best].lambda, records[flattest].lambda,
              identical ? "byte-identical" : "differs")};
}

Outcome whitening(const Benchmark& b) {
  SplitMix64 rng(500);
  std::vector<EmbeddingVector> rows;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> v(16);
    for (std::size_t j = 0; j < 16; ++j) {
      v[j] = rng.signed_unit() * static_cast<double>(j + 1) + (j > 0 ? 0.5 * v[j - 1] : 0.0);
    }
    rows.emplace_back(std::move(v));
  }
  const EmbeddingMatrix w = whiten(EmbeddingMatrix(std::move(rows)));
  const EmbeddingVector mu = mean_vector(w);
  double worst = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      double c = 0.0;
      for (const auto& r : w.rows()) c += (r[i] - mu[i]) * (r[j] - mu[j]);
      c /= 500.0;
      worst = std::max(worst, std::abs(c - (i == j ? 1.0 : 0.0)));
    }
  }
  const EvalReport baseline = whitening_baseline(b.splits.test, b.encoder);
  const double repal = b.full();
  return {worst <= 1e-6 && repal >= baseline.spearman_refined - 0.02,
          fmt("max |cov - I| %.3g, tuned %.6f vs whitening %.6f", worst, repal,
              baseline.spearman_refined)};
}

Outcome protocol() {
  const auto start = Clock::now();
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  testing::StubServer server(4);
  std::vector<std::chrono::milliseconds> sleeps;
  RemoteEncoderConfig cfg;
  cfg.base_url = server.url();
  cfg.batch_size = 2;
  cfg.timeout = 2000ms;
  cfg.retry.initial_backoff = 10ms;
  cfg.retry.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };

  server.script({testing::StubReply{503}});
  RemoteEncoder enc(cfg);
  const std::vector<std::string> texts{"the cat", "a [MASK] sat", "dogs"};
  const auto out = enc.encode(texts);
  const auto reqs = server.requests();
  expect(reqs.size() == 3, "three requests (one retried)");
  if (reqs.size() == 3) {
    expect(reqs[0].body == R"({"texts":["the cat","a [MASK] sat"]})", "first body");
    expect(reqs[1].body == reqs[0].body, "retry repeats the batch");
    expect(reqs[2].body == R"({"texts":["dogs"]})", "second batch");
    expect(reqs[0].path == "/v1/encode", "path");
    expect(reqs[0].content_type == "application/json", "content type");
  }
  expect(sleeps == std::vector<std::chrono::milliseconds>{10ms}, "one backoff of 10ms");
  for (std::size_t i = 0; i < texts.size() && i < out.size(); ++i) {
    expect(out[i].data() == testing::StubServer::encoding_of(texts[i], 4), "vector " + texts[i]);
  }

  testing::StubServer wrong(4);
  cfg.base_url = wrong.url();
  cfg.expected_dim = 4;
  wrong.script({testing::StubReply{200, "", 5}});
  RemoteEncoder strict(cfg);
  const auto code = testing::error_of([&] { strict.encode_one("x"); });
  expect(code == ErrorCode::kDimMismatch, "DimMismatch");

  const double secs = seconds_since(start);
  std::string detail = fmt("%zu recorded requests, %.3fs", reqs.size(), secs);
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty() && secs < 5.0, detail};
}

Outcome determinism(testing::TempDir& dir) {
  repal_cli({"gen-synthetic", "--pairs", "60", "--seed", "42", "--dev-out",
             dir.file("det-dev.tsv"), "--test-out", dir.file("det-test.tsv"), "--dev-pairs",
             "30"});
  const std::string dev = dir.file("det-dev.tsv");
  const std::string test = dir.file("det-test.tsv");
  dir.write("det-lines.txt", "the cat sat on the mat\nwhere is the dog\nbirds sing songs\n");

  struct Command {
    std::string name;
    std::vector<std::string> args;  // "@" is replaced by a per-run output path
  };
  const std::vector<Command> commands{
      {"mask", {"mask", dir.file("det-lines.txt"), "--out", "@"}},
      {"encode-cache", {"encode-cache", "--dataset", test, "--deletions", "--out", "@"}},
      {"tune", {"tune", "--dev", dev, "--out", "@"}},
      {"eval", {"eval", test, "--lambda1", "1", "--lambda2", "0.1", "--out", "@"}},
      {"importance", {"diagnose", "importance", "--dataset", test, "--lambda1", "1",
                      "--out", "@"}},
      {"overlap", {"diagnose", "overlap", "--dataset", test, "--lambda1", "1", "--sample",
                   "10", "--out", "@"}},
      {"sweep", {"diagnose", "sweep", "--dataset", test, "--lambda1", "1", "--out", "@"}},
      {"whitening", {"diagnose", "whitening", "--dataset", test, "--out", "@"}},
      {"gen-synthetic", {"gen-synthetic", "--seed", "8", "--out", "@"}},
      {"gen-synthetic-stdout", {"gen-synthetic", "--seed", "8", "--pairs", "30"}},
      {"mask-stdout", {"mask", dir.file("det-lines.txt")}},
  };

  std::vector<std::string> differing;
  for (const auto& c : commands) {
    std::string outputs[2], files[2];
    int codes[2];
    for (int run = 0; run < 2; ++run) {
      auto args = c.args;
      const std::string path = dir.file("det-" + c.name + "-" + std::to_string(run));
      for (auto& a : args) {
        if (a == "@") a = path;
      }
      auto r = repal_cli(args);
      // The cache summary names its own output path.
      std::string out = r.out;
      if (const auto at = out.find(path); at != std::string::npos) out.replace(at, path.size(), "@");
      outputs[run] = out;
      codes[run] = r.code;
      files[run] = std::filesystem::exists(path) ? testing::slurp(path) : std::string();
    }
    if (codes[0] != 0 || codes[0] != codes[1] || outputs[0] != outputs[1] ||
        files[0] != files[1]) {
      differing.push_back(c.name);
    }
  }
  std::string detail = fmt("%zu commands run twice", commands.size());
  for (const auto& d : differing) detail += "; differs or failed: " + d;
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  testing::TempDir dir;
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << id << " (" << name << "): " << (o.pass ? "PASS" : "FAIL")
              << " - " << o.detail << std::endl;
  };

  report(1, "identity", [&] { return identity(dir); });
  report(2, "centering", [] { return centering(); });
  report(3, "spearman oracle", [] { return spearman_oracle(); });
  report(4, "spectral oracle", [] { return spectral_oracle(); });

  std::unique_ptr<Benchmark> bench;
  try {
    bench = std::make_unique<Benchmark>();
  } catch (const std::exception& e) {
    std::cout << "benchmark setup failed: " << e.what() << std::endl;
  }
  auto with_bench = [&](auto fn) {
    return [&, fn]() -> Outcome {
      if (!bench) return {false, "benchmark unavailable"};
      return fn(*bench);
    };
  };
  report(5, "synthetic end-to-end", with_bench([](const Benchmark& b) { return end_to_end(b); }));
  report(6, "ablation ordering", with_bench([](const Benchmark& b) { return ablation(b); }));
  report(7, "overlap ratio", with_bench([](const Benchmark& b) { return overlap(b); }));
  report(8, "sweep", with_bench([&](const Benchmark& b) { return sweep(b, dir); }));
  report(9, "whitening", with_bench([](const Benchmark& b) { return whitening(b); }));
  report(10, "protocol", [] { return protocol(); });
  report(11, "determinism", [&] { return determinism(dir); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
