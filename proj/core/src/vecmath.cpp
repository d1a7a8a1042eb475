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

#include "repal/vecmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "repal/error.hpp"
#include "repal/random.hpp"

namespace repal {

namespace {

void check_same_dim(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimensions " + std::to_string(a.dim()) + " and " +
                    std::to_string(b.dim()) + " differ");
  }
}

double vector_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

std::vector<double> multiply(const SymmetricMatrix& a,
                             const std::vector<double>& v) {
  std::vector<double> out(a.size, 0.0);
  for (std::size_t r = 0; r < a.size; ++r) {
    const double* row = &a.entries[r * a.size];
    double sum = 0.0;
    for (std::size_t c = 0; c < a.size; ++c) sum += row[c] * v[c];
    out[r] = sum;
  }
  return out;
}

// Returns the converged Rayleigh quotient from one start vector.
double power_iteration_from(const SymmetricMatrix& a, std::vector<double> v,
                            const PowerIterationOptions& options) {
  double v_norm = vector_norm(v);
  for (double& x : v) x /= v_norm;

  double estimate = 0.0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    std::vector<double> w = multiply(a, v);
    const double rayleigh = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
    const double w_norm = vector_norm(w);
    if (w_norm == 0.0) return 0.0;  // v lies in the null space
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / w_norm;
    if (iter > 1 && std::abs(rayleigh - estimate) <=
                        options.tolerance * std::max(std::abs(rayleigh),
                                                     std::numeric_limits<double>::min())) {
      return rayleigh;
    }
    estimate = rayleigh;
  }
  throw NoConvergenceError(estimate, options.max_iterations);
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be >= 1");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument, "embedding has non-finite value");
    }
  }
}

EmbeddingVector EmbeddingVector::zeros(std::size_t dim) {
  return EmbeddingVector(std::vector<double>(dim, 0.0));
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<EmbeddingVector> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(ErrorCode::kEmptyMatrix, "matrix has no rows");
  for (const auto& r : rows_) check_same_dim(rows_.front(), r);
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(const EmbeddingVector& v) { return vector_norm(v.values()); }

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_same_dim(a, b);
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kZeroNormThreshold || nb < kZeroNormThreshold) {
    throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

EmbeddingVector add_scaled(const EmbeddingVector& a, double scale,
                           const EmbeddingVector& b) {
  check_same_dim(a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + scale * b[i];
  return EmbeddingVector(std::move(out));
}

EmbeddingVector mean_vector(std::span<const EmbeddingVector> rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyMatrix, "mean of no rows");
  std::vector<double> sum(rows.front().dim(), 0.0);
  for (const auto& r : rows) {
    check_same_dim(rows.front(), r);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += r[i];
  }
  const double n = static_cast<double>(rows.size());
  for (double& x : sum) x /= n;
  return EmbeddingVector(std::move(sum));
}

EmbeddingVector mean_vector(const EmbeddingMatrix& m) {
  return mean_vector(std::span<const EmbeddingVector>(m.rows()));
}

EmbeddingMatrix center_rows(const EmbeddingMatrix& m) {
  const EmbeddingVector mu = mean_vector(m);
  std::vector<EmbeddingVector> out;
  out.reserve(m.rows_count());
  for (const auto& r : m.rows()) out.push_back(add_scaled(r, -1.0, mu));
  return EmbeddingMatrix(std::move(out));
}

SymmetricMatrix gram_matrix(const EmbeddingMatrix& m) {
  const std::size_t d = m.dim();
  SymmetricMatrix g(d);
  for (const auto& r : m.rows()) {
    for (std::size_t i = 0; i < d; ++i) {
      const double ri = r[i];
      if (ri == 0.0) continue;
      for (std::size_t j = i; j < d; ++j) g.at(i, j) += ri * r[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) g.at(i, j) = g.at(j, i);
  }
  return g;
}

double power_iteration(const SymmetricMatrix& a,
                       const PowerIterationOptions& options) {
  if (a.size == 0) throw Error(ErrorCode::kEmptyMatrix, "empty matrix");
  if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "power iteration needs tolerance > 0 and max_iterations >= 1");
  }
  const double from_ones =
      power_iteration_from(a, std::vector<double>(a.size, 1.0), options);

  SplitMix64 rng(0x5eedULL);
  std::vector<double> start(a.size);
  for (double& x : start) x = rng.signed_unit();
  if (vector_norm(start) == 0.0) return from_ones;
  const double from_random = power_iteration_from(a, std::move(start), options);
  return std::max(from_ones, from_random);
}

double largest_eigenvalue(const EmbeddingMatrix& m,
                          const PowerIterationOptions& options) {
  return power_iteration(gram_matrix(m), options);
}

SpectralReport spectral_report(const EmbeddingMatrix& m,
                               const PowerIterationOptions& options) {
  SpectralReport report;
  report.lambda_max = largest_eigenvalue(m, options);
  for (const auto& r : m.rows()) {
    const double n = norm(r);
    report.trace_bound += n * n;
  }
  report.mean_norm = norm(mean_vector(m));
  return report;
}

SymmetricEigen symmetric_eigen(const SymmetricMatrix& input) {
  const std::size_t n = input.size;
  SymmetricMatrix a = input;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (double x : a.entries) total += x * x;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    }
    if (off <= 1e-30 * total || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a.at(x, x) > a.at(y, y);
  });

  SymmetricEigen result;
  result.size = n;
  result.eigenvalues.resize(n);
  result.eigenvectors.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    result.eigenvalues[k] = a.at(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) {
      result.eigenvectors[r * n + k] = v[r * n + order[k]];
    }
  }
  return result;
}

EmbeddingMatrix whiten(const EmbeddingMatrix& m, double eps) {
  if (m.rows_count() < 2) {
    throw Error(ErrorCode::kEmptyMatrix, "whitening needs at least two rows");
  }
  const EmbeddingMatrix centered = center_rows(m);
  SymmetricMatrix scatter = gram_matrix(centered);
  const double n = static_cast<double>(m.rows_count());
  for (double& x : scatter.entries) x /= n;

  const SymmetricEigen eig = symmetric_eigen(scatter);
  const std::size_t d = m.dim();
  std::vector<double> scale(d);
  for (std::size_t k = 0; k < d; ++k) {
    // Clamp tiny negative eigenvalues from rounding before regularizing.
    scale[k] = 1.0 / std::sqrt(std::max(eig.eigenvalues[k], 0.0) + eps);
  }

  std::vector<EmbeddingVector> out;
  out.reserve(m.rows_count());
  for (const auto& r : centered.rows()) {
    std::vector<double> w(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < d; ++i) proj += r[i] * eig.vector_entry(i, k);
      w[k] = proj * scale[k];
    }
    out.emplace_back(std::move(w));
  }
  return EmbeddingMatrix(std::move(out));
}

}  // namespace repal
