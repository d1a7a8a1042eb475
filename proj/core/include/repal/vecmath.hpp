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

// Dense vector and matrix primitives used by the refinement pipeline:
// cosine similarity, means, Gram-matrix spectra and the whitening transform.
// All accumulation happens in double precision.

#ifndef REPAL_VECMATH_HPP_
#define REPAL_VECMATH_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace repal {

// Euclidean norms below this are treated as zero.
inline constexpr double kZeroNormThreshold = 1e-12;

// A dense, finite, non-empty embedding vector.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<double> values);

  static EmbeddingVector zeros(std::size_t dim);

  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

// Rows share one dimension; at least one row.
class EmbeddingMatrix {
 public:
  explicit EmbeddingMatrix(std::vector<EmbeddingVector> rows);

  std::size_t rows_count() const { return rows_.size(); }
  std::size_t dim() const { return rows_.front().dim(); }
  const EmbeddingVector& row(std::size_t i) const { return rows_[i]; }
  const std::vector<EmbeddingVector>& rows() const { return rows_; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::vector<EmbeddingVector> rows_;
};

// Dense symmetric matrix in row-major storage.
struct SymmetricMatrix {
  std::size_t size = 0;
  std::vector<double> entries;

  explicit SymmetricMatrix(std::size_t n) : size(n), entries(n * n, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return entries[r * size + c]; }
  double at(std::size_t r, std::size_t c) const { return entries[r * size + c]; }
};

struct SpectralReport {
  double lambda_max = 0.0;   // largest eigenvalue of the Gram matrix E^T E
  double trace_bound = 0.0;  // sum of squared row norms; bounds lambda_max
  double mean_norm = 0.0;    // norm of the row mean
};

struct PowerIterationOptions {
  double tolerance = 1e-9;  // relative change of the Rayleigh quotient
  int max_iterations = 10000;
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double norm(const EmbeddingVector& v);

// Cosine similarity clamped to [-1, 1]. Throws DimensionMismatch or
// ZeroVector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Returns a + scale * b.
EmbeddingVector add_scaled(const EmbeddingVector& a, double scale,
                           const EmbeddingVector& b);

EmbeddingVector mean_vector(std::span<const EmbeddingVector> rows);
EmbeddingVector mean_vector(const EmbeddingMatrix& m);

// Each row minus the row mean.
EmbeddingMatrix center_rows(const EmbeddingMatrix& m);

// E^T E, dim x dim.
SymmetricMatrix gram_matrix(const EmbeddingMatrix& m);

// Largest eigenvalue of a symmetric positive semidefinite matrix by power
// iteration. The iteration starts from the normalized all-ones vector and is
// repeated from a fixed pseudo-random start; the larger converged Rayleigh
// quotient is returned, so a start vector orthogonal to the dominant
// eigenvector cannot hide it. Throws NoConvergenceError.
double power_iteration(const SymmetricMatrix& a,
                       const PowerIterationOptions& options = {});

// Largest eigenvalue of E^T E, i.e. the squared top singular value of E.
double largest_eigenvalue(const EmbeddingMatrix& m,
                          const PowerIterationOptions& options = {});

SpectralReport spectral_report(const EmbeddingMatrix& m,
                               const PowerIterationOptions& options = {});

struct SymmetricEigen {
  std::vector<double> eigenvalues;   // descending
  std::vector<double> eigenvectors;  // column k = eigenvector k, row-major
  std::size_t size = 0;

  double vector_entry(std::size_t row, std::size_t k) const {
    return eigenvectors[row * size + k];
  }
};

// Full eigendecomposition by cyclic Jacobi rotations.
SymmetricEigen symmetric_eigen(const SymmetricMatrix& a);

// Centers the rows, eigendecomposes the scatter C = (1/n) sum v v^T = U L U^T
// and maps every centered row v to v^T U (L + eps I)^{-1/2}. Needs n >= 2.
EmbeddingMatrix whiten(const EmbeddingMatrix& m, double eps = 1e-8);

}  // namespace repal

#endif  // REPAL_VECMATH_HPP_
