// Copyright 2026 The FCC Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fcc/embedding.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "fcc/error.hpp"
#include "fcc/rng.hpp"

namespace fcc {

std::string_view to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kIdentity:
      return "identity";
    case EmbeddingKind::kHadamard:
      return "hadamard";
    case EmbeddingKind::kRandomSymmetric:
      return "random_symmetric";
  }
  return "?";
}

EmbeddingKind embedding_kind_from_string(std::string_view name) {
  if (name == "identity") return EmbeddingKind::kIdentity;
  if (name == "hadamard") return EmbeddingKind::kHadamard;
  if (name == "random_symmetric") return EmbeddingKind::kRandomSymmetric;
  throw FormatError("unknown embedding kind '" + std::string(name) + "'");
}

Matrix hadamard_matrix(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ArgumentError("Hadamard order must be a power of two, got " + std::to_string(n));
  }
  Matrix h(n, n);
  h(0, 0) = 1.0;
  for (std::size_t size = 1; size < n; size *= 2) {
    for (std::size_t r = 0; r < size; ++r) {
      for (std::size_t c = 0; c < size; ++c) {
        const double v = h(r, c);
        h(r, c + size) = v;
        h(r + size, c) = v;
        h(r + size, c + size) = -v;
      }
    }
  }
  return h;
}

double min_singular_value_symmetric(const Matrix& symmetric) {
  const auto n = static_cast<Eigen::Index>(symmetric.rows());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = symmetric(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().minCoeff();
}

Matrix random_symmetric_embedding(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("embedding width must be positive");
  for (int attempt = 0; attempt < kMaxRegenerations; ++attempt) {
    Rng rng(mix(seed, {static_cast<std::uint64_t>(attempt)}));
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r; c < n; ++c) {
        const double v = rng.uniform(-1.0, 1.0);
        m(r, c) = v;
        m(c, r) = v;
      }
    }
    if (min_singular_value_symmetric(m) > kMinSingularValue) return m;
  }
  throw GenerationError("random_symmetric_embedding: no well-conditioned draw in " +
                        std::to_string(kMaxRegenerations) + " attempts");
}

Matrix left_inverse(const Matrix& c0) {
  const std::size_t n = c0.rows();
  if (n != c0.cols()) {
    throw DimensionError("left_inverse supports square embeddings only, got " +
                         std::to_string(c0.rows()) + "x" + std::to_string(c0.cols()));
  }
  Matrix a = c0;
  Matrix inv = Matrix::identity(n);
  double scale = 0.0;
  for (double v : c0.data()) scale = std::max(scale, std::abs(v));
  const double tolerance = 1e-12 * std::max(scale, 1.0) * static_cast<double>(n);
  double min_pivot = INFINITY;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    const double p = a(pivot, col);
    min_pivot = std::min(min_pivot, std::abs(p));
    if (std::abs(p) <= tolerance) {
      std::ostringstream msg;
      msg << "matrix is singular to tolerance: pivot " << std::abs(p) << " in column " << col;
      throw NumericalError(msg.str());
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(pivot, c), a(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const double scale_row = 1.0 / p;
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) *= scale_row;
      inv(col, c) *= scale_row;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

Embedding embedding_from_matrix(EmbeddingKind kind, Matrix c0) {
  Embedding e;
  e.kind = kind;
  if (kind == EmbeddingKind::kIdentity) {
    e.left_inverse = Matrix::identity(c0.rows());
  } else {
    e.left_inverse = left_inverse(c0);
  }
  e.matrix = std::move(c0);
  return e;
}

Embedding make_embedding(EmbeddingKind kind, std::size_t n, std::uint64_t seed) {
  switch (kind) {
    case EmbeddingKind::kIdentity:
      return embedding_from_matrix(kind, Matrix::identity(n));
    case EmbeddingKind::kHadamard:
      return embedding_from_matrix(kind, hadamard_matrix(n));
    case EmbeddingKind::kRandomSymmetric:
      return embedding_from_matrix(kind, random_symmetric_embedding(n, seed));
  }
  throw ArgumentError("unknown embedding kind");
}

}  // namespace fcc
