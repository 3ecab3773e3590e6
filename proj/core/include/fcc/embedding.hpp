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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "fcc/matrix.hpp"

namespace fcc {

enum class EmbeddingKind { kIdentity, kHadamard, kRandomSymmetric };

std::string_view to_string(EmbeddingKind kind);
EmbeddingKind embedding_kind_from_string(std::string_view name);

// Fixed input embedding C0 (n0 x m0) with its cached left inverse. Only
// square embeddings are supported, so n0 == m0.
struct Embedding {
  EmbeddingKind kind = EmbeddingKind::kIdentity;
  Matrix matrix;
  Matrix left_inverse;

  std::size_t input_width() const noexcept { return matrix.cols(); }
  std::size_t embedded_width() const noexcept { return matrix.rows(); }

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

// Sylvester construction: H_1 = [1], H_2n = [[H, H], [H, -H]].
// Throws ArgumentError unless n is a power of two.
Matrix hadamard_matrix(std::size_t n);

// Symmetric matrix with i.i.d. Uniform(-1, 1) upper triangle, redrawn from a
// derived stream until its smallest singular value exceeds
// kMinSingularValue. Throws GenerationError after kMaxRegenerations draws.
Matrix random_symmetric_embedding(std::size_t n, std::uint64_t seed);

inline constexpr double kMinSingularValue = 1e-3;
inline constexpr int kMaxRegenerations = 20;

// Smallest singular value of a symmetric matrix (smallest |eigenvalue|).
double min_singular_value_symmetric(const Matrix& symmetric);

// Inverse of a square matrix by Gauss-Jordan elimination with partial
// pivoting. Throws NumericalError naming the smallest pivot when the matrix
// is singular to tolerance, DimensionError when it is not square.
Matrix left_inverse(const Matrix& c0);

// Builds the embedding of the given kind and width; identity short-circuits
// the inversion.
Embedding make_embedding(EmbeddingKind kind, std::size_t n, std::uint64_t seed);

// Rebuilds an embedding around a stored matrix (used when loading models).
Embedding embedding_from_matrix(EmbeddingKind kind, Matrix c0);

}  // namespace fcc
