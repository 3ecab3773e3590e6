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

#include "fcc/disentangle.hpp"

#include "fcc/error.hpp"

namespace fcc {

Matrix disentangle_layer1(const MlpModel& model) {
  if (model.w1.cols() != model.embedding.matrix.rows())
    throw DimensionError("layer-1 width does not match the embedding");
  if (model.embedding.kind == EmbeddingKind::kIdentity) return model.w1;
  return multiply(model.w1, model.embedding.matrix);
}

PatternHistogram census_on_matrix(const Matrix& c1, const Matrix& w2, const Formula& formula,
                                  std::size_t output) {
  if (c1.rows() != w2.cols())
    throw DimensionError("C1 has " + std::to_string(c1.rows()) + " rows, W2 has " +
                         std::to_string(w2.cols()) + " columns");
  if (output >= w2.rows()) throw ArgumentError("output index out of range");
  const auto part = witness_partition(w2);
  const auto positive = w2.rows() == 1 ? part.positive_rows : part.rows_for_output(output);
  return census(c1, positive, part.negative_rows, formula);
}

}  // namespace fcc
