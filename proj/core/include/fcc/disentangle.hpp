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

#include "fcc/formula.hpp"
#include "fcc/matrix.hpp"
#include "fcc/model.hpp"
#include "fcc/patterns.hpp"

namespace fcc {

// Coding matrix C1 = W1 * C0 (hidden x input variables).
Matrix disentangle_layer1(const MlpModel& model);

// Pattern census on an arbitrary layer-1 matrix, rows split by the signs of W2.
PatternHistogram census_on_matrix(const Matrix& c1, const Matrix& w2, const Formula& formula,
                                  std::size_t output = 0);

}  // namespace fcc
