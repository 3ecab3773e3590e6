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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fcc/formula.hpp"
#include "fcc/matrix.hpp"
#include "fcc/patterns.hpp"

namespace fcc::lab {

struct HeatmapOptions {
  double cell_size = 12.0;
  std::string title;
  // Color scale saturates at this magnitude; 0 picks max |v| of the shown cells.
  double scale = 0.0;
};

// Diverging map: red below zero, white at zero, blue above.
std::array<std::uint8_t, 3> heatmap_color(double value, double scale);

std::string heatmap_svg(const Matrix& m, std::span<const std::size_t> row_order,
                        std::span<const std::size_t> col_order,
                        const HeatmapOptions& options = {});

void emit_heatmap(const Matrix& m, std::span<const std::size_t> row_order,
                  std::span<const std::size_t> col_order, const std::filesystem::path& path,
                  const HeatmapOptions& options = {});

std::vector<std::size_t> identity_order(std::size_t n);

// Variables grouped clause by clause in formula order, unused variables last.
std::vector<std::size_t> clause_column_order(const Formula& formula);

// Rows of one witness class, ascending.
std::vector<std::size_t> rows_of_class(const WitnessPartition& partition, RowClass cls);

}  // namespace fcc::lab
