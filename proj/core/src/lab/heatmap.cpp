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

#include "fcc/lab/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fcc/error.hpp"

namespace fcc::lab {
namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string hex_color(const std::array<std::uint8_t, 3>& rgb) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

void check_order(std::span<const std::size_t> order, std::size_t n, const char* what) {
  for (std::size_t i : order)
    if (i >= n) throw ArgumentError(std::string(what) + " index out of range");
}

}  // namespace

std::array<std::uint8_t, 3> heatmap_color(double value, double scale) {
  if (!std::isfinite(value)) throw ArgumentError("heatmap value is not finite");
  if (!(scale > 0.0)) return {255, 255, 255};
  const double t = std::clamp(std::abs(value) / scale, 0.0, 1.0);
  const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
  if (value < 0.0) return {255, fade, fade};
  if (value > 0.0) return {fade, fade, 255};
  return {255, 255, 255};
}

std::string heatmap_svg(const Matrix& m, std::span<const std::size_t> row_order,
                        std::span<const std::size_t> col_order, const HeatmapOptions& options) {
  check_order(row_order, m.rows(), "row");
  check_order(col_order, m.cols(), "column");
  if (!(options.cell_size > 0.0)) throw ArgumentError("cell_size must be positive");
  double scale = options.scale;
  for (std::size_t r : row_order)
    for (std::size_t c : col_order) {
      if (!std::isfinite(m(r, c))) throw ArgumentError("heatmap matrix has non-finite entries");
      if (options.scale <= 0.0) scale = std::max(scale, std::abs(m(r, c)));
    }

  const double cs = options.cell_size;
  const double top = options.title.empty() ? 0.0 : 20.0;
  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << cs * static_cast<double>(col_order.size()) << "\" height=\""
      << cs * static_cast<double>(row_order.size()) + top << "\">\n";
  if (!options.title.empty())
    svg << "<text x=\"2\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(options.title) << "</text>\n";
  for (std::size_t i = 0; i < row_order.size(); ++i) {
    for (std::size_t k = 0; k < col_order.size(); ++k) {
      const double v = m(row_order[i], col_order[k]);
      svg << "<rect x=\"" << cs * static_cast<double>(k) << "\" y=\""
          << top + cs * static_cast<double>(i) << "\" width=\"" << cs << "\" height=\"" << cs
          << "\" fill=\"" << hex_color(heatmap_color(v, scale)) << "\" data-row=\""
          << row_order[i] << "\" data-col=\"" << col_order[k] << "\"><title>" << v
          << "</title></rect>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_heatmap(const Matrix& m, std::span<const std::size_t> row_order,
                  std::span<const std::size_t> col_order, const std::filesystem::path& path,
                  const HeatmapOptions& options) {
  const std::string svg = heatmap_svg(m, row_order, col_order, options);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << svg;
  if (!out.flush()) throw FormatError("cannot write " + path.string());
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

std::vector<std::size_t> clause_column_order(const Formula& formula) {
  std::vector<std::size_t> out;
  std::vector<bool> seen(formula.num_vars, false);
  for (const auto& clause : formula.clauses)
    for (const auto& lit : clause.literals)
      if (lit.var < formula.num_vars && !seen[lit.var]) {
        seen[lit.var] = true;
        out.push_back(lit.var);
      }
  for (std::size_t v = 0; v < formula.num_vars; ++v)
    if (!seen[v]) out.push_back(v);
  return out;
}

std::vector<std::size_t> rows_of_class(const WitnessPartition& partition, RowClass cls) {
  return cls == RowClass::kPositive ? partition.positive_rows : partition.negative_rows;
}

}  // namespace fcc::lab
