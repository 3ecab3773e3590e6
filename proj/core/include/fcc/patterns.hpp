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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcc/formula.hpp"
#include "fcc/matrix.hpp"
#include "fcc/model.hpp"

namespace fcc {

// Sign patterns of a row's weights at the four columns of a clause.
enum class PatternType { kP4, kP3N1, kP2N2, kN3P1, kN4, kP3N1c, kP3N1nc };

std::string_view to_string(PatternType type);

// `positive[i]` is the sign of the i-th weight ('+' iff w > 0).
PatternType classify_pattern(const std::array<bool, 4>& positive);

// "4P", "3P1N", "2P", "1P1N", ... for a clause of `size` literals with
// `positives` positive weights.
std::string pattern_name(std::size_t positives, std::size_t size);

enum class RowClass { kPositive = 0, kNegative = 1 };
std::string_view to_string(RowClass c);

struct WitnessPartition {
  std::vector<std::size_t> positive_rows;  // some output weight > 0
  std::vector<std::size_t> negative_rows;  // every output weight <= 0
  std::vector<int> dominant_output;        // per row; -1 on negative rows
  std::vector<std::size_t> tied_rows;      // argmax tie broken to lowest index

  std::size_t num_rows() const noexcept { return dominant_output.size(); }
  std::vector<std::size_t> rows_for_output(std::size_t output) const;
  double rho() const noexcept;  // fraction of positive rows
};

WitnessPartition witness_partition(const Matrix& w2);
WitnessPartition witness_partition(const MlpModel& model);

struct PatternHistogram {
  std::size_t clause_size = 0;
  std::size_t num_clauses = 0;
  std::array<std::size_t, 2> rows{};  // per RowClass
  double rho = 0.0;
  // by_positives[class][p][clause]: rows whose weights at the clause columns
  // contain exactly p positive entries.
  std::array<std::vector<std::vector<double>>, 2> by_positives;
  // Rows whose every sign matches the polarity of the clause's literal.
  std::array<std::vector<double>, 2> aligned;
  // For clauses of size 4 with exactly one negated literal: 3P1N rows whose
  // single negative weight does / does not sit at the negated variable.
  std::array<std::vector<double>, 2> p3n1_c;
  std::array<std::vector<double>, 2> p3n1_nc;
  std::vector<bool> one_negated;  // per clause

  double count(RowClass c, PatternType type, std::size_t clause) const;
  // Mean over clauses. The 3P1Nc/nc averages run over one-negated clauses only.
  double per_clause(RowClass c, PatternType type) const;
  double positives_per_clause(RowClass c, std::size_t positives) const;
  double aligned_per_clause(RowClass c) const;
};

// Census of `layer1` at each clause's columns, tallied over the given rows.
PatternHistogram census(const Matrix& layer1, std::span<const std::size_t> positive_rows,
                        std::span<const std::size_t> negative_rows, const Formula& formula);

// For multi-output models the positive class is the rows dominated by
// `output` and the negative class the rows negative for every output.
PatternHistogram count_patterns(const MlpModel& model, const Formula& formula,
                                std::size_t output = 0);

PatternHistogram random_baseline(std::size_t j, std::size_t num_vars, double rho,
                                 double row_bias_pos, double row_bias_neg,
                                 const Formula& formula, std::size_t n_samples = 10,
                                 std::uint64_t seed = 0);

struct BiasStats {
  double rho = 0.0;
  std::size_t positive_rows = 0;
  double positive_rows_negative_bias = 0.0;  // fraction with b1 < 0
  double mean_bias_positive_rows = 0.0;
  double mean_bias_negative_rows = 0.0;
  double positive_fraction = 0.0;  // of all W1 entries
  // [row class] over all columns
  std::array<double, 2> row_positive_fraction{};
  // [row class][0 = clause column, 1 = other column]
  std::array<std::array<double, 2>, 2> positive_fraction_split{};
  std::array<std::array<double, 2>, 2> mean_abs_split{};
  std::array<std::array<std::size_t, 2>, 2> entries_split{};
};

BiasStats bias_stats(const MlpModel& model, const Formula& formula, std::size_t output = 0);

// Average number of 4P patterns per clause the sign budget allows.
double packing_limit(double j, double num_vars, double k, double rho);

void write_histogram_csv_header(std::ostream& out);
void write_histogram_csv(std::ostream& out, const PatternHistogram& hist, std::size_t k,
                         std::size_t j, std::size_t trial);

}  // namespace fcc
