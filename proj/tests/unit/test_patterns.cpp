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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "fcc/construct.hpp"
#include "fcc/error.hpp"
#include "fcc/formula.hpp"
#include "fcc/patterns.hpp"
#include "fcc/rng.hpp"

namespace fcc {
namespace {

MlpModel model_from(const Matrix& w1, const std::vector<double>& w2_row,
                    const std::vector<double>& b1) {
  MlpModel m = init_model({w1.cols(), w1.rows(), 1}, EmbeddingKind::kIdentity, 0, false);
  m.w1 = w1;
  m.b1 = b1;
  for (std::size_t r = 0; r < w2_row.size(); ++r) m.w2(0, r) = w2_row[r];
  return m;
}

Matrix random_signs(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

TEST(Patterns, ClassifyAllSixteenTuples) {
  EXPECT_EQ(classify_pattern({true, true, true, true}), PatternType::kP4);
  EXPECT_EQ(classify_pattern({true, true, true, false}), PatternType::kP3N1);
  EXPECT_EQ(classify_pattern({false, false, true, false}), PatternType::kN3P1);
  std::array<std::size_t, 5> counts{};
  for (int code = 0; code < 16; ++code) {
    std::array<bool, 4> s{};
    int positives = 0;
    for (int i = 0; i < 4; ++i) positives += (s[i] = (code >> i) & 1);
    const auto t = classify_pattern(s);
    const PatternType expect[5] = {PatternType::kN4, PatternType::kN3P1, PatternType::kP2N2,
                                   PatternType::kP3N1, PatternType::kP4};
    EXPECT_EQ(t, expect[positives]);
    ++counts[static_cast<std::size_t>(positives)];
  }
  EXPECT_EQ(counts, (std::array<std::size_t, 5>{1, 4, 6, 4, 1}));
  EXPECT_EQ(pattern_name(4, 4), "4P");
  EXPECT_EQ(pattern_name(1, 4), "3N1P");
  EXPECT_EQ(pattern_name(1, 2), "1P1N");
  EXPECT_EQ(pattern_name(0, 2), "2N");
  EXPECT_EQ(to_string(PatternType::kP3N1c), "3P1Nc");
}

TEST(Patterns, WitnessPartition) {
  const auto p = witness_partition(Matrix::from_rows({{1.0, -1.0, 2.0}}));
  EXPECT_EQ(p.positive_rows, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(p.negative_rows, (std::vector<std::size_t>{1}));
  EXPECT_DOUBLE_EQ(p.rho(), 2.0 / 3.0);
  EXPECT_TRUE(witness_partition(Matrix::from_rows({{-1.0, 0.0}})).positive_rows.empty());

  // Two outputs: rows dominated by output 0, by output 1, and negative rows.
  const auto q = witness_partition(
      Matrix::from_rows({{2.0, 0.1, -1.0, 0.5}, {1.0, 0.7, -2.0, 0.5}}));
  EXPECT_EQ(q.rows_for_output(0), (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(q.rows_for_output(1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(q.negative_rows, (std::vector<std::size_t>{2}));
  EXPECT_EQ(q.tied_rows, (std::vector<std::size_t>{3}));
  EXPECT_EQ(q.dominant_output, (std::vector<int>{0, 1, -1, 0}));
}

TEST(Patterns, CensusPartitionsRows) {
  const Formula f = random_dnf(16, 5, 4, 1, 3);
  const Matrix w1 = random_signs(12, 16, 4);
  std::vector<double> w2(12);
  for (std::size_t r = 0; r < 12; ++r) w2[r] = r % 3 == 0 ? -1.0 : 1.0;
  const auto m = model_from(w1, w2, std::vector<double>(12, 0.0));
  const auto h = count_patterns(m, f);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t k = 0; k < f.clauses.size(); ++k) {
      double total = 0.0;
      for (std::size_t p = 0; p <= 4; ++p) total += h.by_positives[c][p][k];
      EXPECT_EQ(total, static_cast<double>(h.rows[c]));
      EXPECT_EQ(h.p3n1_c[c][k] + h.p3n1_nc[c][k], h.by_positives[c][3][k]);
    }
  EXPECT_EQ(h.rows[0], 8u);
  EXPECT_EQ(h.rows[1], 4u);
}

TEST(Patterns, PlantedFourAndCode) {
  const Formula f{FormulaKind::kDnf, 8, {make_clause({{0, false}, {1, false}, {2, false}, {3, true}})}};
  Matrix w1(3, 8, -0.5);
  for (std::size_t r : {0u, 1u}) {
    for (std::size_t c = 0; c < 3; ++c) w1(r, c) = 1.0;
    w1(r, 3) = r == 0 ? -1.0 : 1.0;  // row 0 aligned 3P1Nc, row 1 is 4P
  }
  const auto m = model_from(w1, {1.0, 1.0, -1.0}, {-2.0, -3.0, 0.5});
  const auto h = count_patterns(m, f);
  EXPECT_EQ(h.count(RowClass::kPositive, PatternType::kP4, 0), 1.0);
  EXPECT_EQ(h.count(RowClass::kPositive, PatternType::kP3N1c, 0), 1.0);
  EXPECT_EQ(h.count(RowClass::kPositive, PatternType::kP3N1nc, 0), 0.0);
  EXPECT_EQ(h.aligned[0][0], 1.0);
  EXPECT_EQ(h.count(RowClass::kNegative, PatternType::kN4, 0), 1.0);
}

TEST(Patterns, PermutationInvariance) {
  const Formula f = random_dnf(32, 8, 4, 0, 9);
  const Matrix w1 = random_signs(24, 32, 10);
  Rng rng(11);
  std::vector<double> w2(24);
  for (auto& v : w2) v = rng.uniform(-1.0, 1.0);
  const auto base = count_patterns(model_from(w1, w2, std::vector<double>(24, 0.0)), f);

  Formula g = f;
  std::reverse(g.clauses.begin(), g.clauses.end());
  const auto rc = count_patterns(model_from(w1, w2, std::vector<double>(24, 0.0)), g);
  std::vector<std::size_t> perm(24);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));
  Matrix pw1(24, 32);
  std::vector<double> pw2(24);
  for (std::size_t r = 0; r < 24; ++r) {
    for (std::size_t c = 0; c < 32; ++c) pw1(r, c) = w1(perm[r], c);
    pw2[r] = w2[perm[r]];
  }
  const auto rr = count_patterns(model_from(pw1, pw2, std::vector<double>(24, 0.0)), f);
  for (auto type : {PatternType::kP4, PatternType::kP3N1, PatternType::kP2N2,
                    PatternType::kN3P1, PatternType::kN4})
    for (auto cls : {RowClass::kPositive, RowClass::kNegative}) {
      EXPECT_DOUBLE_EQ(base.per_clause(cls, type), rc.per_clause(cls, type));
      EXPECT_DOUBLE_EQ(base.per_clause(cls, type), rr.per_clause(cls, type));
      for (std::size_t k = 0; k < 8; ++k)
        EXPECT_EQ(base.count(cls, type, k), rc.count(cls, type, 7 - k));
    }
}

TEST(Patterns, RandomBaselineExpectations) {
  const Formula f = random_dnf(32, 8, 4, 0, 1);
  const auto all = random_baseline(32, 32, 1.0, 1.0, 0.0, f, 3, 1);
  for (std::size_t k = 0; k < 8; ++k)
    EXPECT_EQ(all.count(RowClass::kPositive, PatternType::kP4, k), 32.0);

  const auto half = random_baseline(32, 32, 0.5, 0.5, 0.5, f, 10, 2);
  // 16 positive rows, P(4P) = 1/16 per row and clause.
  const double expect = 16.0 / 16.0;
  const double sigma = std::sqrt(16.0 * (1.0 / 16.0) * (15.0 / 16.0) / 80.0);
  EXPECT_NEAR(half.per_clause(RowClass::kPositive, PatternType::kP4), expect, 3 * sigma);
  EXPECT_NEAR(half.per_clause(RowClass::kPositive, PatternType::kP2N2), 16.0 * 6 / 16,
              3 * std::sqrt(16.0 * 0.375 * 0.625 / 80.0));
  EXPECT_EQ(half.rows[0], 16u);
  EXPECT_THROW(random_baseline(32, 32, 1.5, 0.5, 0.5, f), ArgumentError);
}

TEST(Patterns, BiasStatsExactFractions) {
  const Formula f{FormulaKind::kDnf, 4, {make_clause({{0, false}, {1, false}})}};
  const Matrix w1 = Matrix::from_rows({{1, 1, -1, 1}, {-1, 1, -1, -1}, {1, -1, -1, -1}});
  const auto m = model_from(w1, {1.0, 2.0, -1.0}, {-0.5, 0.25, 0.75});
  const auto b = bias_stats(m, f);
  EXPECT_EQ(b.positive_rows, 2u);
  EXPECT_DOUBLE_EQ(b.rho, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.positive_rows_negative_bias, 0.5);
  EXPECT_DOUBLE_EQ(b.mean_bias_positive_rows, -0.125);
  EXPECT_DOUBLE_EQ(b.mean_bias_negative_rows, 0.75);
  EXPECT_DOUBLE_EQ(b.positive_fraction, 5.0 / 12.0);
  EXPECT_DOUBLE_EQ(b.row_positive_fraction[0], 4.0 / 8.0);
  EXPECT_DOUBLE_EQ(b.row_positive_fraction[1], 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(b.positive_fraction_split[0][0], 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(b.positive_fraction_split[0][1], 1.0 / 4.0);
  EXPECT_EQ(b.entries_split[1][0], 2u);
}

TEST(Patterns, PackingLimit) {
  EXPECT_DOUBLE_EQ(packing_limit(32, 32, 32, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(packing_limit(32, 32, 64, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(packing_limit(64, 32, 64, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(packing_limit(32, 32, 16, 0.5), 2 * packing_limit(32, 32, 32, 0.5));
  EXPECT_THROW(packing_limit(32, 32, 0, 0.5), ArgumentError);
}

TEST(Patterns, HistogramCsv) {
  const Formula f = random_dnf(16, 2, 4, 1, 2);
  const auto h = random_baseline(8, 16, 0.5, 0.5, 0.5, f, 1, 3);
  std::ostringstream out;
  write_histogram_csv_header(out);
  write_histogram_csv(out, h, 2, 8, 0);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,j,trial,row_class,pattern,clause,count");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    ++rows;
  }
  EXPECT_EQ(rows, 2u * (5 + 1 + 2) * 2);
}

}  // namespace
}  // namespace fcc
