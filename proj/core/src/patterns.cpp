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

#include "fcc/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fcc/error.hpp"
#include "fcc/rng.hpp"

namespace fcc {
namespace {

std::size_t positives_of(PatternType type) {
  switch (type) {
    case PatternType::kP4: return 4;
    case PatternType::kP3N1: return 3;
    case PatternType::kP2N2: return 2;
    case PatternType::kN3P1: return 1;
    case PatternType::kN4: return 0;
    default: break;
  }
  throw ArgumentError("pattern type has no plain sign count");
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::size_t cls(RowClass c) { return static_cast<std::size_t>(c); }

}  // namespace

std::string_view to_string(PatternType type) {
  switch (type) {
    case PatternType::kP4: return "4P";
    case PatternType::kP3N1: return "3P1N";
    case PatternType::kP2N2: return "2P2N";
    case PatternType::kN3P1: return "3N1P";
    case PatternType::kN4: return "4N";
    case PatternType::kP3N1c: return "3P1Nc";
    case PatternType::kP3N1nc: return "3P1Nnc";
  }
  return "?";
}

std::string_view to_string(RowClass c) {
  return c == RowClass::kPositive ? "positive" : "negative";
}

PatternType classify_pattern(const std::array<bool, 4>& positive) {
  const auto p = std::count(positive.begin(), positive.end(), true);
  static constexpr PatternType kByCount[] = {PatternType::kN4, PatternType::kN3P1,
                                             PatternType::kP2N2, PatternType::kP3N1,
                                             PatternType::kP4};
  return kByCount[p];
}

std::string pattern_name(std::size_t positives, std::size_t size) {
  if (positives > size) throw ArgumentError("more positives than literals");
  const std::size_t negatives = size - positives;
  if (negatives == 0) return std::to_string(size) + "P";
  if (positives == 0) return std::to_string(size) + "N";
  if (positives >= negatives)
    return std::to_string(positives) + "P" + std::to_string(negatives) + "N";
  return std::to_string(negatives) + "N" + std::to_string(positives) + "P";
}

std::vector<std::size_t> WitnessPartition::rows_for_output(std::size_t output) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < dominant_output.size(); ++r)
    if (dominant_output[r] == static_cast<int>(output)) out.push_back(r);
  return out;
}

double WitnessPartition::rho() const noexcept {
  if (dominant_output.empty()) return 0.0;
  return static_cast<double>(positive_rows.size()) / static_cast<double>(dominant_output.size());
}

WitnessPartition witness_partition(const Matrix& w2) {
  WitnessPartition p;
  const std::size_t rows = w2.cols();
  p.dominant_output.assign(rows, -1);
  for (std::size_t r = 0; r < rows; ++r) {
    int best = -1;
    double best_w = 0.0;
    bool tie = false;
    for (std::size_t t = 0; t < w2.rows(); ++t) {
      const double w = w2(t, r);
      if (w <= 0.0) continue;
      if (best < 0 || w > best_w) {
        best = static_cast<int>(t);
        best_w = w;
        tie = false;
      } else if (w == best_w) {
        tie = true;
      }
    }
    p.dominant_output[r] = best;
    if (best >= 0) {
      p.positive_rows.push_back(r);
      if (tie) p.tied_rows.push_back(r);
    } else {
      p.negative_rows.push_back(r);
    }
  }
  return p;
}

WitnessPartition witness_partition(const MlpModel& model) { return witness_partition(model.w2); }

double PatternHistogram::count(RowClass c, PatternType type, std::size_t clause) const {
  if (clause >= num_clauses) throw ArgumentError("clause index out of range");
  if (type == PatternType::kP3N1c) return p3n1_c[cls(c)][clause];
  if (type == PatternType::kP3N1nc) return p3n1_nc[cls(c)][clause];
  if (clause_size != 4) throw ArgumentError("4-literal pattern requested on a non-4 census");
  return by_positives[cls(c)][positives_of(type)][clause];
}

double PatternHistogram::per_clause(RowClass c, PatternType type) const {
  if (type == PatternType::kP3N1c || type == PatternType::kP3N1nc) {
    const auto& v = type == PatternType::kP3N1c ? p3n1_c[cls(c)] : p3n1_nc[cls(c)];
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < num_clauses; ++i) {
      if (!one_negated[i]) continue;
      s += v[i];
      ++n;
    }
    return n ? s / static_cast<double>(n) : 0.0;
  }
  if (clause_size != 4) throw ArgumentError("4-literal pattern requested on a non-4 census");
  return mean(by_positives[cls(c)][positives_of(type)]);
}

double PatternHistogram::positives_per_clause(RowClass c, std::size_t positives) const {
  if (positives > clause_size) throw ArgumentError("more positives than literals");
  return mean(by_positives[cls(c)][positives]);
}

double PatternHistogram::aligned_per_clause(RowClass c) const { return mean(aligned[cls(c)]); }

PatternHistogram census(const Matrix& layer1, std::span<const std::size_t> positive_rows,
                        std::span<const std::size_t> negative_rows, const Formula& formula) {
  validate(formula);
  if (formula.clauses.empty()) throw ArgumentError("census needs at least one clause");
  const std::size_t size = formula.clauses.front().size();
  for (const auto& c : formula.clauses)
    if (c.size() != size) throw ArgumentError("census needs clauses of equal size");
  if (layer1.cols() != formula.num_vars)
    throw DimensionError("layer-1 matrix has " + std::to_string(layer1.cols()) +
                         " columns, formula has " + std::to_string(formula.num_vars) +
                         " variables");

  PatternHistogram h;
  h.clause_size = size;
  h.num_clauses = formula.clauses.size();
  h.rows = {positive_rows.size(), negative_rows.size()};
  const std::size_t total = positive_rows.size() + negative_rows.size();
  h.rho = total ? static_cast<double>(positive_rows.size()) / static_cast<double>(total) : 0.0;
  h.one_negated.resize(h.num_clauses);
  for (std::size_t i = 0; i < h.num_clauses; ++i)
    h.one_negated[i] = size == 4 && formula.clauses[i].negated_count() == 1;

  for (std::size_t c = 0; c < 2; ++c) {
    h.by_positives[c].assign(size + 1, std::vector<double>(h.num_clauses, 0.0));
    h.aligned[c].assign(h.num_clauses, 0.0);
    h.p3n1_c[c].assign(h.num_clauses, 0.0);
    h.p3n1_nc[c].assign(h.num_clauses, 0.0);
    const auto rows = c == 0 ? positive_rows : negative_rows;
    for (std::size_t r : rows) {
      if (r >= layer1.rows()) throw DimensionError("row index out of range");
      for (std::size_t k = 0; k < h.num_clauses; ++k) {
        const auto& lits = formula.clauses[k].literals;
        std::size_t positives = 0;
        bool aligned = true;
        bool negative_at_negated = false;
        for (const auto& lit : lits) {
          const bool pos = layer1(r, lit.var) > 0.0;
          positives += pos ? 1 : 0;
          if (pos == lit.negated) aligned = false;
          if (!pos && lit.negated) negative_at_negated = true;
        }
        h.by_positives[c][positives][k] += 1.0;
        if (aligned) h.aligned[c][k] += 1.0;
        if (h.one_negated[k] && positives == 3) {
          (negative_at_negated ? h.p3n1_c[c][k] : h.p3n1_nc[c][k]) += 1.0;
        }
      }
    }
  }
  return h;
}

PatternHistogram count_patterns(const MlpModel& model, const Formula& formula,
                                std::size_t output) {
  if (output >= model.outputs()) throw ArgumentError("output index out of range");
  const auto part = witness_partition(model);
  const auto positive =
      model.outputs() == 1 ? part.positive_rows : part.rows_for_output(output);
  return census(model.w1, positive, part.negative_rows, formula);
}

PatternHistogram random_baseline(std::size_t j, std::size_t num_vars, double rho,
                                 double row_bias_pos, double row_bias_neg,
                                 const Formula& formula, std::size_t n_samples,
                                 std::uint64_t seed) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ArgumentError("rho must lie in [0,1]");
  if (!(row_bias_pos >= 0.0 && row_bias_pos <= 1.0) ||
      !(row_bias_neg >= 0.0 && row_bias_neg <= 1.0))
    throw ArgumentError("row biases must lie in [0,1]");
  if (n_samples == 0) throw ArgumentError("random baseline needs at least one sample");

  const auto positive_count =
      static_cast<std::size_t>(std::llround(rho * static_cast<double>(j)));
  std::vector<std::size_t> pos(positive_count);
  std::vector<std::size_t> neg(j - positive_count);
  for (std::size_t r = 0; r < j; ++r) (r < positive_count ? pos[r] : neg[r - positive_count]) = r;

  PatternHistogram acc;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng(mix(seed, {0xBA5E, s}));
    Matrix m(j, num_vars);
    for (std::size_t r = 0; r < j; ++r) {
      const double p = r < positive_count ? row_bias_pos : row_bias_neg;
      for (std::size_t c = 0; c < num_vars; ++c) m(r, c) = rng.bernoulli(p) ? 1.0 : -1.0;
    }
    auto h = census(m, pos, neg, formula);
    if (s == 0) {
      acc = std::move(h);
      continue;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t p = 0; p < acc.by_positives[c].size(); ++p)
        for (std::size_t k = 0; k < acc.num_clauses; ++k)
          acc.by_positives[c][p][k] += h.by_positives[c][p][k];
      for (std::size_t k = 0; k < acc.num_clauses; ++k) {
        acc.aligned[c][k] += h.aligned[c][k];
        acc.p3n1_c[c][k] += h.p3n1_c[c][k];
        acc.p3n1_nc[c][k] += h.p3n1_nc[c][k];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& v : acc.by_positives[c])
      for (double& x : v) x *= inv;
    for (double& x : acc.aligned[c]) x *= inv;
    for (double& x : acc.p3n1_c[c]) x *= inv;
    for (double& x : acc.p3n1_nc[c]) x *= inv;
  }
  return acc;
}

BiasStats bias_stats(const MlpModel& model, const Formula& formula, std::size_t output) {
  if (output >= model.outputs()) throw ArgumentError("output index out of range");
  const std::size_t cols = model.w1.cols();
  if (formula.num_vars != cols)
    throw DimensionError("formula width does not match layer-1 columns");
  std::vector<bool> clause_col(cols, false);
  for (const auto& c : formula.clauses)
    for (const auto& lit : c.literals) clause_col[lit.var] = true;

  const auto part = witness_partition(model);
  const auto positive =
      model.outputs() == 1 ? part.positive_rows : part.rows_for_output(output);

  BiasStats s;
  s.rho = part.rho();
  s.positive_rows = positive.size();
  std::array<double, 2> bias_sum{};
  std::array<std::size_t, 2> row_count{};
  std::array<std::size_t, 2> row_pos{};
  std::array<std::array<std::size_t, 2>, 2> pos_split{};
  std::array<std::array<double, 2>, 2> abs_split{};
  std::size_t negative_bias = 0;
  std::size_t all_pos = 0;

  const auto tally = [&](std::span<const std::size_t> rows, std::size_t c) {
    for (std::size_t r : rows) {
      bias_sum[c] += model.b1[r];
      ++row_count[c];
      if (c == 0 && model.b1[r] < 0.0) ++negative_bias;
      for (std::size_t col = 0; col < cols; ++col) {
        const double w = model.w1(r, col);
        const std::size_t split = clause_col[col] ? 0 : 1;
        ++s.entries_split[c][split];
        abs_split[c][split] += std::abs(w);
        if (w > 0.0) {
          ++pos_split[c][split];
          ++row_pos[c];
        }
      }
    }
  };
  tally(positive, 0);
  tally(part.negative_rows, 1);
  for (std::size_t r = 0; r < model.w1.rows(); ++r)
    for (std::size_t col = 0; col < cols; ++col) all_pos += model.w1(r, col) > 0.0 ? 1 : 0;

  const auto ratio = [](double a, std::size_t b) { return b ? a / static_cast<double>(b) : 0.0; };
  s.positive_rows_negative_bias = ratio(static_cast<double>(negative_bias), row_count[0]);
  s.mean_bias_positive_rows = ratio(bias_sum[0], row_count[0]);
  s.mean_bias_negative_rows = ratio(bias_sum[1], row_count[1]);
  s.positive_fraction = ratio(static_cast<double>(all_pos), model.w1.rows() * cols);
  for (std::size_t c = 0; c < 2; ++c) {
    s.row_positive_fraction[c] = ratio(static_cast<double>(row_pos[c]), row_count[c] * cols);
    for (std::size_t k = 0; k < 2; ++k) {
      s.positive_fraction_split[c][k] =
          ratio(static_cast<double>(pos_split[c][k]), s.entries_split[c][k]);
      s.mean_abs_split[c][k] = ratio(abs_split[c][k], s.entries_split[c][k]);
    }
  }
  return s;
}

double packing_limit(double j, double num_vars, double k, double rho) {
  if (k == 0.0) throw ArgumentError("packing limit needs k > 0");
  if (!(j > 0.0 && num_vars > 0.0 && k > 0.0 && rho > 0.0))
    throw ArgumentError("packing limit needs positive arguments");
  return j * num_vars * rho / (8.0 * k);
}

void write_histogram_csv_header(std::ostream& out) {
  out << "k,j,trial,row_class,pattern,clause,count\n";
}

void write_histogram_csv(std::ostream& out, const PatternHistogram& hist, std::size_t k,
                         std::size_t j, std::size_t trial) {
  for (std::size_t c = 0; c < 2; ++c) {
    const auto rc = to_string(static_cast<RowClass>(c));
    const auto emit = [&](std::string_view name, const std::vector<double>& v) {
      for (std::size_t i = 0; i < v.size(); ++i)
        out << k << ',' << j << ',' << trial << ',' << rc << ',' << name << ',' << i << ','
            << v[i] << '\n';
    };
    for (std::size_t p = hist.by_positives[c].size(); p-- > 0;)
      emit(pattern_name(p, hist.clause_size), hist.by_positives[c][p]);
    emit("aligned", hist.aligned[c]);
    if (std::find(hist.one_negated.begin(), hist.one_negated.end(), true) !=
        hist.one_negated.end()) {
      emit("3P1Nc", hist.p3n1_c[c]);
      emit("3P1Nnc", hist.p3n1_nc[c]);
    }
  }
}

}  // namespace fcc
