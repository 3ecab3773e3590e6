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

#include "fcc/codes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "fcc/error.hpp"
#include "fcc/patterns.hpp"

namespace fcc {
namespace {

struct ColumnMoments {
  std::vector<double> mean;
  std::vector<double> norm;  // sqrt of summed squared deviations
};

ColumnMoments moments(const Matrix& m) {
  ColumnMoments out{std::vector<double>(m.cols(), 0.0), std::vector<double>(m.cols(), 0.0)};
  const double n = static_cast<double>(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out.mean[c] += m(r, c);
  for (double& x : out.mean) x /= n;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double d = m(r, c) - out.mean[c];
      out.norm[c] += d * d;
    }
  for (double& x : out.norm) x = std::sqrt(x);
  return out;
}

double pearson(const Matrix& m, const ColumnMoments& mo, std::size_t a, std::size_t b) {
  if (mo.norm[a] == 0.0 || mo.norm[b] == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    s += (m(r, a) - mo.mean[a]) * (m(r, b) - mo.mean[b]);
  return s / (mo.norm[a] * mo.norm[b]);
}

}  // namespace

std::size_t CodeSet::zero_code_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.empty(); }));
}

std::vector<std::size_t> CodeSet::unique_rows() const {
  std::set<std::size_t> all;
  for (const auto& r : rows) all.insert(r.begin(), r.end());
  return {all.begin(), all.end()};
}

CodeSet clause_codes(const Matrix& layer1, std::span<const std::size_t> positive_rows,
                     const Formula& formula) {
  validate(formula);
  if (layer1.cols() != formula.num_vars)
    throw DimensionError("layer-1 matrix width does not match the formula");
  std::vector<std::size_t> sorted(positive_rows.begin(), positive_rows.end());
  std::sort(sorted.begin(), sorted.end());
  CodeSet codes;
  codes.rows.resize(formula.clauses.size());
  codes.weights.resize(formula.clauses.size());
  for (std::size_t k = 0; k < formula.clauses.size(); ++k) {
    const auto& lits = formula.clauses[k].literals;
    for (std::size_t r : sorted) {
      const bool aligned = std::all_of(lits.begin(), lits.end(), [&](const Literal& lit) {
        return (layer1(r, lit.var) > 0.0) != lit.negated;
      });
      if (!aligned) continue;
      codes.rows[k].push_back(r);
      std::vector<double> w;
      for (const auto& lit : lits) w.push_back(layer1(r, lit.var));
      codes.weights[k].push_back(std::move(w));
    }
  }
  return codes;
}

CodeSet clause_codes(const MlpModel& model, const Formula& formula, std::size_t output) {
  if (output >= model.outputs()) throw ArgumentError("output index out of range");
  const auto part = witness_partition(model);
  const auto positive =
      model.outputs() == 1 ? part.positive_rows : part.rows_for_output(output);
  return clause_codes(model.w1, positive, formula);
}

OverlapStats overlap_stats(const CodeSet& codes) {
  OverlapStats s;
  std::vector<const std::vector<std::size_t>*> coded;
  for (const auto& r : codes.rows) {
    if (r.empty()) {
      ++s.zero_code;
    } else {
      coded.push_back(&r);
    }
  }
  s.coded = coded.size();
  if (coded.empty()) return s;
  double size_sum = 0.0;
  for (const auto* r : coded) size_sum += static_cast<double>(r->size());
  s.mean_code_size = size_sum / static_cast<double>(coded.size());
  if (coded.size() < 2) return s;
  double overlap = 0.0;
  std::size_t pairs = 0;
  std::vector<std::size_t> common;
  for (std::size_t a = 0; a < coded.size(); ++a) {
    for (std::size_t b = a + 1; b < coded.size(); ++b) {
      common.clear();
      std::set_intersection(coded[a]->begin(), coded[a]->end(), coded[b]->begin(),
                            coded[b]->end(), std::back_inserter(common));
      overlap += static_cast<double>(common.size());
      ++pairs;
    }
  }
  s.mean_overlap = overlap / static_cast<double>(pairs);
  return s;
}

Pairing reconstruct_pairs(const Matrix& w1) {
  if (w1.cols() < 2) throw ArgumentError("pair reconstruction needs at least two columns");
  Matrix abs_w(w1.rows(), w1.cols());
  for (std::size_t r = 0; r < w1.rows(); ++r)
    for (std::size_t c = 0; c < w1.cols(); ++c) abs_w(r, c) = std::abs(w1(r, c));
  const auto mo = moments(abs_w);
  Pairing p;
  p.partner.resize(w1.cols());
  for (std::size_t c = 0; c < w1.cols(); ++c)
    if (mo.norm[c] == 0.0) p.zero_variance_columns.push_back(c);
  for (std::size_t i = 0; i < w1.cols(); ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    double best_corr = -INFINITY;
    for (std::size_t j = 0; j < w1.cols(); ++j) {
      if (j == i) continue;
      const double corr = pearson(abs_w, mo, i, j);
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    p.partner[i] = best;
  }
  return p;
}

double pairing_accuracy(const Pairing& pairing, const Formula& formula) {
  if (pairing.partner.size() != formula.num_vars)
    throw DimensionError("pairing width does not match the formula");
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& c : formula.clauses) {
    if (c.size() != 2) throw ArgumentError("pairing accuracy needs 2-literal clauses");
    const auto a = c.literals[0].var;
    const auto b = c.literals[1].var;
    total += 2;
    correct += pairing.partner[a] == b ? 1 : 0;
    correct += pairing.partner[b] == a ? 1 : 0;
  }
  if (total == 0) throw ArgumentError("formula has no pairs");
  return static_cast<double>(correct) / static_cast<double>(total);
}

Matrix column_correlation_matrix(const Matrix& w1) {
  const auto mo = moments(w1);
  const std::size_t n = w1.cols();
  Matrix out(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    out(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = pearson(w1, mo, a, b);
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return out;
}

CodeSet window_codes(const MlpModel& model, std::size_t run) {
  if (model.outputs() != 1) throw ArgumentError("window codes need a single-output model");
  const std::size_t width = model.w1.cols();
  if (run == 0 || run > width) throw ArgumentError("run length out of range");
  const auto part = witness_partition(model);
  CodeSet codes;
  const std::size_t positions = width - run + 1;
  codes.rows.resize(positions);
  codes.weights.resize(positions);
  for (std::size_t i = 0; i < positions; ++i) {
    for (std::size_t r : part.positive_rows) {
      bool ok = true;
      for (std::size_t c = i; c < i + run && ok; ++c) ok = model.w1(r, c) > 0.0;
      if (!ok) continue;
      codes.rows[i].push_back(r);
      codes.weights[i].emplace_back(model.w1.row(r).begin() + static_cast<std::ptrdiff_t>(i),
                                    model.w1.row(r).begin() + static_cast<std::ptrdiff_t>(i + run));
    }
  }
  return codes;
}

void validate(const DecoderConfig& config) {
  if (config.run == 0) throw ArgumentError("decoder run must be positive");
  if (config.run > config.window) throw ArgumentError("decoder run exceeds its window");
  if (!(config.slack_factor >= 0.0)) throw ArgumentError("slack factor must be non-negative");
}

std::pair<std::size_t, std::size_t> decoder_window(std::size_t start, std::size_t num_vars,
                                                   const DecoderConfig& config) {
  // The run sits in the middle of the window; edges are clipped.
  const auto lead = static_cast<std::ptrdiff_t>((config.window - config.run) / 2);
  const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(start) - lead;
  const std::ptrdiff_t last = first + static_cast<std::ptrdiff_t>(config.window) - 1;
  return {static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, first)),
          static_cast<std::size_t>(
              std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(num_vars) - 1, last))};
}

std::vector<std::size_t> decode_positions(const MlpModel& model, const CodeSet& codes,
                                          std::span<const std::uint8_t> input,
                                          const DecoderConfig& config) {
  validate(config);
  const std::size_t width = model.w1.cols();
  if (codes.size() + config.run != width + 1)
    throw DimensionError("codes do not match the model width and run length");
  const auto act = hidden_activations(model, input);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes.rows[i].empty()) continue;
    const auto [lo, hi] = decoder_window(i, width, config);
    bool all = true;
    for (std::size_t r : codes.rows[i]) {
      double s = 0.0;
      for (std::size_t c = i; c < i + config.run; ++c) s += model.w1(r, c);
      double m = -INFINITY;
      for (std::size_t c = lo; c <= hi; ++c) m = std::max(m, model.w1(r, c));
      const double b =
          config.bias_mode == BiasMode::kSubtractSigned ? model.b1[r] : std::abs(model.b1[r]);
      if (act[r] < s - b - config.slack_factor * m) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> scan_truth(std::span<const std::uint8_t> input, std::size_t run) {
  if (run == 0) throw ArgumentError("run length must be positive");
  std::vector<std::size_t> out;
  std::size_t streak = 0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    streak = input[i] ? streak + 1 : 0;
    if (streak >= run) out.push_back(i + 1 - run);
  }
  return out;
}

DecoderEvaluation evaluate_decoder(const MlpModel& model, const CodeSet& codes,
                                   const Dataset& data, const DecoderConfig& config) {
  DecoderEvaluation e;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.input(i);
    const auto truth = scan_truth(x, config.run);
    const auto got = decode_positions(model, codes, x, config);
    if (truth.empty()) {
      ++e.negatives;
      false_pos += got.empty() ? 0 : 1;
    } else {
      ++e.positives;
      false_neg += got.empty() ? 1 : 0;
    }
    exact += got == truth ? 1 : 0;
  }
  const auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  e.decision_fpr = ratio(false_pos, e.negatives);
  e.decision_fnr = ratio(false_neg, e.positives);
  e.fully_correct = ratio(exact, data.size());
  return e;
}

CodingSummary summarize_codes(const MlpModel& model, const CodeSet& codes) {
  CodingSummary s;
  const auto unique = codes.unique_rows();
  s.unique_rows = unique.size();
  std::size_t total = 0;
  for (const auto& r : codes.rows) {
    total += r.size();
    s.positions_with_code += r.empty() ? 0 : 1;
  }
  if (!codes.rows.empty())
    s.mean_rows_per_position = static_cast<double>(total) / static_cast<double>(codes.size());
  std::size_t negative = 0;
  for (std::size_t r : unique) negative += model.b1[r] < 0.0 ? 1 : 0;
  if (!unique.empty())
    s.negative_bias_fraction = static_cast<double>(negative) / static_cast<double>(unique.size());
  return s;
}

void write_codes(std::ostream& out, const CodeSet& codes) {
  for (std::size_t f = 0; f < codes.size(); ++f) {
    out << f << ':';
    for (std::size_t r : codes.rows[f]) out << ' ' << r;
    out << '\n';
  }
}

}  // namespace fcc
