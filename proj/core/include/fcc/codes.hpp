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
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fcc/formula.hpp"
#include "fcc/matrix.hpp"
#include "fcc/model.hpp"
#include "fcc/sampler.hpp"

namespace fcc {

// Feature id (clause index or window start) to the positive-witness rows
// that code it.
struct CodeSet {
  std::vector<std::vector<std::size_t>> rows;  // sorted per feature
  // weights[f][n]: layer-1 entries of rows[f][n] at the feature's columns
  std::vector<std::vector<std::vector<double>>> weights;

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t zero_code_count() const noexcept;
  std::vector<std::size_t> unique_rows() const;
};

// Rows positive for `output` whose signs at the clause columns match the
// literal polarities (4P, 3P1Nc, 2P, ...).
CodeSet clause_codes(const MlpModel& model, const Formula& formula, std::size_t output = 0);
CodeSet clause_codes(const Matrix& layer1, std::span<const std::size_t> positive_rows,
                     const Formula& formula);

struct OverlapStats {
  std::optional<double> mean_overlap;    // absent with fewer than two coded features
  std::optional<double> mean_code_size;  // over coded features only
  std::size_t coded = 0;
  std::size_t zero_code = 0;
};

OverlapStats overlap_stats(const CodeSet& codes);

struct Pairing {
  std::vector<std::size_t> partner;  // per column
  std::vector<std::size_t> zero_variance_columns;
};

Pairing reconstruct_pairs(const Matrix& w1);

// Fraction of paired variables whose partner was recovered.
double pairing_accuracy(const Pairing& pairing, const Formula& formula);

Matrix column_correlation_matrix(const Matrix& w1);

// Rows with a positive layer-2 weight and `run` consecutive positive
// layer-1 weights starting at each position.
CodeSet window_codes(const MlpModel& model, std::size_t run = 4);

enum class BiasMode {
  kSubtractSigned,     // S - b
  kSubtractMagnitude,  // S - |b|
};

struct DecoderConfig {
  std::size_t window = 8;
  std::size_t run = 4;
  double slack_factor = 1.9;
  BiasMode bias_mode = BiasMode::kSubtractSigned;
};

void validate(const DecoderConfig& config);

// Columns [first, last] of the maximum window for a run starting at `start`.
std::pair<std::size_t, std::size_t> decoder_window(std::size_t start, std::size_t num_vars,
                                                   const DecoderConfig& config);

std::vector<std::size_t> decode_positions(const MlpModel& model, const CodeSet& codes,
                                          std::span<const std::uint8_t> input,
                                          const DecoderConfig& config);

std::vector<std::size_t> scan_truth(std::span<const std::uint8_t> input, std::size_t run = 4);

struct DecoderEvaluation {
  double decision_fpr = 0.0;
  double decision_fnr = 0.0;
  double fully_correct = 0.0;
  std::size_t positives = 0;  // samples with a true run
  std::size_t negatives = 0;
  double decision_error() const noexcept { return 0.5 * (decision_fpr + decision_fnr); }
};

DecoderEvaluation evaluate_decoder(const MlpModel& model, const CodeSet& codes,
                                   const Dataset& data, const DecoderConfig& config);

struct CodingSummary {
  std::size_t unique_rows = 0;
  double mean_rows_per_position = 0.0;
  double negative_bias_fraction = 0.0;  // over unique coding rows
  std::size_t positions_with_code = 0;
};

CodingSummary summarize_codes(const MlpModel& model, const CodeSet& codes);

void write_codes(std::ostream& out, const CodeSet& codes);

}  // namespace fcc
