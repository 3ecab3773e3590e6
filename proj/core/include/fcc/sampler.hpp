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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcc/formula.hpp"

namespace fcc {

// Input distributions used by the experiments.
enum class Distribution {
  kPaired,           // 2..6 true bits, balanced labels, for paired 2-AND DNFs
  kDnf4,             // satisfy-one-clause / break-one-clause, 4-literal DNFs
  kOr,               // i.i.d. Bernoulli(0.043) bits, OR of all variables
  kCnf,              // i.i.d. Bernoulli(0.75) bits, pair CNFs
  kConsecutiveFour,  // six ones inside an 8-bit window
  kMulti,            // one 4-literal DNF per output, uniform label combination
};

std::string_view to_string(Distribution d);
Distribution distribution_from_string(std::string_view name);

struct Sample {
  std::span<const std::uint8_t> input;
  std::span<const std::uint8_t> labels;
};

// Labeled binary samples stored row-major: one num_vars-wide input row and
// one num_outputs-wide label row per sample.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t num_vars, std::size_t num_outputs, std::string spec_name,
          std::uint64_t seed);

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::size_t num_vars() const noexcept { return num_vars_; }
  std::size_t num_outputs() const noexcept { return num_outputs_; }
  const std::string& spec_name() const noexcept { return spec_name_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::span<const std::uint8_t> input(std::size_t i) const noexcept {
    return {inputs_.data() + i * num_vars_, num_vars_};
  }
  std::span<const std::uint8_t> labels(std::size_t i) const noexcept {
    return {labels_.data() + i * num_outputs_, num_outputs_};
  }
  Sample operator[](std::size_t i) const noexcept { return {input(i), labels(i)}; }

  // Throws DimensionError on width mismatch.
  void add(std::span<const std::uint8_t> input, std::span<const std::uint8_t> labels);
  void reserve(std::size_t n);

  // Label combinations abandoned by the multi-output sampler after the retry
  // cap; each one was replaced by a fresh draw.
  std::size_t skipped = 0;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t num_vars_ = 0;
  std::size_t num_outputs_ = 0;
  std::string spec_name_;
  std::uint64_t seed_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> inputs_;
  std::vector<std::uint8_t> labels_;
};

inline constexpr std::size_t kResampleCap = 100;
inline constexpr double kOrBitProbability = 0.043;
inline constexpr double kCnfBitProbability = 0.75;

Dataset sample_paired(const Formula& formula, std::size_t n, std::uint64_t seed);
Dataset sample_dnf4(const Formula& formula, std::size_t n, std::uint64_t seed);
Dataset sample_or(std::size_t num_vars, std::size_t n, std::uint64_t seed,
                  double p = kOrBitProbability);
Dataset sample_cnf(const Formula& formula, std::size_t n, std::uint64_t seed,
                   double p = kCnfBitProbability);
Dataset sample_consecutive_four(std::size_t num_vars, std::size_t n, std::uint64_t seed);
Dataset sample_multi(std::span<const Formula> formulas, std::size_t n, std::uint64_t seed);

// Dispatches on `d`. kOr and kConsecutiveFour ignore `formulas` (except to
// read num_vars when given); kMulti uses all of them, the rest use the first.
Dataset generate(Distribution d, std::span<const Formula> formulas, std::size_t num_vars,
                 std::size_t n, std::uint64_t seed);

// True when every stored label equals the oracle value of the matching formula.
bool labels_match(const Dataset& data, std::span<const Formula> formulas);

// DNF over every window of `run` consecutive variables; the label function of
// the consecutive-four task.
Formula consecutive_run_formula(std::size_t num_vars, std::size_t run = 4);

// Text file: a header line
//   # fcc-dataset num_vars=16 num_outputs=1 spec=paired seed=42
// then one line per sample: input bits as 0/1 characters, a tab, label bits.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

}  // namespace fcc
