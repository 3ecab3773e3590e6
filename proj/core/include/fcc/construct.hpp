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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcc/formula.hpp"
#include "fcc/model.hpp"

namespace fcc {

struct PlantedSpec {
  std::size_t num_vars = 0;
  std::size_t hidden = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::vector<std::size_t>> codes;  // rows per pair
  double bias = -1.0;
  std::vector<double> w2;  // per row; empty means 1 on code rows and 0 elsewhere
};

void validate(const PlantedSpec& spec);

// Identity embedding, no output bias.
MlpModel build_planted(const PlantedSpec& spec);

// DNF with one 2-AND clause per pair.
Formula planted_formula(const PlantedSpec& spec);

inline constexpr std::size_t kMaxExactVars = 20;

struct ExactCheck {
  bool exact = true;
  std::size_t mismatches = 0;
  std::size_t checked = 0;
  std::optional<std::vector<std::uint8_t>> counterexample;  // first mismatch
  bool expected = false;  // formula value at the counterexample
};

// Compares logit > 0 on output 0 against the formula on every input.
ExactCheck verify_exact(const MlpModel& model, const Formula& formula);

std::string planted_to_json(const PlantedSpec& spec);
PlantedSpec planted_from_json(const std::string& text);

}  // namespace fcc
