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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fcc {

struct Literal {
  std::uint32_t var = 0;
  bool negated = false;

  // True when the literal is satisfied by `bit`.
  bool satisfied_by(std::uint8_t bit) const noexcept { return (bit != 0) != negated; }

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct Clause {
  // Sorted by variable index; no variable repeats.
  std::vector<Literal> literals;

  std::size_t size() const noexcept { return literals.size(); }
  std::size_t negated_count() const noexcept;

  friend bool operator==(const Clause&, const Clause&) = default;
};

enum class FormulaKind { kDnf, kCnf, kOr };

std::string_view to_string(FormulaKind kind);
FormulaKind formula_kind_from_string(std::string_view name);

// A two-level Boolean formula over variables x0..x{num_vars-1}.
//   kDnf: OR over clauses, each clause an AND of literals.
//   kCnf: AND over clauses, each clause an OR of literals.
//   kOr:  OR over single-literal clauses.
struct Formula {
  FormulaKind kind = FormulaKind::kDnf;
  std::size_t num_vars = 0;
  std::vector<Clause> clauses;

  friend bool operator==(const Formula&, const Formula&) = default;
};

// Checks the structural invariants; throws ArgumentError naming the first
// violation.
void validate(const Formula& formula);

// Sorts each clause's literals by variable index.
Clause make_clause(std::vector<Literal> literals);

// Truth value of `formula` on `input`. Throws DimensionError when
// input.size() != formula.num_vars.
bool eval(const Formula& formula, std::span<const std::uint8_t> input);

// Same as eval() for a single clause under the formula's kind (AND for DNF,
// OR for CNF and OR formulas). No length check.
bool eval_clause(const Clause& clause, FormulaKind kind, std::span<const std::uint8_t> input);

// DNF of num_vars / 2 positive 2-ANDs partitioning the variables.
Formula random_paired_and(std::size_t num_vars, std::uint64_t seed);

// DNF of `num_clauses` clauses with `clause_size` distinct variables each,
// exactly `negatives_per_clause` of them negated.
Formula random_dnf(std::size_t num_vars, std::size_t num_clauses, std::size_t clause_size,
                   std::size_t negatives_per_clause, std::uint64_t seed);

// DNF whose clauses partition the variables: num_vars / clause_size clauses,
// every variable used exactly once. Used for the multi-output task.
Formula random_partition_dnf(std::size_t num_vars, std::size_t clause_size,
                             std::size_t negatives_per_clause, std::uint64_t seed);

// CNF of num_vars / 2 positive 2-ORs partitioning the variables.
Formula random_cnf_pairs(std::size_t num_vars, std::uint64_t seed);

// OR of every variable.
Formula all_variables_or(std::size_t num_vars);

// For a CNF with positive literals, the DNF over negated literals whose
// negation is logically equivalent to the input:
//   AND_i OR_j x_ij  ==  NOT OR_i AND_j NOT x_ij
Formula demorgan_dual(const Formula& cnf);

// Text form: DNF "(x3 & x11) | (x9 & !x13)", CNF "(x3 | x11) & (x9 | x12)",
// OR "x0 | x1 | x2". An empty DNF or OR prints as "false", an empty CNF as
// "true".
std::string to_text(const Formula& formula);

// Parses the text form. num_vars defaults to one past the largest variable
// index. `kind_hint` disambiguates inputs such as "x3" or "false" whose kind
// the text cannot determine. Throws FormatError on malformed text.
Formula parse_formula(std::string_view text, std::optional<std::size_t> num_vars = std::nullopt,
                      std::optional<FormulaKind> kind_hint = std::nullopt);

}  // namespace fcc
