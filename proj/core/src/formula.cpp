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

#include "fcc/formula.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "fcc/error.hpp"
#include "fcc/rng.hpp"

namespace fcc {

std::size_t Clause::negated_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(literals.begin(), literals.end(), [](const Literal& l) { return l.negated; }));
}

std::string_view to_string(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::kDnf:
      return "DNF";
    case FormulaKind::kCnf:
      return "CNF";
    case FormulaKind::kOr:
      return "OR";
  }
  return "?";
}

FormulaKind formula_kind_from_string(std::string_view name) {
  if (name == "DNF" || name == "dnf") return FormulaKind::kDnf;
  if (name == "CNF" || name == "cnf") return FormulaKind::kCnf;
  if (name == "OR" || name == "or") return FormulaKind::kOr;
  throw FormatError("unknown formula kind '" + std::string(name) + "'");
}

void validate(const Formula& formula) {
  for (std::size_t c = 0; c < formula.clauses.size(); ++c) {
    const auto& lits = formula.clauses[c].literals;
    if (lits.empty()) throw ArgumentError("clause " + std::to_string(c) + " is empty");
    if (formula.kind == FormulaKind::kOr && lits.size() != 1) {
      throw ArgumentError("OR formula clause " + std::to_string(c) + " has " +
                          std::to_string(lits.size()) + " literals");
    }
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (lits[i].var >= formula.num_vars) {
        throw ArgumentError("clause " + std::to_string(c) + " uses x" +
                            std::to_string(lits[i].var) + " but the formula has " +
                            std::to_string(formula.num_vars) + " variables");
      }
      if (i > 0 && lits[i - 1].var >= lits[i].var) {
        throw ArgumentError("clause " + std::to_string(c) +
                            " is not sorted or repeats a variable");
      }
    }
  }
}

Clause make_clause(std::vector<Literal> literals) {
  std::sort(literals.begin(), literals.end());
  return Clause{std::move(literals)};
}

bool eval_clause(const Clause& clause, FormulaKind kind, std::span<const std::uint8_t> input) {
  if (kind == FormulaKind::kDnf) {
    return std::all_of(clause.literals.begin(), clause.literals.end(),
                       [&](const Literal& l) { return l.satisfied_by(input[l.var]); });
  }
  return std::any_of(clause.literals.begin(), clause.literals.end(),
                     [&](const Literal& l) { return l.satisfied_by(input[l.var]); });
}

bool eval(const Formula& formula, std::span<const std::uint8_t> input) {
  if (input.size() != formula.num_vars) {
    throw DimensionError("input has " + std::to_string(input.size()) +
                         " bits, formula has " + std::to_string(formula.num_vars) +
                         " variables");
  }
  const auto holds = [&](const Clause& c) { return eval_clause(c, formula.kind, input); };
  if (formula.kind == FormulaKind::kCnf) {
    return std::all_of(formula.clauses.begin(), formula.clauses.end(), holds);
  }
  return std::any_of(formula.clauses.begin(), formula.clauses.end(), holds);
}

namespace {

std::vector<std::size_t> shuffled_variables(std::size_t num_vars, Rng& rng) {
  std::vector<std::size_t> vars(num_vars);
  std::iota(vars.begin(), vars.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(vars));
  return vars;
}

Clause clause_from(std::span<const std::size_t> vars, std::size_t negatives, Rng& rng) {
  std::vector<Literal> lits;
  lits.reserve(vars.size());
  for (std::size_t v : vars) lits.push_back({static_cast<std::uint32_t>(v), false});
  for (std::size_t i : rng.choose(lits.size(), negatives)) lits[i].negated = true;
  return make_clause(std::move(lits));
}

Formula partition_formula(FormulaKind kind, std::size_t num_vars, std::size_t group,
                          std::size_t negatives, std::uint64_t seed) {
  Rng rng(seed);
  const auto vars = shuffled_variables(num_vars, rng);
  Formula f{kind, num_vars, {}};
  for (std::size_t start = 0; start + group <= num_vars; start += group) {
    f.clauses.push_back(clause_from(std::span(vars).subspan(start, group), negatives, rng));
  }
  return f;
}

}  // namespace

Formula random_paired_and(std::size_t num_vars, std::uint64_t seed) {
  if (num_vars % 2 != 0) {
    throw ArgumentError("paired AND needs an even variable count, got " +
                        std::to_string(num_vars));
  }
  return partition_formula(FormulaKind::kDnf, num_vars, 2, 0, seed);
}

Formula random_dnf(std::size_t num_vars, std::size_t num_clauses, std::size_t clause_size,
                   std::size_t negatives_per_clause, std::uint64_t seed) {
  if (clause_size == 0 || clause_size > num_vars) {
    throw ArgumentError("clause size " + std::to_string(clause_size) + " infeasible for " +
                        std::to_string(num_vars) + " variables");
  }
  if (negatives_per_clause > clause_size) {
    throw ArgumentError("more negated literals than clause size");
  }
  Rng rng(seed);
  Formula f{FormulaKind::kDnf, num_vars, {}};
  f.clauses.reserve(num_clauses);
  for (std::size_t c = 0; c < num_clauses; ++c) {
    const auto vars = rng.choose(num_vars, clause_size);
    f.clauses.push_back(clause_from(vars, negatives_per_clause, rng));
  }
  return f;
}

Formula random_partition_dnf(std::size_t num_vars, std::size_t clause_size,
                             std::size_t negatives_per_clause, std::uint64_t seed) {
  if (clause_size == 0 || num_vars % clause_size != 0) {
    throw ArgumentError("clause size " + std::to_string(clause_size) + " does not divide " +
                        std::to_string(num_vars));
  }
  if (negatives_per_clause > clause_size) {
    throw ArgumentError("more negated literals than clause size");
  }
  return partition_formula(FormulaKind::kDnf, num_vars, clause_size, negatives_per_clause,
                           seed);
}

Formula random_cnf_pairs(std::size_t num_vars, std::uint64_t seed) {
  if (num_vars % 2 != 0) {
    throw ArgumentError("paired CNF needs an even variable count, got " +
                        std::to_string(num_vars));
  }
  return partition_formula(FormulaKind::kCnf, num_vars, 2, 0, seed);
}

Formula all_variables_or(std::size_t num_vars) {
  Formula f{FormulaKind::kOr, num_vars, {}};
  for (std::size_t v = 0; v < num_vars; ++v) {
    f.clauses.push_back(Clause{{Literal{static_cast<std::uint32_t>(v), false}}});
  }
  return f;
}

Formula demorgan_dual(const Formula& cnf) {
  if (cnf.kind != FormulaKind::kCnf) {
    throw ArgumentError("demorgan_dual expects a CNF formula, got " +
                        std::string(to_string(cnf.kind)));
  }
  Formula dual{FormulaKind::kDnf, cnf.num_vars, {}};
  dual.clauses.reserve(cnf.clauses.size());
  for (const auto& clause : cnf.clauses) {
    Clause negated = clause;
    for (auto& lit : negated.literals) {
      if (lit.negated) throw ArgumentError("demorgan_dual expects positive literals");
      lit.negated = true;
    }
    dual.clauses.push_back(std::move(negated));
  }
  return dual;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string literal_text(const Literal& l) {
  return (l.negated ? "!x" : "x") + std::to_string(l.var);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  struct Group {
    std::vector<Literal> literals;
    char op = 0;  // operator inside the group; 0 for a single literal
    bool parenthesized = false;
  };

  std::vector<Group> groups;
  char top_op = 0;

  void parse() {
    skip_ws();
    if (at_end()) fail("empty formula");
    groups.push_back(parse_group());
    while (true) {
      skip_ws();
      if (at_end()) break;
      const char op = text_[pos_];
      if (op != '&' && op != '|') fail("expected '&' or '|'");
      if (top_op != 0 && op != top_op) fail("mixed top-level operators need parentheses");
      top_op = op;
      ++pos_;
      groups.push_back(parse_group());
    }
  }

 private:
  Group parse_group() {
    skip_ws();
    Group g;
    if (!at_end() && text_[pos_] == '(') {
      ++pos_;
      g.parenthesized = true;
      g.literals.push_back(parse_literal());
      while (true) {
        skip_ws();
        if (at_end()) fail("unterminated '('");
        const char c = text_[pos_];
        if (c == ')') {
          ++pos_;
          break;
        }
        if (c != '&' && c != '|') fail("expected '&', '|' or ')'");
        if (g.op != 0 && g.op != c) fail("mixed operators inside a clause");
        g.op = c;
        ++pos_;
        g.literals.push_back(parse_literal());
      }
    } else {
      g.literals.push_back(parse_literal());
    }
    return g;
  }

  Literal parse_literal() {
    skip_ws();
    Literal lit;
    if (!at_end() && (text_[pos_] == '!' || text_[pos_] == '~')) {
      lit.negated = true;
      ++pos_;
      skip_ws();
    }
    if (at_end() || text_[pos_] != 'x') fail("expected a variable like x3");
    ++pos_;
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > UINT32_MAX) fail("variable index too large");
      ++pos_;
    }
    if (pos_ == start) fail("missing variable index");
    lit.var = static_cast<std::uint32_t>(value);
    return lit;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("formula text, position " + std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_text(const Formula& formula) {
  if (formula.clauses.empty()) return formula.kind == FormulaKind::kCnf ? "true" : "false";
  std::string out;
  if (formula.kind == FormulaKind::kOr) {
    for (std::size_t c = 0; c < formula.clauses.size(); ++c) {
      if (c > 0) out += " | ";
      out += literal_text(formula.clauses[c].literals.front());
    }
    return out;
  }
  const bool dnf = formula.kind == FormulaKind::kDnf;
  const char* inner = dnf ? " & " : " | ";
  const char* outer = dnf ? " | " : " & ";
  for (std::size_t c = 0; c < formula.clauses.size(); ++c) {
    if (c > 0) out += outer;
    out += '(';
    const auto& lits = formula.clauses[c].literals;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i > 0) out += inner;
      out += literal_text(lits[i]);
    }
    out += ')';
  }
  return out;
}

Formula parse_formula(std::string_view text, std::optional<std::size_t> num_vars,
                      std::optional<FormulaKind> kind_hint) {
  const auto body = trim(text);
  Formula f;
  if (body == "true" || body == "false") {
    f.kind = kind_hint.value_or(body == "true" ? FormulaKind::kCnf : FormulaKind::kDnf);
    f.num_vars = num_vars.value_or(0);
    return f;
  }

  Parser parser(body);
  parser.parse();

  const bool any_parens = std::any_of(parser.groups.begin(), parser.groups.end(),
                                      [](const auto& g) { return g.parenthesized; });
  char inner_op = 0;
  for (const auto& g : parser.groups) {
    if (g.op == 0) continue;
    if (inner_op != 0 && g.op != inner_op) throw FormatError("clauses use different operators");
    inner_op = g.op;
  }
  if (inner_op != 0 && parser.top_op == inner_op) {
    throw FormatError("clause operator must differ from the top-level operator");
  }

  if (!any_parens) {
    // Bare literals: "a | b | c" is an OR formula, "a & b" a single AND.
    if (parser.top_op == '&') {
      f.kind = FormulaKind::kDnf;
      std::vector<Literal> lits;
      for (const auto& g : parser.groups) lits.push_back(g.literals.front());
      f.clauses.push_back(make_clause(std::move(lits)));
    } else {
      f.kind = parser.top_op == '|' ? FormulaKind::kOr
                                    : kind_hint.value_or(FormulaKind::kDnf);
      for (const auto& g : parser.groups) f.clauses.push_back(Clause{{g.literals.front()}});
    }
  } else {
    if (inner_op == '&' || parser.top_op == '|') {
      f.kind = FormulaKind::kDnf;
    } else if (inner_op == '|' || parser.top_op == '&') {
      f.kind = FormulaKind::kCnf;
    } else {
      f.kind = kind_hint.value_or(FormulaKind::kDnf);
    }
    if (kind_hint && *kind_hint != f.kind && !(inner_op == 0 && parser.top_op == 0)) {
      throw FormatError("text describes a " + std::string(to_string(f.kind)) +
                        " formula, expected " + std::string(to_string(*kind_hint)));
    }
    for (auto& g : parser.groups) f.clauses.push_back(make_clause(std::move(g.literals)));
  }

  std::size_t max_var = 0;
  for (const auto& c : f.clauses)
    for (const auto& l : c.literals) max_var = std::max<std::size_t>(max_var, l.var + 1);
  f.num_vars = num_vars.value_or(max_var);
  try {
    validate(f);
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
  return f;
}

}  // namespace fcc
