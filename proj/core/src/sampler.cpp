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

#include "fcc/sampler.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fcc/error.hpp"
#include "fcc/rng.hpp"

namespace fcc {

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::kPaired:
      return "paired";
    case Distribution::kDnf4:
      return "dnf4";
    case Distribution::kOr:
      return "or";
    case Distribution::kCnf:
      return "cnf";
    case Distribution::kConsecutiveFour:
      return "consecutive4";
    case Distribution::kMulti:
      return "multi";
  }
  return "?";
}

Distribution distribution_from_string(std::string_view name) {
  for (auto d : {Distribution::kPaired, Distribution::kDnf4, Distribution::kOr,
                 Distribution::kCnf, Distribution::kConsecutiveFour, Distribution::kMulti}) {
    if (to_string(d) == name) return d;
  }
  throw FormatError("unknown distribution '" + std::string(name) + "'");
}

Dataset::Dataset(std::size_t num_vars, std::size_t num_outputs, std::string spec_name,
                 std::uint64_t seed)
    : num_vars_(num_vars), num_outputs_(num_outputs), spec_name_(std::move(spec_name)),
      seed_(seed) {}

void Dataset::add(std::span<const std::uint8_t> input, std::span<const std::uint8_t> labels) {
  if (input.size() != num_vars_ || labels.size() != num_outputs_) {
    throw DimensionError("sample shape " + std::to_string(input.size()) + "/" +
                         std::to_string(labels.size()) + " does not match dataset " +
                         std::to_string(num_vars_) + "/" + std::to_string(num_outputs_));
  }
  inputs_.insert(inputs_.end(), input.begin(), input.end());
  labels_.insert(labels_.end(), labels.begin(), labels.end());
  ++count_;
}

void Dataset::reserve(std::size_t n) {
  inputs_.reserve(n * num_vars_);
  labels_.reserve(n * num_outputs_);
}

namespace {

using Bits = std::vector<std::uint8_t>;

std::size_t popcount(const Bits& bits) {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

// Sets `count` currently-zero variables, drawn uniformly from `allowed`.
// Returns false when there are not enough candidates.
bool set_extras(Bits& bits, std::span<const std::size_t> allowed, std::size_t count, Rng& rng) {
  std::vector<std::size_t> free;
  free.reserve(allowed.size());
  for (std::size_t v : allowed)
    if (bits[v] == 0) free.push_back(v);
  if (free.size() < count) return false;
  for (std::size_t v : rng.choose_from<std::size_t>(free, count)) bits[v] = 1;
  return true;
}

std::vector<std::size_t> vars_outside(const Clause& clause, std::size_t num_vars) {
  std::vector<std::uint8_t> in_clause(num_vars, 0);
  for (const auto& l : clause.literals) in_clause[l.var] = 1;
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < num_vars; ++v)
    if (!in_clause[v]) out.push_back(v);
  return out;
}

void satisfy(const Clause& clause, Bits& bits) {
  for (const auto& l : clause.literals) bits[l.var] = l.negated ? 0 : 1;
}

// Satisfies every literal except `omitted`, which is made false.
void break_clause(const Clause& clause, std::size_t omitted, Bits& bits) {
  for (std::size_t i = 0; i < clause.literals.size(); ++i) {
    const auto& l = clause.literals[i];
    const bool satisfied = i != omitted;
    bits[l.var] = (satisfied != l.negated) ? 1 : 0;
  }
}

void require_dnf(const Formula& f, std::size_t clause_size, const char* who) {
  validate(f);
  if (f.kind != FormulaKind::kDnf) throw ArgumentError(std::string(who) + " needs a DNF formula");
  if (f.clauses.empty()) throw ArgumentError(std::string(who) + " needs at least one clause");
  for (const auto& c : f.clauses) {
    if (c.size() != clause_size) {
      throw ArgumentError(std::string(who) + " needs clauses of size " +
                          std::to_string(clause_size));
    }
  }
}

}  // namespace

Dataset sample_paired(const Formula& formula, std::size_t n, std::uint64_t seed) {
  require_dnf(formula, 2, "sample_paired");
  const std::size_t l = formula.num_vars;
  if (l < 6) throw ArgumentError("sample_paired needs at least 6 variables");
  Dataset data(l, 1, std::string(to_string(Distribution::kPaired)), seed);
  data.reserve(n);
  Rng rng(seed);
  std::vector<std::size_t> all(l);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Bits bits(l);
  for (std::size_t s = 0; s < n; ++s) {
    const bool positive = rng.bernoulli(0.5);
    const std::size_t count = rng.uniform_int(2, 6);
    bool done = false;
    for (std::size_t attempt = 0; attempt < kResampleCap && !done; ++attempt) {
      std::fill(bits.begin(), bits.end(), 0);
      if (positive) {
        const auto& clause = formula.clauses[rng.uniform_index(formula.clauses.size())];
        satisfy(clause, bits);
        set_extras(bits, all, count - 2, rng);
      } else {
        set_extras(bits, all, count, rng);
      }
      done = eval(formula, bits) == positive;
    }
    if (!done) throw GenerationError("sample_paired: no negative input after retry cap");
    const std::uint8_t label = positive ? 1 : 0;
    data.add(bits, std::span(&label, 1));
  }
  return data;
}

Dataset sample_dnf4(const Formula& formula, std::size_t n, std::uint64_t seed) {
  require_dnf(formula, 4, "sample_dnf4");
  const std::size_t l = formula.num_vars;
  Dataset data(l, 1, std::string(to_string(Distribution::kDnf4)), seed);
  data.reserve(n);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> outside;
  outside.reserve(formula.clauses.size());
  for (const auto& c : formula.clauses) outside.push_back(vars_outside(c, l));

  Bits bits(l);
  for (std::size_t s = 0; s < n; ++s) {
    const bool positive = rng.bernoulli(0.5);
    bool done = false;
    for (std::size_t attempt = 0; attempt < kResampleCap && !done; ++attempt) {
      std::fill(bits.begin(), bits.end(), 0);
      const std::size_t ci = rng.uniform_index(formula.clauses.size());
      const auto& clause = formula.clauses[ci];
      bool ok;
      if (positive) {
        satisfy(clause, bits);
        ok = set_extras(bits, outside[ci], rng.uniform_int(0, 2), rng);
      } else {
        break_clause(clause, rng.uniform_index(clause.size()), bits);
        const std::size_t target = rng.uniform_int(4, 6);
        const std::size_t base = popcount(bits);
        ok = base <= target && set_extras(bits, outside[ci], target - base, rng);
      }
      done = ok && eval(formula, bits) == positive;
    }
    if (!done) throw GenerationError("sample_dnf4: retry cap reached");
    const std::uint8_t label = positive ? 1 : 0;
    data.add(bits, std::span(&label, 1));
  }
  return data;
}

Dataset sample_or(std::size_t num_vars, std::size_t n, std::uint64_t seed, double p) {
  Dataset data(num_vars, 1, std::string(to_string(Distribution::kOr)), seed);
  data.reserve(n);
  Rng rng(seed);
  Bits bits(num_vars);
  for (std::size_t s = 0; s < n; ++s) {
    std::uint8_t label = 0;
    for (auto& b : bits) {
      b = rng.bernoulli(p) ? 1 : 0;
      label |= b;
    }
    data.add(bits, std::span(&label, 1));
  }
  return data;
}

Dataset sample_cnf(const Formula& formula, std::size_t n, std::uint64_t seed, double p) {
  validate(formula);
  const std::size_t l = formula.num_vars;
  Dataset data(l, 1, std::string(to_string(Distribution::kCnf)), seed);
  data.reserve(n);
  Rng rng(seed);
  Bits bits(l);
  for (std::size_t s = 0; s < n; ++s) {
    for (auto& b : bits) b = rng.bernoulli(p) ? 1 : 0;
    const std::uint8_t label = eval(formula, bits) ? 1 : 0;
    data.add(bits, std::span(&label, 1));
  }
  return data;
}

Formula consecutive_run_formula(std::size_t num_vars, std::size_t run) {
  if (run == 0 || run > num_vars) throw ArgumentError("run length out of range");
  Formula f{FormulaKind::kDnf, num_vars, {}};
  for (std::size_t start = 0; start + run <= num_vars; ++start) {
    Clause c;
    for (std::size_t v = start; v < start + run; ++v)
      c.literals.push_back({static_cast<std::uint32_t>(v), false});
    f.clauses.push_back(std::move(c));
  }
  return f;
}

namespace {

bool has_run(const Bits& bits, std::size_t run) {
  std::size_t current = 0;
  for (auto b : bits) {
    current = b ? current + 1 : 0;
    if (current >= run) return true;
  }
  return false;
}

}  // namespace

Dataset sample_consecutive_four(std::size_t num_vars, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kWindow = 8;
  constexpr std::size_t kRun = 4;
  constexpr std::size_t kNegativeAttempts = 20;
  if (num_vars < kWindow) throw ArgumentError("consecutive-four needs at least 8 variables");
  Dataset data(num_vars, 1, std::string(to_string(Distribution::kConsecutiveFour)), seed);
  data.reserve(n);
  Rng rng(seed);
  Bits bits(num_vars);
  std::vector<std::size_t> window(kWindow);
  for (std::size_t s = 0; s < n; ++s) {
    const bool positive = rng.bernoulli(0.5);
    const std::size_t start = rng.uniform_int(0, num_vars - kWindow);
    std::iota(window.begin(), window.end(), start);
    if (positive) {
      std::fill(bits.begin(), bits.end(), 0);
      const std::size_t run = start + rng.uniform_int(0, kWindow - kRun);
      for (std::size_t v = run; v < run + kRun; ++v) bits[v] = 1;
      set_extras(bits, window, 2, rng);
    } else {
      bool found = false;
      for (std::size_t attempt = 0; attempt < kNegativeAttempts && !found; ++attempt) {
        std::fill(bits.begin(), bits.end(), 0);
        const std::size_t run = start + rng.uniform_int(0, kWindow - kRun);
        const std::size_t skip = rng.uniform_index(kRun);
        for (std::size_t i = 0; i < kRun; ++i)
          if (i != skip) bits[run + i] = 1;
        set_extras(bits, window, 3, rng);
        found = !has_run(bits, kRun);
      }
      if (!found) std::fill(bits.begin(), bits.end(), 0);
    }
    const std::uint8_t label = has_run(bits, kRun) ? 1 : 0;
    data.add(bits, std::span(&label, 1));
  }
  return data;
}

Dataset sample_multi(std::span<const Formula> formulas, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kMinTrue = 8;
  constexpr std::size_t kMaxTrue = 10;
  if (formulas.empty()) throw ArgumentError("sample_multi needs at least one formula");
  const std::size_t l = formulas.front().num_vars;
  for (const auto& f : formulas) {
    require_dnf(f, 4, "sample_multi");
    if (f.num_vars != l) throw ArgumentError("sample_multi formulas disagree on num_vars");
  }
  const std::size_t outputs = formulas.size();
  if (outputs > 16) throw ArgumentError("sample_multi supports at most 16 outputs");
  Dataset data(l, outputs, std::string(to_string(Distribution::kMulti)), seed);
  data.reserve(n);
  Rng rng(seed);
  std::vector<std::size_t> all(l);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Bits bits(l);
  Bits target(outputs);
  Bits claimed(l);  // variables pinned by a clause construction

  std::size_t produced = 0;
  while (produced < n) {
    const std::uint64_t combo = rng.uniform_index(std::size_t{1} << outputs);
    for (std::size_t t = 0; t < outputs; ++t) target[t] = (combo >> t) & 1U;

    bool done = false;
    for (std::size_t attempt = 0; attempt < kResampleCap && !done; ++attempt) {
      std::fill(bits.begin(), bits.end(), 0);
      std::fill(claimed.begin(), claimed.end(), 0);
      bool consistent = true;
      for (std::size_t t = 0; t < outputs && consistent; ++t) {
        const auto& f = formulas[t];
        const auto& clause = f.clauses[rng.uniform_index(f.clauses.size())];
        Bits local = bits;
        if (target[t]) {
          satisfy(clause, local);
        } else {
          break_clause(clause, rng.uniform_index(clause.size()), local);
        }
        for (const auto& lit : clause.literals) {
          if (claimed[lit.var] && local[lit.var] != bits[lit.var]) consistent = false;
          claimed[lit.var] = 1;
        }
        bits = std::move(local);
      }
      if (!consistent) continue;
      const std::size_t want = rng.uniform_int(kMinTrue, kMaxTrue);
      const std::size_t have = popcount(bits);
      if (have > want) continue;
      std::vector<std::size_t> free;
      for (std::size_t v : all)
        if (!claimed[v]) free.push_back(v);
      if (!set_extras(bits, free, want - have, rng)) continue;
      done = true;
      for (std::size_t t = 0; t < outputs && done; ++t) {
        done = eval(formulas[t], bits) == (target[t] != 0);
      }
    }
    if (!done) {
      ++data.skipped;
      if (data.skipped > n + 1000) {
        throw GenerationError("sample_multi: label combinations repeatedly unsatisfiable");
      }
      continue;
    }
    data.add(bits, target);
    ++produced;
  }
  return data;
}

Dataset generate(Distribution d, std::span<const Formula> formulas, std::size_t num_vars,
                 std::size_t n, std::uint64_t seed) {
  const auto first = [&]() -> const Formula& {
    if (formulas.empty()) {
      throw ArgumentError("distribution '" + std::string(to_string(d)) + "' needs a formula");
    }
    return formulas.front();
  };
  switch (d) {
    case Distribution::kPaired:
      return sample_paired(first(), n, seed);
    case Distribution::kDnf4:
      return sample_dnf4(first(), n, seed);
    case Distribution::kOr:
      return sample_or(formulas.empty() ? num_vars : formulas.front().num_vars, n, seed);
    case Distribution::kCnf:
      return sample_cnf(first(), n, seed);
    case Distribution::kConsecutiveFour:
      return sample_consecutive_four(formulas.empty() ? num_vars : formulas.front().num_vars,
                                     n, seed);
    case Distribution::kMulti:
      return sample_multi(formulas, n, seed);
  }
  throw ArgumentError("unknown distribution");
}

bool labels_match(const Dataset& data, std::span<const Formula> formulas) {
  if (formulas.size() != data.num_outputs()) return false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto labels = data.labels(i);
    for (std::size_t t = 0; t < formulas.size(); ++t) {
      if (eval(formulas[t], data.input(i)) != (labels[t] != 0)) return false;
    }
  }
  return true;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << "# fcc-dataset num_vars=" << data.num_vars() << " num_outputs=" << data.num_outputs()
      << " spec=" << data.spec_name() << " seed=" << data.seed() << '\n';
  std::string line;
  for (std::size_t i = 0; i < data.size(); ++i) {
    line.clear();
    for (auto b : data.input(i)) line += b ? '1' : '0';
    line += '\t';
    for (auto b : data.labels(i)) line += b ? '1' : '0';
    line += '\n';
    out << line;
  }
}

Dataset read_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# fcc-dataset", 0) != 0) {
    throw FormatError("dataset file: missing '# fcc-dataset' header");
  }
  std::istringstream fields(header.substr(13));
  std::size_t num_vars = 0;
  std::size_t num_outputs = 0;
  std::string spec;
  std::uint64_t seed = 0;
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw FormatError("dataset header: bad field '" + field + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    try {
      if (key == "num_vars") {
        num_vars = std::stoul(value);
      } else if (key == "num_outputs") {
        num_outputs = std::stoul(value);
      } else if (key == "spec") {
        spec = value;
      } else if (key == "seed") {
        seed = std::stoull(value);
      } else {
        throw FormatError("dataset header: unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw FormatError("dataset header: bad value for '" + key + "'");
    }
  }
  if (num_vars == 0 || num_outputs == 0) throw FormatError("dataset header: missing widths");
  Dataset data(num_vars, num_outputs, spec, seed);
  std::string line;
  Bits input(num_vars);
  Bits labels(num_outputs);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.size() != num_vars + 1 + num_outputs || line[num_vars] != '\t') {
      throw FormatError("dataset line " + std::to_string(line_no) + ": wrong width");
    }
    const auto bit = [&](char c) -> std::uint8_t {
      if (c != '0' && c != '1') {
        throw FormatError("dataset line " + std::to_string(line_no) + ": non-binary character");
      }
      return c == '1' ? 1 : 0;
    };
    for (std::size_t v = 0; v < num_vars; ++v) input[v] = bit(line[v]);
    for (std::size_t t = 0; t < num_outputs; ++t) labels[t] = bit(line[num_vars + 1 + t]);
    data.add(input, labels);
  }
  return data;
}

}  // namespace fcc
