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

#include "fcc/construct.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "fcc/error.hpp"

namespace fcc {

void validate(const PlantedSpec& spec) {
  if (spec.codes.size() != spec.pairs.size())
    throw ArgumentError("planted spec needs one code per pair");
  std::set<std::size_t> used;
  for (const auto& [a, b] : spec.pairs) {
    if (a >= spec.num_vars || b >= spec.num_vars)
      throw ArgumentError("pair variable out of range");
    if (a == b) throw ArgumentError("pair repeats variable x" + std::to_string(a));
    for (std::size_t v : {a, b})
      if (!used.insert(v).second)
        throw ArgumentError("variable x" + std::to_string(v) + " appears in two pairs");
  }
  for (const auto& code : spec.codes) {
    if (code.empty()) throw ArgumentError("planted codes must be nonempty");
    for (std::size_t r : code)
      if (r >= spec.hidden) throw ArgumentError("code row out of range");
  }
  if (!spec.w2.empty() && spec.w2.size() != spec.hidden)
    throw ArgumentError("planted layer-2 weights need one entry per row");
}

MlpModel build_planted(const PlantedSpec& spec) {
  validate(spec);
  MlpModel m;
  m.embedding = make_embedding(EmbeddingKind::kIdentity, spec.num_vars, 0);
  m.w1 = Matrix(spec.hidden, spec.num_vars);
  m.b1.assign(spec.hidden, 0.0);
  m.w2 = Matrix(1, spec.hidden);
  m.b2.assign(1, 0.0);
  m.use_b2 = false;
  for (std::size_t p = 0; p < spec.pairs.size(); ++p) {
    for (std::size_t r : spec.codes[p]) {
      m.w1(r, spec.pairs[p].first) = 1.0;
      m.w1(r, spec.pairs[p].second) = 1.0;
      m.b1[r] = spec.bias;
      m.w2(0, r) = 1.0;
    }
  }
  if (!spec.w2.empty())
    for (std::size_t r = 0; r < spec.hidden; ++r) m.w2(0, r) = spec.w2[r];
  return m;
}

Formula planted_formula(const PlantedSpec& spec) {
  validate(spec);
  Formula f;
  f.kind = FormulaKind::kDnf;
  f.num_vars = spec.num_vars;
  for (const auto& [a, b] : spec.pairs) {
    f.clauses.push_back(make_clause(
        {{static_cast<std::uint32_t>(a), false}, {static_cast<std::uint32_t>(b), false}}));
  }
  return f;
}

ExactCheck verify_exact(const MlpModel& model, const Formula& formula) {
  validate(model);
  validate(formula);
  const std::size_t n = model.num_inputs();
  if (formula.num_vars != n) throw DimensionError("formula width does not match the model");
  if (n > kMaxExactVars)
    throw ArgumentError("exhaustive check refused for " + std::to_string(n) +
                        " variables (limit " + std::to_string(kMaxExactVars) + ")");
  const auto& c0 = model.embedding.matrix;
  const std::size_t n0 = model.embedded_width();
  const std::size_t j = model.hidden();
  ExactCheck out;
  std::vector<std::uint8_t> x(n);
  std::vector<double> e(n0);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t c = 0; c < n; ++c) x[c] = static_cast<std::uint8_t>((mask >> c) & 1U);
    for (std::size_t r = 0; r < n0; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c)
        if (x[c]) s += c0(r, c);
      e[r] = s;
    }
    double logit = model.b2[0];
    for (std::size_t r = 0; r < j; ++r) {
      double z = model.b1[r];
      for (std::size_t c = 0; c < n0; ++c) z += model.w1(r, c) * e[c];
      if (z > 0.0) logit += model.w2(0, r) * z;
    }
    const bool expected = eval(formula, x);
    ++out.checked;
    if ((logit > 0.0) != expected) {
      ++out.mismatches;
      if (!out.counterexample) {
        out.counterexample = x;
        out.expected = expected;
      }
    }
  }
  out.exact = out.mismatches == 0;
  return out;
}

std::string planted_to_json(const PlantedSpec& spec) {
  nlohmann::json j;
  j["format"] = "fcc-planted";
  j["num_vars"] = spec.num_vars;
  j["hidden"] = spec.hidden;
  j["bias"] = spec.bias;
  j["pairs"] = spec.pairs;
  j["codes"] = spec.codes;
  if (!spec.w2.empty()) j["w2"] = spec.w2;
  return j.dump(1);
}

PlantedSpec planted_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "fcc-planted") throw FormatError("not a planted spec");
    PlantedSpec s;
    s.num_vars = j.at("num_vars").get<std::size_t>();
    s.hidden = j.at("hidden").get<std::size_t>();
    s.bias = j.value("bias", -1.0);
    s.pairs = j.at("pairs").get<std::vector<std::pair<std::size_t, std::size_t>>>();
    s.codes = j.at("codes").get<std::vector<std::vector<std::size_t>>>();
    if (j.contains("w2")) s.w2 = j.at("w2").get<std::vector<double>>();
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("planted spec: ") + e.what());
  }
}

}  // namespace fcc
