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

#include "fcc/json_io.hpp"

#include "fcc/error.hpp"

namespace fcc {

void to_json(nlohmann::json& j, const Matrix& m) { j = m.to_rows(); }

void from_json(const nlohmann::json& j, Matrix& m) {
  m = Matrix::from_rows(j.get<std::vector<std::vector<double>>>());
}

void to_json(nlohmann::json& j, const Formula& f) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& c : f.clauses) {
    nlohmann::json lits = nlohmann::json::array();
    for (const auto& l : c.literals) lits.push_back((l.negated ? "!x" : "x") + std::to_string(l.var));
    clauses.push_back(std::move(lits));
  }
  j = nlohmann::json{{"kind", std::string(to_string(f.kind))},
                     {"num_vars", f.num_vars},
                     {"clauses", std::move(clauses)}};
}

void from_json(const nlohmann::json& j, Formula& f) {
  f.kind = formula_kind_from_string(j.at("kind").get<std::string>());
  f.num_vars = j.at("num_vars").get<std::size_t>();
  f.clauses.clear();
  for (const auto& c : j.at("clauses")) {
    std::vector<Literal> lits;
    for (const auto& l : c) {
      auto text = l.get<std::string>();
      Literal lit;
      std::size_t pos = 0;
      if (!text.empty() && text[0] == '!') {
        lit.negated = true;
        pos = 1;
      }
      if (text.size() <= pos + 1 || text[pos] != 'x') throw FormatError("bad literal '" + text + "'");
      lit.var = static_cast<std::uint32_t>(std::stoul(text.substr(pos + 1)));
      lits.push_back(lit);
    }
    f.clauses.push_back(make_clause(std::move(lits)));
  }
  try {
    validate(f);
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
}

void to_json(nlohmann::json& j, const MlpModel& m) {
  j = nlohmann::json{
      {"format", "fcc-model"},
      {"version", 1},
      {"dims",
       {{"inputs", m.num_inputs()},
        {"embedded", m.embedded_width()},
        {"hidden", m.hidden()},
        {"outputs", m.outputs()}}},
      {"use_b2", m.use_b2},
      {"embedding", {{"kind", std::string(to_string(m.embedding.kind))}, {"matrix", m.embedding.matrix}}},
      {"w1", m.w1},
      {"b1", m.b1},
      {"w2", m.w2},
      {"b2", m.b2},
  };
}

void from_json(const nlohmann::json& j, MlpModel& m) {
  if (j.value("format", "") != "fcc-model") throw FormatError("not an fcc-model document");
  if (j.value("version", 0) != 1) throw FormatError("unsupported model version");
  const auto& e = j.at("embedding");
  m.embedding = embedding_from_matrix(embedding_kind_from_string(e.at("kind").get<std::string>()),
                                      e.at("matrix").get<Matrix>());
  m.w1 = j.at("w1").get<Matrix>();
  m.b1 = j.at("b1").get<std::vector<double>>();
  m.w2 = j.at("w2").get<Matrix>();
  m.b2 = j.at("b2").get<std::vector<double>>();
  m.use_b2 = j.at("use_b2").get<bool>();
  const auto& dims = j.at("dims");
  if (dims.at("inputs").get<std::size_t>() != m.num_inputs() ||
      dims.at("hidden").get<std::size_t>() != m.hidden() ||
      dims.at("outputs").get<std::size_t>() != m.outputs()) {
    throw FormatError("model dims do not match the stored matrices");
  }
  validate(m);
}

}  // namespace fcc
