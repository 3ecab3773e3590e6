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

#include "fcc/model.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fcc/error.hpp"
#include "fcc/json_io.hpp"
#include "fcc/rng.hpp"

namespace fcc {

std::string_view to_string(BiasInit b) { return b == BiasInit::kUnit ? "unit" : "fan_in"; }

BiasInit bias_init_from_string(std::string_view name) {
  if (name == "unit") return BiasInit::kUnit;
  if (name == "fan_in") return BiasInit::kFanIn;
  throw ArgumentError("unknown bias init '" + std::string(name) + "' (expected unit or fan_in)");
}

MlpModel init_model(const ModelDims& dims, EmbeddingKind embedding, std::uint64_t seed,
                    bool use_b2, BiasInit bias_init) {
  if (dims.inputs == 0 || dims.hidden == 0 || dims.outputs == 0) {
    throw ArgumentError("model dimensions must be positive");
  }
  MlpModel m;
  m.embedding = make_embedding(embedding, dims.inputs, mix(seed, {0xE3B}));
  m.use_b2 = use_b2;
  Rng rng(seed);
  const std::size_t n0 = m.embedding.embedded_width();

  m.w1 = Matrix(dims.hidden, n0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(n0));
  for (double& w : m.w1.data()) w = rng.uniform(-s1, s1);
  m.b1.resize(dims.hidden);
  const double r1 = bias_init == BiasInit::kUnit ? 1.0 : s1;
  for (double& b : m.b1) b = rng.uniform(-r1, r1);

  m.w2 = Matrix(dims.outputs, dims.hidden);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  for (double& w : m.w2.data()) w = rng.uniform(-s2, s2);
  m.b2.assign(dims.outputs, 0.0);
  if (use_b2) {
    const double r2 = bias_init == BiasInit::kUnit ? 1.0 : s2;
    for (double& b : m.b2) b = rng.uniform(-r2, r2);
  }
  return m;
}

void validate(const MlpModel& m) {
  const auto& c0 = m.embedding.matrix;
  if (c0.rows() == 0 || c0.rows() != c0.cols()) {
    throw DimensionError("embedding must be square and non-empty");
  }
  if (m.embedding.left_inverse.rows() != c0.rows() || m.embedding.left_inverse.cols() != c0.cols()) {
    throw DimensionError("embedding inverse has the wrong shape");
  }
  if (m.w1.cols() != c0.rows()) throw DimensionError("W1 columns must equal embedded width");
  if (m.b1.size() != m.w1.rows()) throw DimensionError("b1 length must equal hidden width");
  if (m.w2.cols() != m.w1.rows()) throw DimensionError("W2 columns must equal hidden width");
  if (m.b2.size() != m.w2.rows()) throw DimensionError("b2 length must equal output count");
  const auto finite = [](std::span<const double> xs) {
    for (double x : xs)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!finite(m.w1.data()) || !finite(m.b1) || !finite(m.w2.data()) || !finite(m.b2) ||
      !finite(c0.data())) {
    throw NumericalError("model has non-finite parameters");
  }
  if (!m.use_b2) {
    for (double b : m.b2)
      if (b != 0.0) throw NumericalError("use_b2 is false but b2 is non-zero");
  }
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> embed(const MlpModel& m, std::span<const double> x) {
  if (x.size() != m.num_inputs()) {
    throw DimensionError("input has " + std::to_string(x.size()) + " entries, model expects " +
                         std::to_string(m.num_inputs()));
  }
  if (m.embedding.kind == EmbeddingKind::kIdentity) return {x.begin(), x.end()};
  return multiply(m.embedding.matrix, x);
}

std::vector<double> to_double(std::span<const std::uint8_t> input) {
  return {input.begin(), input.end()};
}

}  // namespace

ForwardResult forward(const MlpModel& m, std::span<const double> input) {
  ForwardResult result;
  auto& trace = result.trace;
  trace.embedded = embed(m, input);
  const std::size_t hidden = m.hidden();
  const std::size_t outputs = m.outputs();
  trace.hidden.resize(hidden);
  for (std::size_t r = 0; r < hidden; ++r) {
    auto& h = trace.hidden[r];
    const auto row = m.w1.row(r);
    double dot = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) dot += row[c] * trace.embedded[c];
    h.dot = dot;
    h.pre_activation = dot + m.b1[r];
    h.activation = h.pre_activation > 0.0 ? h.pre_activation : 0.0;
    h.w2.resize(outputs);
    h.contribution.resize(outputs);
    for (std::size_t t = 0; t < outputs; ++t) {
      h.w2[t] = m.w2(t, r);
      h.contribution[t] = h.activation * h.w2[t];
    }
  }
  trace.outputs.resize(outputs);
  result.probabilities.resize(outputs);
  for (std::size_t t = 0; t < outputs; ++t) {
    double z = 0.0;
    for (std::size_t r = 0; r < hidden; ++r) z += trace.hidden[r].contribution[t];
    z += m.b2[t];
    trace.outputs[t].logit = z;
    trace.outputs[t].probability = sigmoid(z);
    result.probabilities[t] = trace.outputs[t].probability;
  }
  return result;
}

ForwardResult forward(const MlpModel& m, std::span<const std::uint8_t> input) {
  const auto x = to_double(input);
  return forward(m, std::span<const double>(x));
}

std::vector<double> hidden_activations(const MlpModel& m, std::span<const std::uint8_t> input) {
  const auto x = to_double(input);
  const auto e = embed(m, x);
  std::vector<double> h(m.hidden());
  for (std::size_t r = 0; r < h.size(); ++r) {
    const auto row = m.w1.row(r);
    double s = m.b1[r];
    for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * e[c];
    h[r] = s > 0.0 ? s : 0.0;
  }
  return h;
}

std::string model_to_json(const MlpModel& m) {
  nlohmann::json j = m;
  return j.dump(1);
}

MlpModel model_from_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text).get<MlpModel>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const MlpModel& model) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw FormatError("write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace fcc
