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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcc/embedding.hpp"
#include "fcc/matrix.hpp"

namespace fcc {

struct ModelDims {
  std::size_t inputs = 0;   // m0: Boolean input variables
  std::size_t hidden = 0;   // n1: hidden neurons (j)
  std::size_t outputs = 1;  // o: sigmoid output neurons
};

// Single-hidden-layer perceptron
//
//   y = sigmoid(W2 * ReLU(W1 * (C0 * x) + b1) + b2)
//
// with a frozen embedding C0. Each output neuron has its own sigmoid.
struct MlpModel {
  Embedding embedding;
  Matrix w1;  // hidden x embedded width
  std::vector<double> b1;
  Matrix w2;  // outputs x hidden
  std::vector<double> b2;
  bool use_b2 = true;  // when false b2 stays zero and is never trained

  std::size_t num_inputs() const noexcept { return embedding.input_width(); }
  std::size_t embedded_width() const noexcept { return embedding.embedded_width(); }
  std::size_t hidden() const noexcept { return w1.rows(); }
  std::size_t outputs() const noexcept { return w2.rows(); }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases ~ Uniform(-1, 1).
// Range of the uniform bias draw: kUnit is (-1, 1), kFanIn is
// (-1/sqrt(fan_in), 1/sqrt(fan_in)) like the weights.
enum class BiasInit { kUnit, kFanIn };

std::string_view to_string(BiasInit b);
BiasInit bias_init_from_string(std::string_view name);

MlpModel init_model(const ModelDims& dims, EmbeddingKind embedding, std::uint64_t seed,
                    bool use_b2 = true, BiasInit bias_init = BiasInit::kUnit);

// Throws DimensionError on inconsistent shapes and NumericalError on
// non-finite parameters.
void validate(const MlpModel& model);

struct HiddenTrace {
  double dot = 0.0;             // (W1 * C0 x)_r, before the bias
  double pre_activation = 0.0;  // dot + b1_r
  double activation = 0.0;      // ReLU(pre_activation)
  std::vector<double> w2;       // W2[t][r] for each output t
  std::vector<double> contribution;  // activation * W2[t][r]
};

struct OutputTrace {
  double logit = 0.0;  // sum of contributions + b2_t
  double probability = 0.0;
};

// Every intermediate value of one forward pass, in evaluation order.
struct ExecutionTrace {
  std::vector<double> embedded;  // C0 x
  std::vector<HiddenTrace> hidden;
  std::vector<OutputTrace> outputs;
};

struct ForwardResult {
  std::vector<double> probabilities;
  ExecutionTrace trace;
};

// Throws DimensionError when input.size() != model.num_inputs().
ForwardResult forward(const MlpModel& model, std::span<const std::uint8_t> input);
ForwardResult forward(const MlpModel& model, std::span<const double> input);

// Post-ReLU hidden activations only.
std::vector<double> hidden_activations(const MlpModel& model,
                                       std::span<const std::uint8_t> input);

// Structured text (JSON) with full-precision numbers.
std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace fcc
