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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcc/codes.hpp"
#include "fcc/embedding.hpp"
#include "fcc/model.hpp"
#include "fcc/trainer.hpp"

namespace fcc::lab {

enum class ExperimentKind {
  kPaired,
  kScaling,
  kEmergence,
  kAndVsOr,
  kCnf,
  kVision,
  kMulti,
  kDisentangle,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);
std::vector<ExperimentKind> all_experiments();

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kPaired;
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  std::size_t num_vars = 16;
  std::vector<std::size_t> hidden{16};  // grid over j
  std::vector<std::size_t> clauses{8};  // grid over k
  std::size_t clause_size = 4;
  std::size_t negatives_per_clause = 0;
  std::size_t outputs = 1;
  std::size_t train_samples = 20000;
  std::size_t test_samples = 10000;
  TrainConfig train;
  EmbeddingKind embedding = EmbeddingKind::kIdentity;
  bool use_b2 = true;
  BiasInit bias_init = BiasInit::kUnit;
  std::size_t baseline_samples = 10;
  DecoderConfig decoder;
  // Absent: pick the decoder bias mode on a calibration run, then freeze it.
  std::optional<BiasMode> decoder_bias_mode;
};

// Defaults follow the setup described for each experiment.
ExperimentConfig default_config(ExperimentKind kind);

// Overlays `j` on the defaults for j["experiment"]. Unknown keys, wrong
// types and invalid values raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

std::string_view to_string(BiasMode mode);
BiasMode bias_mode_from_string(std::string_view name);

}  // namespace fcc::lab
