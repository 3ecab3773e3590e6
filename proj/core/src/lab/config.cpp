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

#include "fcc/lab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fcc/error.hpp"

namespace fcc::lab {
namespace {

using nlohmann::json;

struct KindName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::kPaired, "paired"},     {ExperimentKind::kScaling, "scaling"},
    {ExperimentKind::kEmergence, "emergence"}, {ExperimentKind::kAndVsOr, "and_vs_or"},
    {ExperimentKind::kCnf, "cnf"},           {ExperimentKind::kVision, "vision"},
    {ExperimentKind::kMulti, "multi"},       {ExperimentKind::kDisentangle, "disentangle"},
};

template <typename T>
T get_as(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

std::size_t get_count(const json& j, std::string_view key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ConfigError("config key '" + std::string(key) + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<std::size_t> get_counts(const json& j, std::string_view key) {
  if (!j.is_array()) throw ConfigError("config key '" + std::string(key) + "' must be a list");
  std::vector<std::size_t> out;
  for (const auto& v : j) out.push_back(get_count(v, key));
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k.name;
  return "?";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  std::string known;
  for (const auto& k : kKinds) known += (known.empty() ? "" : ", ") + std::string(k.name);
  throw ConfigError("unknown experiment '" + std::string(name) + "' (known: " + known + ")");
}

std::vector<ExperimentKind> all_experiments() {
  std::vector<ExperimentKind> out;
  for (const auto& k : kKinds) out.push_back(k.kind);
  return out;
}

std::string_view to_string(BiasMode mode) {
  return mode == BiasMode::kSubtractSigned ? "signed" : "magnitude";
}

BiasMode bias_mode_from_string(std::string_view name) {
  if (name == "signed") return BiasMode::kSubtractSigned;
  if (name == "magnitude") return BiasMode::kSubtractMagnitude;
  throw ConfigError("unknown decoder bias mode '" + std::string(name) + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.train.batch_size = 64;
  switch (kind) {
    case ExperimentKind::kPaired:
      c.trials = 10;
      c.num_vars = 16;
      c.hidden = {16};
      c.clauses = {8};
      c.clause_size = 2;
      c.train_samples = 30000;
      c.train.lr = 0.01;
      c.train.max_epochs = 800;
      c.train.patience = 20;
      c.use_b2 = false;
      break;
    case ExperimentKind::kScaling:
      c.num_vars = 32;
      c.hidden = {16, 32, 64};
      c.clauses = {2, 4, 8, 12, 16, 24, 32, 42, 56, 64};
      c.train_samples = 20000;
      c.test_samples = 5000;
      c.train.lr = 0.001;
      c.train.max_epochs = 100;
      c.train.patience = 10;
      c.embedding = EmbeddingKind::kHadamard;
      break;
    case ExperimentKind::kEmergence:
      c.num_vars = 32;
      c.hidden = {32};
      c.clauses = {4};
      c.train_samples = 20000;
      c.test_samples = 5000;
      c.train.lr = 0.001;
      c.train.max_epochs = 20;
      c.train.patience = 0;
      for (int i = 0; i <= 15; ++i) c.train.snapshot_schedule.push_back(i / 5.0);
      for (int e = 4; e <= 20; ++e) c.train.snapshot_schedule.push_back(e);
      c.embedding = EmbeddingKind::kHadamard;
      break;
    case ExperimentKind::kAndVsOr:
      c.num_vars = 16;
      c.hidden = {16};
      c.clauses = {8};
      c.clause_size = 2;
      c.train_samples = 10000;
      c.test_samples = 5000;
      c.train.lr = 0.01;
      c.train.max_epochs = 200;
      c.train.patience = 10;
      c.use_b2 = false;
      c.bias_init = BiasInit::kFanIn;
      break;
    case ExperimentKind::kCnf:
      c.trials = 5;
      c.num_vars = 16;
      c.hidden = {16};
      c.clauses = {8};
      c.clause_size = 2;
      c.train_samples = 40000;
      c.train.lr = 0.01;
      c.train.max_epochs = 800;
      c.train.patience = 20;
      c.use_b2 = false;
      break;
    case ExperimentKind::kVision:
      c.trials = 3;
      c.num_vars = 128;
      c.hidden = {128};
      c.clauses = {125};
      c.train_samples = 10000;
      c.train.lr = 0.01;
      c.train.max_epochs = 20;
      c.train.patience = 0;
      break;
    case ExperimentKind::kMulti:
      c.trials = 3;
      c.num_vars = 32;
      c.hidden = {32};
      c.clauses = {8};
      c.outputs = 2;
      c.train_samples = 50000;
      c.train.lr = 0.001;
      c.train.max_epochs = 300;
      c.train.patience = 10;
      break;
    case ExperimentKind::kDisentangle:
      c.trials = 5;
      c.num_vars = 16;
      c.hidden = {16};
      c.clauses = {8};
      c.clause_size = 2;
      c.train_samples = 30000;
      c.train.lr = 0.01;
      c.train.max_epochs = 800;
      c.train.patience = 20;
      c.use_b2 = false;
      c.embedding = EmbeddingKind::kHadamard;
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("experiment")) throw ConfigError("config needs an 'experiment' key");
  ExperimentConfig c =
      default_config(experiment_kind_from_string(get_as<std::string>(j["experiment"], "experiment")));

  static const std::set<std::string> kKeys = {
      "experiment", "seed",        "trials",        "num_vars",     "hidden",
      "clauses",    "clause_size", "negatives_per_clause",          "outputs",
      "train_samples", "test_samples", "lr",         "batch_size",   "max_epochs",
      "patience",   "snapshot_schedule", "embedding", "use_b2",      "bias_init",
      "baseline_samples", "decoder"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (key == "seed") c.seed = get_as<std::uint64_t>(value, key);
    else if (key == "trials") c.trials = get_count(value, key);
    else if (key == "num_vars") c.num_vars = get_count(value, key);
    else if (key == "hidden") c.hidden = get_counts(value, key);
    else if (key == "clauses") c.clauses = get_counts(value, key);
    else if (key == "clause_size") c.clause_size = get_count(value, key);
    else if (key == "negatives_per_clause") c.negatives_per_clause = get_count(value, key);
    else if (key == "outputs") c.outputs = get_count(value, key);
    else if (key == "train_samples") c.train_samples = get_count(value, key);
    else if (key == "test_samples") c.test_samples = get_count(value, key);
    else if (key == "lr") c.train.lr = get_as<double>(value, key);
    else if (key == "batch_size") c.train.batch_size = get_count(value, key);
    else if (key == "max_epochs") c.train.max_epochs = get_count(value, key);
    else if (key == "patience") c.train.patience = get_count(value, key);
    else if (key == "snapshot_schedule")
      c.train.snapshot_schedule = get_as<std::vector<double>>(value, key);
    else if (key == "embedding") {
      try {
        c.embedding = embedding_kind_from_string(get_as<std::string>(value, key));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "use_b2") c.use_b2 = get_as<bool>(value, key);
    else if (key == "bias_init") {
      try {
        c.bias_init = bias_init_from_string(get_as<std::string>(value, key));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "baseline_samples") c.baseline_samples = get_count(value, key);
    else if (key == "decoder") {
      if (!value.is_object()) throw ConfigError("config key 'decoder' must be an object");
      for (const auto& [dk, dv] : value.items()) {
        if (dk == "window") c.decoder.window = get_count(dv, "decoder.window");
        else if (dk == "run") c.decoder.run = get_count(dv, "decoder.run");
        else if (dk == "slack_factor") c.decoder.slack_factor = get_as<double>(dv, "decoder.slack_factor");
        else if (dk == "bias_mode") {
          const auto mode = get_as<std::string>(dv, "decoder.bias_mode");
          if (mode == "calibrate") c.decoder_bias_mode.reset();
          else c.decoder_bias_mode = bias_mode_from_string(mode);
        } else {
          throw ConfigError("unknown config key 'decoder." + dk + "'");
        }
      }
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["num_vars"] = c.num_vars;
  j["hidden"] = c.hidden;
  j["clauses"] = c.clauses;
  j["clause_size"] = c.clause_size;
  j["negatives_per_clause"] = c.negatives_per_clause;
  j["outputs"] = c.outputs;
  j["train_samples"] = c.train_samples;
  j["test_samples"] = c.test_samples;
  j["lr"] = c.train.lr;
  j["batch_size"] = c.train.batch_size;
  j["max_epochs"] = c.train.max_epochs;
  j["patience"] = c.train.patience;
  j["snapshot_schedule"] = c.train.snapshot_schedule;
  j["embedding"] = std::string(to_string(c.embedding));
  j["use_b2"] = c.use_b2;
  j["bias_init"] = std::string(to_string(c.bias_init));
  j["baseline_samples"] = c.baseline_samples;
  j["decoder"] = {{"window", c.decoder.window},
                  {"run", c.decoder.run},
                  {"slack_factor", c.decoder.slack_factor},
                  {"bias_mode", c.decoder_bias_mode ? std::string(to_string(*c.decoder_bias_mode))
                                                    : std::string("calibrate")}};
  return j;
}

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (c.trials == 0) fail("trials must be at least 1");
  if (c.hidden.empty() || c.clauses.empty()) fail("hidden and clauses grids must be nonempty");
  for (auto j : c.hidden)
    if (j == 0) fail("hidden sizes must be positive");
  for (auto k : c.clauses)
    if (k == 0) fail("clause counts must be positive");
  if (c.num_vars < 2) fail("num_vars must be at least 2");
  if (!(c.train.lr > 0.0)) fail("lr must be positive");
  if (c.train.batch_size == 0) fail("batch_size must be at least 1");
  if (c.train_samples == 0) fail("train_samples must be at least 1");
  if (c.baseline_samples == 0) fail("baseline_samples must be at least 1");
  if (c.embedding == EmbeddingKind::kHadamard && !is_power_of_two(c.num_vars))
    fail("hadamard embedding needs num_vars to be a power of two");
  try {
    validate(c.decoder);
  } catch (const ArgumentError& e) {
    fail(e.what());
  }
  switch (c.experiment) {
    case ExperimentKind::kPaired:
    case ExperimentKind::kAndVsOr:
    case ExperimentKind::kCnf:
    case ExperimentKind::kDisentangle:
      if (c.num_vars % 2 != 0) fail("paired tasks need an even num_vars");
      break;
    case ExperimentKind::kScaling:
    case ExperimentKind::kEmergence:
      if (c.clause_size != 4) fail("scaling tasks use 4-literal clauses");
      if (c.negatives_per_clause > 1) fail("negatives_per_clause must be 0 or 1");
      if (c.num_vars < 4) fail("num_vars must be at least the clause size");
      break;
    case ExperimentKind::kVision:
      if (c.num_vars < 8) fail("vision needs num_vars >= 8");
      if (c.outputs != 1) fail("vision is single-output");
      break;
    case ExperimentKind::kMulti:
      if (c.outputs == 0) fail("outputs must be at least 1");
      if (c.clause_size == 0 || c.num_vars % c.clause_size != 0)
        fail("multi needs num_vars divisible by clause_size");
      if (c.negatives_per_clause > 1) fail("negatives_per_clause must be 0 or 1");
      break;
  }
  if (c.experiment != ExperimentKind::kMulti && c.outputs != 1) fail("only multi uses outputs > 1");
}

}  // namespace fcc::lab
