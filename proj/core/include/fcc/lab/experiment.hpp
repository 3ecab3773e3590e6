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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcc/lab/config.hpp"

namespace fcc::lab {

struct RunOptions {
  std::size_t parallel = 1;
  // Per-trial records go to <out_dir>/trials and are reused on rerun.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const std::string&)> log;
};

struct RunReport {
  nlohmann::json config;                // echo of config_to_json
  nlohmann::json cells;                 // array of {"cell", "j", "k", "task"}
  std::vector<nlohmann::json> trials;   // cell-major, trial-minor
  nlohmann::json aggregates;            // per cell: metric -> {mean, std, n}
  nlohmann::json extra;                 // experiment-level data (decoder calibration)
  std::size_t failed = 0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Seed of trial `trial` in grid cell `cell`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, std::size_t trial);

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Mean, sample standard deviation and count of every metric over the
// completed trials of each cell.
nlohmann::json aggregate(const std::vector<nlohmann::json>& trials, std::size_t num_cells);

nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

// report.json plus the flat CSV tables for the experiment.
void emit_report(const RunReport& report, const std::filesystem::path& dir);
RunReport load_report(const std::filesystem::path& report_json);

// Aggregated mean of `metric` in `cell`; throws ArgumentError when absent.
double metric_mean(const RunReport& report, std::size_t cell, std::string_view metric);
std::size_t metric_count(const RunReport& report, std::size_t cell, std::string_view metric);

// Index of the cell with the given grid values; throws ArgumentError when absent.
std::size_t find_cell(const RunReport& report, std::size_t j, std::size_t k,
                      std::string_view task = {});

}  // namespace fcc::lab
