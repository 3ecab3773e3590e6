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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "fcc/error.hpp"
#include "fcc/lab/config.hpp"
#include "fcc/lab/experiment.hpp"
#include "fcc/lab/heatmap.hpp"
#include "fcc/patterns.hpp"

namespace fcc::lab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fcc_lab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny(ExperimentKind kind) {
  ExperimentConfig c = default_config(kind);
  c.trials = 2;
  c.train_samples = 600;
  c.test_samples = 200;
  c.train.max_epochs = 3;
  c.baseline_samples = 2;
  if (kind == ExperimentKind::kScaling) {
    c.hidden = {8};
    c.clauses = {2, 4};
    c.num_vars = 16;
  }
  return c;
}

TEST(LabConfig, DefaultsAreValid) {
  for (auto kind : all_experiments()) {
    const auto c = default_config(kind);
    EXPECT_NO_THROW(validate(c)) << to_string(kind);
    EXPECT_EQ(experiment_kind_from_string(to_string(kind)), kind);
    EXPECT_EQ(config_from_json(config_to_json(c)).seed, c.seed);
    EXPECT_EQ(config_to_json(config_from_json(config_to_json(c))), config_to_json(c));
  }
  EXPECT_EQ(default_config(ExperimentKind::kPaired).train_samples, 30000u);
  EXPECT_EQ(default_config(ExperimentKind::kScaling).train_samples, 20000u);
  EXPECT_EQ(default_config(ExperimentKind::kCnf).train_samples, 40000u);
  EXPECT_EQ(default_config(ExperimentKind::kEmergence).train.snapshot_schedule.size(), 33u);
}

TEST(LabConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(json{{"experiment", "paired"}, {"tirals", 3}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "paired"}, {"decoder", {{"slak", 1}}}}),
               ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "nope"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"trials", 3}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "paired"}, {"trials", 0}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "scaling"}, {"hidden", json::array()}}),
               ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "paired"}, {"lr", "fast"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "paired"}, {"trials", -1}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"experiment", "scaling"}, {"embedding", "hadamard"},
                                     {"num_vars", 24}}),
               ConfigError);
  const auto c = config_from_json(json{{"experiment", "scaling"},
                                       {"hidden", {16}},
                                       {"clauses", {4, 8}},
                                       {"decoder", {{"bias_mode", "magnitude"}}}});
  EXPECT_EQ(c.hidden, std::vector<std::size_t>{16});
  EXPECT_EQ(c.clauses, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(c.decoder_bias_mode, BiasMode::kSubtractMagnitude);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(LabReport, EmptyReportSkeleton) {
  const RunReport empty;
  const json j = report_to_json(empty);
  EXPECT_EQ(j["format"], "fcc-report");
  EXPECT_TRUE(j["trials"].is_array());
  EXPECT_EQ(report_from_json(json::parse(j.dump())), report_from_json(j));
  const auto dir = scratch_dir("empty");
  emit_report(empty, dir);
  EXPECT_NO_THROW(load_report(dir / "report.json"));
  EXPECT_EQ(slurp(dir / "metrics.csv"), "j,k,trial,metric,value\n");
  fs::remove_all(dir);
}

TEST(LabRun, ReportRoundTripAndAggregates) {
  const auto config = tiny(ExperimentKind::kScaling);
  const auto dir = scratch_dir("roundtrip");
  const RunReport report = run_experiment(config);
  ASSERT_EQ(report.trials.size(), 4u);
  EXPECT_EQ(report.failed, 0u);
  emit_report(report, dir);
  const RunReport loaded = load_report(dir / "report.json");
  EXPECT_EQ(loaded, report);

  // Aggregates recomputed by hand from the per-trial records.
  for (std::size_t cell = 0; cell < 2; ++cell) {
    for (const auto& [name, agg] : loaded.aggregates[cell].items()) {
      std::vector<double> xs;
      for (const auto& rec : loaded.trials)
        if (rec["cell"].get<std::size_t>() == cell && rec["metrics"].contains(name))
          xs.push_back(rec["metrics"][name].get<double>());
      double mean = 0.0;
      for (double x : xs) mean += x / static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      const double sd =
          xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
      EXPECT_NEAR(agg["mean"].get<double>(), mean, 1e-12) << name;
      EXPECT_NEAR(agg["std"].get<double>(), sd, 1e-12) << name;
      EXPECT_EQ(agg["n"].get<std::size_t>(), xs.size());
    }
  }

  std::ifstream csv(dir / "metrics.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "j,k,trial,metric,value");
  const std::regex row(R"(\d+,\d+,\d+,[A-Za-z0-9_@.]+,-?[0-9.eE+-]+)");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ASSERT_TRUE(std::regex_match(line, row)) << line;
    ++rows;
  }
  EXPECT_GT(rows, 0u);
  EXPECT_TRUE(fs::exists(dir / "histograms.csv"));
  EXPECT_GT(metric_mean(report, find_cell(report, 8, 4), "train_error"), -1.0);
  EXPECT_THROW(metric_mean(report, 0, "no_such_metric"), ArgumentError);
  fs::remove_all(dir);
}

TEST(LabRun, ParallelMatchesSerial) {
  const auto config = tiny(ExperimentKind::kPaired);
  RunOptions serial;
  RunOptions wide;
  wide.parallel = 8;
  EXPECT_EQ(report_to_json(run_experiment(config, serial)).dump(),
            report_to_json(run_experiment(config, wide)).dump());
}

TEST(LabRun, ResumeReproducesRecords) {
  auto config = tiny(ExperimentKind::kPaired);
  config.trials = 3;
  const auto dir = scratch_dir("resume");
  RunOptions options;
  options.out_dir = dir;
  const RunReport first = run_experiment(config, options);
  std::vector<std::string> records;
  for (std::size_t t = 0; t < 3; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "c000_t%03zu.json", t);
    records.push_back(slurp(dir / "trials" / name));
  }
  // Simulate an interruption after the first trial.
  fs::remove(dir / "trials" / "c000_t001.json");
  fs::remove(dir / "trials" / "c000_t002.json");
  std::size_t reused = 0;
  options.log = [&](const std::string& msg) { reused += msg.find("reused") != std::string::npos; };
  const RunReport second = run_experiment(config, options);
  EXPECT_EQ(reused, 1u);
  for (std::size_t t = 0; t < 3; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "c000_t%03zu.json", t);
    EXPECT_EQ(slurp(dir / "trials" / name), records[t]) << t;
  }
  EXPECT_EQ(first, second);

  // A changed config does not reuse stale records.
  config.train.lr *= 2;
  reused = 0;
  run_experiment(config, options);
  EXPECT_EQ(reused, 0u);
  fs::remove_all(dir);
}

TEST(LabRun, SeedIsolation) {
  auto config = tiny(ExperimentKind::kPaired);
  const RunReport two = run_experiment(config);
  config.trials = 3;
  const RunReport three = run_experiment(config);
  EXPECT_EQ(two.trials[0], three.trials[0]);
  EXPECT_EQ(two.trials[1], three.trials[1]);
  EXPECT_NE(trial_seed(1, 0, 0), trial_seed(1, 0, 1));
  EXPECT_NE(trial_seed(1, 0, 1), trial_seed(1, 1, 0));
  EXPECT_NE(three.trials[2]["seed"], three.trials[1]["seed"]);
}

TEST(LabRun, EveryExperimentRuns) {
  for (auto kind : all_experiments()) {
    auto config = tiny(kind);
    config.trials = 1;
    if (kind == ExperimentKind::kVision) {
      config.num_vars = 16;
      config.hidden = {16};
    }
    if (kind == ExperimentKind::kMulti) config.num_vars = 16;
    if (kind == ExperimentKind::kEmergence) {
      config.num_vars = 16;
      config.hidden = {8};
    }
    const RunReport r = run_experiment(config);
    EXPECT_EQ(r.failed, 0u) << to_string(kind) << ": " << r.trials.front().dump();
    const auto dir = scratch_dir(std::string(to_string(kind)));
    emit_report(r, dir);
    if (kind == ExperimentKind::kAndVsOr) {
      std::ifstream in(dir / "bias_table.csv");
      std::string header;
      std::getline(in, header);
      EXPECT_EQ(header, "task,j,average_bias,average_bias_std,max_abs_bias,negative_bias_rows,trials");
      EXPECT_EQ(r.cells.size(), 2u);
    }
    if (kind == ExperimentKind::kEmergence) {
      EXPECT_TRUE(r.trials.front()["metrics"].contains("pos_4P@0.2"));
      EXPECT_TRUE(r.trials.front()["metrics"].contains("pos_4P@3"));
      EXPECT_TRUE(fs::exists(dir / "emergence.csv"));
    }
    if (kind == ExperimentKind::kVision) {
      EXPECT_TRUE(r.extra.contains("decoder_calibration"));
      EXPECT_TRUE(fs::exists(dir / "decoder.csv"));
    }
    fs::remove_all(dir);
  }
}

TEST(LabRun, FailedTrialsAreCounted) {
  auto config = tiny(ExperimentKind::kPaired);
  config.train.lr = 1e300;  // overflows to a non-finite loss
  const RunReport r = run_experiment(config);
  EXPECT_EQ(r.failed, 2u);
  EXPECT_EQ(r.trials[0]["status"], "failed");
  EXPECT_EQ(metric_count(r, 0, "train_error"), 0u);
}

std::vector<std::string> fills(const std::string& svg) {
  std::vector<std::string> out;
  const std::regex re("fill=\"(#[0-9a-f]{6})\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator();
       ++it)
    out.push_back((*it)[1]);
  return out;
}

TEST(Heatmap, SinglePositiveCellIsBlue) {
  const Matrix m = Matrix::from_rows({{0.7}});
  const auto order = identity_order(1);
  const auto f = fills(heatmap_svg(m, order, order));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0], "#0000ff");
  EXPECT_EQ((heatmap_color(-1.0, 1.0)), (std::array<std::uint8_t, 3>{255, 0, 0}));
  EXPECT_EQ((heatmap_color(0.0, 1.0)), (std::array<std::uint8_t, 3>{255, 255, 255}));
}

TEST(Heatmap, SymmetricMatrixRendersSymmetric) {
  const Matrix m = Matrix::from_rows({{1, -0.5, 0.2}, {-0.5, 0, 0.9}, {0.2, 0.9, -1}});
  const auto order = identity_order(3);
  const auto f = fills(heatmap_svg(m, order, order));
  ASSERT_EQ(f.size(), 9u);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(f[r * 3 + c], f[c * 3 + r]);
}

TEST(Heatmap, SortAndFilter) {
  const Formula f{FormulaKind::kDnf, 6, {make_clause({{4, false}, {1, false}}),
                                         make_clause({{0, false}, {5, false}})}};
  EXPECT_EQ(clause_column_order(f), (std::vector<std::size_t>{1, 4, 0, 5, 2, 3}));
  const auto part = witness_partition(Matrix::from_rows({{1.0, -1.0, 0.5}}));
  EXPECT_EQ(rows_of_class(part, RowClass::kPositive), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(rows_of_class(part, RowClass::kNegative), (std::vector<std::size_t>{1}));

  Matrix m(3, 6);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 6; ++c) m(r, c) = static_cast<double>(r * 6 + c) - 8.0;
  const auto rows = rows_of_class(part, RowClass::kPositive);
  const auto cols = clause_column_order(f);
  const std::string svg = heatmap_svg(m, rows, cols);
  const std::regex cell("data-row=\"(\\d+)\" data-col=\"(\\d+)\"");
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator();
       ++it)
    seen.emplace_back(std::stoul((*it)[1]), std::stoul((*it)[2]));
  ASSERT_EQ(seen.size(), 12u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(seen[i * 6 + k], std::make_pair(rows[i], cols[k]));

  const auto path = scratch_dir("heatmap.svg");
  emit_heatmap(m, rows, cols, path);
  EXPECT_EQ(slurp(path), svg);
  fs::remove(path);
  EXPECT_THROW(emit_heatmap(m, rows, cols, "/nonexistent/dir/x.svg"), FormatError);
  Matrix bad = m;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(heatmap_svg(bad, rows, cols), ArgumentError);
}

}  // namespace
}  // namespace fcc::lab
