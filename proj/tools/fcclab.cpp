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

// fcclab: command line front end for formula generation, training, analysis
// and the experiment harness.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcc/codes.hpp"
#include "fcc/disentangle.hpp"
#include "fcc/error.hpp"
#include "fcc/formula.hpp"
#include "fcc/json_io.hpp"
#include "fcc/lab/config.hpp"
#include "fcc/lab/experiment.hpp"
#include "fcc/lab/heatmap.hpp"
#include "fcc/model.hpp"
#include "fcc/patterns.hpp"
#include "fcc/rng.hpp"
#include "fcc/sampler.hpp"
#include "fcc/trainer.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFailedTrials = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fcc::FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when it is empty.
void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw fcc::FormatError("cannot write " + path);
  out << text;
}

// A formula file is either the JSON form or text lines, one formula per
// line, with an optional "# fcc-formula num_vars=N kind=K" header.
std::vector<fcc::Formula> load_formulas(const fs::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    const json j = json::parse(text);
    std::vector<fcc::Formula> out;
    if (j.is_array()) {
      for (const auto& f : j) out.push_back(f.get<fcc::Formula>());
    } else {
      out.push_back(j.get<fcc::Formula>());
    }
    return out;
  }
  std::optional<std::size_t> num_vars;
  std::optional<fcc::FormulaKind> kind;
  std::vector<fcc::Formula> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::string w;
      while (words >> w) {
        if (w.rfind("num_vars=", 0) == 0) num_vars = std::stoul(w.substr(9));
        if (w.rfind("kind=", 0) == 0) kind = fcc::formula_kind_from_string(w.substr(5));
      }
      continue;
    }
    out.push_back(fcc::parse_formula(line, num_vars, kind));
  }
  if (out.empty()) throw fcc::FormatError(path.string() + " holds no formula");
  return out;
}

fcc::Formula load_formula(const fs::path& path) { return load_formulas(path).front(); }

std::string formula_file_text(const std::vector<fcc::Formula>& formulas) {
  std::string out = "# fcc-formula num_vars=" + std::to_string(formulas.front().num_vars) +
                    " kind=" + std::string(fcc::to_string(formulas.front().kind)) + "\n";
  for (const auto& f : formulas) out += fcc::to_text(f) + "\n";
  return out;
}

fcc::Dataset load_dataset(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw fcc::FormatError("cannot open " + path.string());
  return fcc::read_dataset(in);
}

json histogram_summary(const fcc::PatternHistogram& h) {
  json j;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto rc = static_cast<fcc::RowClass>(c);
    json cls;
    cls["rows"] = h.rows[c];
    for (std::size_t p = 0; p <= h.clause_size; ++p)
      cls[fcc::pattern_name(p, h.clause_size)] = h.positives_per_clause(rc, p);
    cls["aligned"] = h.aligned_per_clause(rc);
    if (h.clause_size == 4 &&
        std::find(h.one_negated.begin(), h.one_negated.end(), true) != h.one_negated.end()) {
      cls["3P1Nc"] = h.per_clause(rc, fcc::PatternType::kP3N1c);
      cls["3P1Nnc"] = h.per_clause(rc, fcc::PatternType::kP3N1nc);
    }
    j[std::string(fcc::to_string(rc))] = std::move(cls);
  }
  j["rho"] = h.rho;
  return j;
}

json bias_summary(const fcc::BiasStats& b) {
  return {{"rho", b.rho},
          {"positive_rows", b.positive_rows},
          {"positive_rows_negative_bias", b.positive_rows_negative_bias},
          {"mean_bias_positive_rows", b.mean_bias_positive_rows},
          {"mean_bias_negative_rows", b.mean_bias_negative_rows},
          {"positive_fraction", b.positive_fraction},
          {"row_positive_fraction", b.row_positive_fraction}};
}

fcc::MlpModel coding_view(const fcc::MlpModel& m) {
  if (m.embedding.kind == fcc::EmbeddingKind::kIdentity) return m;
  fcc::MlpModel v = m;
  v.w1 = fcc::disentangle_layer1(m);
  v.embedding = fcc::make_embedding(fcc::EmbeddingKind::kIdentity, m.num_inputs(), 0);
  return v;
}

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t parallel = 1;
  std::optional<std::size_t> trials;
  bool quiet = false;
};

int cmd_experiment(const std::string& name, const Common& common, bool seed_given) {
  using namespace fcc::lab;
  ExperimentConfig config;
  if (!common.config.empty()) {
    config = load_config(common.config);
    if (!name.empty() && to_string(config.experiment) != name)
      throw fcc::ConfigError("config is for experiment '" +
                             std::string(to_string(config.experiment)) + "', not '" + name + "'");
  } else {
    config = default_config(experiment_kind_from_string(name));
  }
  if (seed_given) config.seed = common.seed;
  if (common.trials) config.trials = *common.trials;
  validate(config);

  RunOptions options;
  options.parallel = common.parallel;
  if (!common.out.empty()) options.out_dir = fs::path(common.out);
  if (!common.quiet) options.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  const RunReport report = run_experiment(config, options);
  if (!common.out.empty()) {
    emit_report(report, common.out);
  } else {
    std::cout << report_to_json(report).dump(1) << '\n';
  }
  if (report.failed > 0) {
    std::cerr << report.failed << " trial(s) failed\n";
    return kExitFailedTrials;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formula learning, weight analysis and experiment harness"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "Experiment config file (JSON)");
  auto* seed_opt = app.add_option("--seed", common.seed, "Master seed");
  app.add_option("--out", common.out, "Output file or directory");
  app.add_option("--parallel", common.parallel, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--trials", common.trials, "Trials per grid cell")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", common.quiet, "No progress output");

  // gen-formula
  auto* gen_formula = app.add_subcommand("gen-formula", "Generate a random target formula");
  std::string formula_kind = "paired";
  std::size_t vars = 16, clauses = 8, clause_size = 4, negatives = 0, outputs = 1;
  bool as_json = false;
  gen_formula->add_option("--kind", formula_kind, "paired|dnf|partition|cnf|or|consecutive4")
      ->check(CLI::IsMember({"paired", "dnf", "partition", "cnf", "or", "consecutive4"}));
  gen_formula->add_option("--vars", vars, "Number of variables");
  gen_formula->add_option("--clauses", clauses, "Number of clauses (dnf)");
  gen_formula->add_option("--clause-size", clause_size, "Literals per clause (dnf, partition)");
  gen_formula->add_option("--negatives", negatives, "Negated literals per clause");
  gen_formula->add_option("--outputs", outputs, "Independent formulas to draw (partition)");
  gen_formula->add_flag("--json", as_json, "Write the structured JSON form");

  // gen-data
  auto* gen_data = app.add_subcommand("gen-data", "Sample a labelled dataset");
  std::string dist = "paired", formula_path;
  std::size_t samples = 20000;
  gen_data->add_option("--dist", dist, "paired|dnf4|or|cnf|consecutive4|multi");
  gen_data->add_option("--formula", formula_path, "Formula file");
  gen_data->add_option("--vars", vars, "Number of variables (or, consecutive4)");
  gen_data->add_option("--samples", samples, "Number of samples");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a one-hidden-layer network");
  std::string data_path, embedding = "identity", bias_init = "unit";
  std::size_t hidden = 16;
  fcc::TrainConfig tc;
  bool no_b2 = false;
  train_cmd->add_option("--data", data_path, "Dataset file")->required();
  train_cmd->add_option("--hidden", hidden, "Hidden neurons");
  train_cmd->add_option("--embedding", embedding, "identity|hadamard|random_symmetric");
  train_cmd->add_option("--lr", tc.lr, "Adam learning rate");
  train_cmd->add_option("--batch", tc.batch_size, "Minibatch size");
  train_cmd->add_option("--epochs", tc.max_epochs, "Maximum epochs");
  train_cmd->add_option("--patience", tc.patience, "Early stopping patience (0 disables)");
  train_cmd->add_option("--bias-init", bias_init, "unit|fan_in");
  train_cmd->add_flag("--no-b2", no_b2, "Freeze the output bias at zero");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Analyse a trained model");
  analyze->require_subcommand(1);
  std::string model_path;
  std::size_t output = 0;
  std::size_t baseline_samples = 10;
  auto add_model_formula = [&](CLI::App* sub) {
    sub->add_option("--model", model_path, "Model file")->required();
    sub->add_option("--formula", formula_path, "Formula file");
    sub->add_option("--output", output, "Output neuron");
  };
  auto* an_patterns = analyze->add_subcommand("patterns", "Sign-pattern census");
  add_model_formula(an_patterns);
  an_patterns->add_option("--baseline-samples", baseline_samples, "Random matrices for the baseline");
  auto* an_codes = analyze->add_subcommand("codes", "Feature codes per clause or window");
  add_model_formula(an_codes);
  std::size_t run = 4;
  an_codes->add_option("--run", run, "Window run length when no formula is given");
  auto* an_bias = analyze->add_subcommand("bias", "Layer-1 bias and sign statistics");
  add_model_formula(an_bias);
  auto* an_overlap = analyze->add_subcommand("overlap", "Code overlap statistics");
  add_model_formula(an_overlap);

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "Recover variable pairs from W1");
  reconstruct->add_option("--model", model_path, "Model file")->required();
  reconstruct->add_option("--formula", formula_path, "Paired formula to score against");

  // decode-vision
  auto* decode = app.add_subcommand("decode-vision", "Decode run positions from hidden activity");
  fcc::DecoderConfig dc;
  std::string bias_mode = "signed";
  decode->add_option("--model", model_path, "Model file")->required();
  decode->add_option("--data", data_path, "consecutive4 dataset")->required();
  decode->add_option("--window", dc.window, "Decoder window width");
  decode->add_option("--run", dc.run, "Run length");
  decode->add_option("--slack", dc.slack_factor, "Slack factor");
  decode->add_option("--bias-mode", bias_mode, "signed|magnitude");

  // disentangle
  auto* disentangle = app.add_subcommand("disentangle", "Compute C1 = W1 C0");
  disentangle->add_option("--model", model_path, "Model file")->required();
  disentangle->add_option("--formula", formula_path, "Formula for a census on C1");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a seeded multi-trial experiment");
  std::string experiment_name;
  experiment->add_option("name", experiment_name,
                         "paired|scaling|emergence|and_vs_or|cnf|vision|multi|disentangle");

  // heatmap
  auto* heatmap = app.add_subcommand("heatmap", "Render W1 (or C1) as an SVG heatmap");
  std::string rows = "all";
  bool use_c1 = false;
  double cell_size = 12.0;
  heatmap->add_option("--model", model_path, "Model file")->required();
  heatmap->add_option("--formula", formula_path, "Sort columns by clause");
  heatmap->add_option("--rows", rows, "all|positive|negative")
      ->check(CLI::IsMember({"all", "positive", "negative"}));
  heatmap->add_flag("--c1", use_c1, "Show C1 = W1 C0 instead of W1");
  heatmap->add_option("--cell-size", cell_size, "Cell edge in pixels");

  for (auto* sub : {gen_formula, gen_data, train_cmd, reconstruct, decode, disentangle,
                    experiment, heatmap, an_patterns, an_codes, an_bias, an_overlap})
    sub->fallthrough();
  analyze->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen_formula) {
      std::vector<fcc::Formula> fs_out;
      if (formula_kind == "paired") fs_out.push_back(fcc::random_paired_and(vars, common.seed));
      else if (formula_kind == "dnf")
        fs_out.push_back(fcc::random_dnf(vars, clauses, clause_size, negatives, common.seed));
      else if (formula_kind == "partition")
        for (std::size_t o = 0; o < outputs; ++o)
          fs_out.push_back(fcc::random_partition_dnf(vars, clause_size, negatives,
                                                     fcc::mix(common.seed, {o})));
      else if (formula_kind == "cnf") fs_out.push_back(fcc::random_cnf_pairs(vars, common.seed));
      else if (formula_kind == "or") fs_out.push_back(fcc::all_variables_or(vars));
      else fs_out.push_back(fcc::consecutive_run_formula(vars));
      if (as_json) {
        json j = fs_out.size() == 1 ? json(fs_out.front()) : json(fs_out);
        write_output(common.out, j.dump(1) + "\n");
      } else {
        write_output(common.out, formula_file_text(fs_out));
      }
    } else if (*gen_data) {
      const fcc::Distribution d = fcc::distribution_from_string(dist);
      std::vector<fcc::Formula> formulas;
      if (!formula_path.empty()) formulas = load_formulas(formula_path);
      const fcc::Dataset data = fcc::generate(d, formulas, vars, samples, common.seed);
      std::ostringstream ss;
      fcc::write_dataset(ss, data);
      write_output(common.out, ss.str());
      if (data.skipped > 0) std::cerr << "skipped " << data.skipped << " draws\n";
    } else if (*train_cmd) {
      const fcc::Dataset data = load_dataset(data_path);
      fcc::MlpModel model = fcc::init_model(
          {data.num_vars(), hidden, data.num_outputs()}, fcc::embedding_kind_from_string(embedding),
          fcc::mix(common.seed, {4}), !no_b2, fcc::bias_init_from_string(bias_init));
      tc.seed = fcc::mix(common.seed, {5});
      const auto history = fcc::train(model, data, tc);
      const auto err = fcc::test_error(model, data);
      std::cerr << "epochs " << history.epochs.size() << " loss "
                << (history.epochs.empty() ? 0.0 : history.epochs.back().loss) << " train_error "
                << err.joint_error() << (history.early_stopped ? " (early stop)" : "") << '\n';
      if (common.out.empty()) std::cout << fcc::model_to_json(model) << '\n';
      else fcc::save_model(common.out, model);
    } else if (*analyze) {
      const fcc::MlpModel model = fcc::load_model(model_path);
      const fcc::MlpModel view = coding_view(model);
      json result;
      if (*an_patterns || *an_bias || *an_overlap) {
        if (formula_path.empty()) throw fcc::ArgumentError("--formula is required");
      }
      if (*an_patterns) {
        const auto f = load_formula(formula_path);
        const auto hist = fcc::count_patterns(view, f, output);
        const auto signs = fcc::bias_stats(view, f, output);
        const auto base = fcc::random_baseline(
            model.hidden(), model.num_inputs(), signs.rho, signs.row_positive_fraction[0],
            signs.row_positive_fraction[1], f, baseline_samples, common.seed);
        result = {{"trained", histogram_summary(hist)}, {"random", histogram_summary(base)}};
      } else if (*an_codes) {
        std::ostringstream ss;
        if (formula_path.empty()) fcc::write_codes(ss, fcc::window_codes(view, run));
        else fcc::write_codes(ss, fcc::clause_codes(view, load_formula(formula_path), output));
        write_output(common.out, ss.str());
        return kExitOk;
      } else if (*an_bias) {
        result = bias_summary(fcc::bias_stats(model, load_formula(formula_path), output));
      } else {
        const auto o = fcc::overlap_stats(
            fcc::clause_codes(view, load_formula(formula_path), output));
        result = {{"coded", o.coded}, {"zero_code", o.zero_code}};
        if (o.mean_overlap) result["mean_overlap"] = *o.mean_overlap;
        if (o.mean_code_size) result["mean_code_size"] = *o.mean_code_size;
      }
      write_output(common.out, result.dump(1) + "\n");
    } else if (*reconstruct) {
      const fcc::MlpModel model = fcc::load_model(model_path);
      const auto pairing = fcc::reconstruct_pairs(coding_view(model).w1);
      json result = {{"partner", pairing.partner},
                     {"zero_variance_columns", pairing.zero_variance_columns}};
      if (!formula_path.empty())
        result["accuracy"] = fcc::pairing_accuracy(pairing, load_formula(formula_path));
      write_output(common.out, result.dump(1) + "\n");
    } else if (*decode) {
      const fcc::MlpModel model = coding_view(fcc::load_model(model_path));
      const fcc::Dataset data = load_dataset(data_path);
      dc.bias_mode = fcc::lab::bias_mode_from_string(bias_mode);
      fcc::validate(dc);
      const auto codes = fcc::window_codes(model, dc.run);
      const auto e = fcc::evaluate_decoder(model, codes, data, dc);
      const auto summary = fcc::summarize_codes(model, codes);
      json result = {{"decision_fpr", e.decision_fpr},
                     {"decision_fnr", e.decision_fnr},
                     {"decision_error", e.decision_error()},
                     {"fully_correct", e.fully_correct},
                     {"coding_rows", summary.unique_rows},
                     {"rows_per_position", summary.mean_rows_per_position},
                     {"coding_rows_negative_bias", summary.negative_bias_fraction}};
      write_output(common.out, result.dump(1) + "\n");
    } else if (*disentangle) {
      const fcc::MlpModel model = fcc::load_model(model_path);
      const fcc::Matrix c1 = fcc::disentangle_layer1(model);
      json result = {{"c1", c1}};
      if (!formula_path.empty())
        result["census"] = histogram_summary(
            fcc::census_on_matrix(c1, model.w2, load_formula(formula_path)));
      write_output(common.out, result.dump(1) + "\n");
    } else if (*experiment) {
      if (experiment_name.empty() && common.config.empty())
        throw fcc::ConfigError("experiment needs a name or --config");
      return cmd_experiment(experiment_name, common, seed_opt->count() > 0);
    } else if (*heatmap) {
      const fcc::MlpModel model = fcc::load_model(model_path);
      const fcc::Matrix m = use_c1 ? fcc::disentangle_layer1(model) : model.w1;
      std::vector<std::size_t> cols = fcc::lab::identity_order(m.cols());
      if (!formula_path.empty()) {
        if (m.cols() != model.num_inputs())
          throw fcc::ArgumentError("column sort needs --c1 or an identity embedding");
        cols = fcc::lab::clause_column_order(load_formula(formula_path));
      }
      std::vector<std::size_t> row_order = fcc::lab::identity_order(m.rows());
      if (rows != "all")
        row_order = fcc::lab::rows_of_class(
            fcc::witness_partition(model),
            rows == "positive" ? fcc::RowClass::kPositive : fcc::RowClass::kNegative);
      fcc::lab::HeatmapOptions opts;
      opts.cell_size = cell_size;
      const std::string svg = fcc::lab::heatmap_svg(m, row_order, cols, opts);
      write_output(common.out, svg);
    }
  } catch (const fcc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
