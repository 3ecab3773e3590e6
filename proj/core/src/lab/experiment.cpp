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

#include "fcc/lab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fcc/codes.hpp"
#include "fcc/disentangle.hpp"
#include "fcc/error.hpp"
#include "fcc/formula.hpp"
#include "fcc/json_io.hpp"
#include "fcc/patterns.hpp"
#include "fcc/rng.hpp"
#include "fcc/sampler.hpp"

namespace fcc::lab {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kReportVersion = 1;

enum SeedSlot : std::uint64_t {
  kFormulaSeed = 1,
  kTrainDataSeed,
  kTestDataSeed,
  kModelSeed,
  kTrainSeed,
  kBaselineSeed,
  kRoundTripSeed,
};

std::uint64_t sub_seed(std::uint64_t seed, SeedSlot slot) { return mix(seed, {slot}); }

struct Cell {
  std::size_t j = 0;
  std::size_t k = 0;
  std::string task;
};

std::vector<Cell> make_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (std::size_t j : c.hidden) {
    switch (c.experiment) {
      case ExperimentKind::kScaling:
      case ExperimentKind::kEmergence:
        for (std::size_t k : c.clauses) cells.push_back({j, k, {}});
        break;
      case ExperimentKind::kAndVsOr:
        cells.push_back({j, c.num_vars / 2, "and"});
        cells.push_back({j, c.num_vars, "or"});
        break;
      case ExperimentKind::kVision:
        cells.push_back({j, c.num_vars - c.decoder.run + 1, {}});
        break;
      case ExperimentKind::kMulti:
        cells.push_back({j, c.num_vars / c.clause_size, {}});
        break;
      default:
        cells.push_back({j, c.num_vars / 2, {}});
        break;
    }
  }
  return cells;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Trial count is left out so that extending a run keeps earlier records.
std::string config_digest(const ExperimentConfig& c) {
  json j = config_to_json(c);
  j.erase("trials");
  return fnv1a_hex(j.dump());
}

std::string epoch_key(double epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", epoch);
  return buf;
}

json histogram_to_json(const PatternHistogram& h) {
  json j;
  j["clause_size"] = h.clause_size;
  j["num_clauses"] = h.num_clauses;
  j["rows"] = h.rows;
  j["rho"] = h.rho;
  j["by_positives"] = h.by_positives;
  j["aligned"] = h.aligned;
  j["p3n1_c"] = h.p3n1_c;
  j["p3n1_nc"] = h.p3n1_nc;
  j["one_negated"] = h.one_negated;
  return j;
}

PatternHistogram histogram_from_json(const json& j) {
  PatternHistogram h;
  h.clause_size = j.at("clause_size").get<std::size_t>();
  h.num_clauses = j.at("num_clauses").get<std::size_t>();
  h.rows = j.at("rows").get<std::array<std::size_t, 2>>();
  h.rho = j.at("rho").get<double>();
  j.at("by_positives").get_to(h.by_positives);
  j.at("aligned").get_to(h.aligned);
  j.at("p3n1_c").get_to(h.p3n1_c);
  j.at("p3n1_nc").get_to(h.p3n1_nc);
  h.one_negated = j.at("one_negated").get<std::vector<bool>>();
  return h;
}

json bias_stats_to_json(const BiasStats& b) {
  return {{"rho", b.rho},
          {"positive_rows", b.positive_rows},
          {"positive_rows_negative_bias", b.positive_rows_negative_bias},
          {"mean_bias_positive_rows", b.mean_bias_positive_rows},
          {"mean_bias_negative_rows", b.mean_bias_negative_rows},
          {"positive_fraction", b.positive_fraction},
          {"row_positive_fraction", b.row_positive_fraction},
          {"positive_fraction_split", b.positive_fraction_split},
          {"mean_abs_split", b.mean_abs_split},
          {"entries_split", b.entries_split}};
}

json overlap_to_json(const OverlapStats& o) {
  json j = {{"coded", o.coded}, {"zero_code", o.zero_code}};
  if (o.mean_overlap) j["mean_overlap"] = *o.mean_overlap;
  if (o.mean_code_size) j["mean_code_size"] = *o.mean_code_size;
  return j;
}

bool has_one_negated(const PatternHistogram& h) {
  return std::find(h.one_negated.begin(), h.one_negated.end(), true) != h.one_negated.end();
}

void census_metrics(json& m, const PatternHistogram& h, const std::string& prefix) {
  for (std::size_t c = 0; c < 2; ++c) {
    const auto rc = static_cast<RowClass>(c);
    const std::string cls = prefix + (c == 0 ? "pos_" : "neg_");
    for (std::size_t p = 0; p <= h.clause_size; ++p)
      m[cls + pattern_name(p, h.clause_size)] = h.positives_per_clause(rc, p);
    m[cls + "aligned"] = h.aligned_per_clause(rc);
    if (h.clause_size == 4 && has_one_negated(h)) {
      m[cls + "3P1Nc"] = h.per_clause(rc, PatternType::kP3N1c);
      m[cls + "3P1Nnc"] = h.per_clause(rc, PatternType::kP3N1nc);
    }
  }
}

// Same network with layer 1 replaced by C1 = W1 C0 over an identity embedding.
MlpModel coding_view(const MlpModel& model) {
  if (model.embedding.kind == EmbeddingKind::kIdentity) return model;
  MlpModel view = model;
  view.w1 = disentangle_layer1(model);
  view.embedding = make_embedding(EmbeddingKind::kIdentity, model.num_inputs(), 0);
  return view;
}

double max_abs_bias_positive_rows(const MlpModel& model, std::size_t output) {
  const auto part = witness_partition(model);
  double out = 0.0;
  for (std::size_t r : part.rows_for_output(output)) out = std::max(out, std::abs(model.b1[r]));
  return out;
}

double positive_entry_fraction(const Matrix& m, std::span<const std::size_t> rows) {
  if (rows.empty() || m.cols() == 0) return 0.5;
  std::size_t pos = 0;
  for (std::size_t r : rows)
    for (double v : m.row(r)) pos += v > 0.0 ? 1 : 0;
  return static_cast<double>(pos) / static_cast<double>(rows.size() * m.cols());
}

struct TrialContext {
  const ExperimentConfig& config;
  const Cell& cell;
  std::uint64_t seed;
  std::optional<BiasMode> decoder_mode;
};

// Bias statistics, pattern census against a sign-matched random baseline and
// code overlap of a single-output model, all in coding space.
void analyze_single(json& rec, json& m, const MlpModel& model, const Formula& f,
                    const TrialContext& ctx, const std::string& prefix = {}) {
  const MlpModel view = coding_view(model);
  const BiasStats bias = bias_stats(model, f);
  const BiasStats signs = bias_stats(view, f);
  const PatternHistogram hist = count_patterns(view, f);
  const PatternHistogram base =
      random_baseline(model.hidden(), model.num_inputs(), signs.rho,
                      signs.row_positive_fraction[0], signs.row_positive_fraction[1], f,
                      ctx.config.baseline_samples, sub_seed(ctx.seed, kBaselineSeed));
  const CodeSet codes = clause_codes(view, f);
  const OverlapStats overlap = overlap_stats(codes);

  rec[prefix + "bias_stats"] = bias_stats_to_json(bias);
  rec[prefix + "histogram"] = histogram_to_json(hist);
  rec[prefix + "baseline"] = histogram_to_json(base);
  rec[prefix + "overlap"] = overlap_to_json(overlap);

  m[prefix + "rho"] = bias.rho;
  m[prefix + "negative_row_fraction"] = 1.0 - bias.rho;
  m[prefix + "positive_rows"] = bias.positive_rows;
  m[prefix + "mean_bias_positive_rows"] = bias.mean_bias_positive_rows;
  m[prefix + "mean_bias_negative_rows"] = bias.mean_bias_negative_rows;
  m[prefix + "positive_rows_negative_bias"] = bias.positive_rows_negative_bias;
  m[prefix + "max_abs_bias_positive_rows"] = max_abs_bias_positive_rows(model, 0);
  m[prefix + "zero_code_clauses"] = overlap.zero_code;
  if (overlap.mean_overlap) m[prefix + "mean_overlap"] = *overlap.mean_overlap;
  if (overlap.mean_code_size) m[prefix + "mean_code_size"] = *overlap.mean_code_size;
  census_metrics(m, hist, prefix);
  census_metrics(m, base, prefix + "rnd_");
}

struct Trained {
  MlpModel model;
  TrainHistory history;
};

Trained fit(const TrialContext& ctx, const Dataset& data, std::size_t outputs,
            EmbeddingKind embedding) {
  const auto& c = ctx.config;
  Trained t;
  t.model = init_model({c.num_vars, ctx.cell.j, outputs}, embedding,
                       sub_seed(ctx.seed, kModelSeed), c.use_b2, c.bias_init);
  TrainConfig tc = c.train;
  tc.seed = sub_seed(ctx.seed, kTrainSeed);
  t.history = train(t.model, data, tc);
  return t;
}

void training_metrics(json& rec, json& m, const Trained& t, const Dataset& train_data,
                      const Dataset& test_data) {
  const auto train_err = test_error(t.model, train_data);
  m["train_error"] = train_err.joint_error();
  if (!test_data.empty()) {
    const auto test_err = test_error(t.model, test_data);
    m["test_error"] = test_err.joint_error();
    m["test_accuracy"] = test_err.all_correct;
  }
  m["epochs"] = t.history.epochs.size();
  m["final_loss"] = t.history.epochs.empty() ? 0.0 : t.history.epochs.back().loss;
  rec["early_stopped"] = t.history.early_stopped;
  json curve = json::array();
  for (const auto& e : t.history.epochs) curve.push_back({e.epoch, e.loss, e.error});
  rec["epochs"] = std::move(curve);
}

json run_paired(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  const Formula f = random_paired_and(c.num_vars, sub_seed(ctx.seed, kFormulaSeed));
  const Dataset train_data = sample_paired(f, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
  const Dataset test_data = sample_paired(f, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  const Trained t = fit(ctx, train_data, 1, c.embedding);
  rec["formula"] = to_text(f);
  training_metrics(rec, m, t, train_data, test_data);
  m["pairing_accuracy"] = pairing_accuracy(reconstruct_pairs(coding_view(t.model).w1), f);
  analyze_single(rec, m, t.model, f, ctx);
  return m;
}

json run_scaling(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  const Formula f = random_dnf(c.num_vars, ctx.cell.k, c.clause_size, c.negatives_per_clause,
                               sub_seed(ctx.seed, kFormulaSeed));
  const Dataset train_data = sample_dnf4(f, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
  const Dataset test_data = sample_dnf4(f, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  const Trained t = fit(ctx, train_data, 1, c.embedding);
  rec["formula"] = to_text(f);
  training_metrics(rec, m, t, train_data, test_data);
  analyze_single(rec, m, t.model, f, ctx);
  m["packing_limit"] = packing_limit(static_cast<double>(ctx.cell.j),
                                     static_cast<double>(c.num_vars),
                                     static_cast<double>(ctx.cell.k), m["rho"].get<double>());

  if (!t.history.snapshots.empty()) {
    json points = json::array();
    for (const auto& s : t.history.snapshots) {
      const PatternHistogram h = census_on_matrix(disentangle_layer1(s.model), s.model.w2, f);
      const std::string key = "@" + epoch_key(s.scheduled);
      json p = {{"scheduled", s.scheduled}, {"epoch", s.epoch}, {"loss", s.loss},
                {"error", s.error}};
      json pm;
      census_metrics(pm, h, {});
      for (auto& [name, value] : pm.items()) {
        p[name] = value;
        m[name + key] = value;
      }
      m["error" + key] = s.error;
      points.push_back(std::move(p));
    }
    rec["emergence"] = std::move(points);
  }
  return m;
}

json run_and_vs_or(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  Formula f;
  Dataset train_data;
  Dataset test_data;
  if (ctx.cell.task == "and") {
    f = random_paired_and(c.num_vars, sub_seed(ctx.seed, kFormulaSeed));
    train_data = sample_paired(f, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
    test_data = sample_paired(f, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  } else {
    f = all_variables_or(c.num_vars);
    train_data = sample_or(c.num_vars, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
    test_data = sample_or(c.num_vars, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  }
  const Trained t = fit(ctx, train_data, 1, c.embedding);
  rec["formula"] = to_text(f);
  training_metrics(rec, m, t, train_data, test_data);
  analyze_single(rec, m, t.model, f, ctx);
  return m;
}

json run_cnf(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  const Formula f = random_cnf_pairs(c.num_vars, sub_seed(ctx.seed, kFormulaSeed));
  const Dataset train_data = sample_cnf(f, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
  const Dataset test_data = sample_cnf(f, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  const Trained t = fit(ctx, train_data, 1, c.embedding);
  rec["formula"] = to_text(f);
  training_metrics(rec, m, t, train_data, test_data);
  // Negative rows compute the negated clauses of the dual DNF.
  analyze_single(rec, m, t.model, demorgan_dual(f), ctx);
  return m;
}

json run_disentangle(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  const Formula f = random_paired_and(c.num_vars, sub_seed(ctx.seed, kFormulaSeed));
  const Dataset train_data = sample_paired(f, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
  const Dataset test_data = sample_paired(f, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  const Trained t = fit(ctx, train_data, 1, c.embedding);
  rec["formula"] = to_text(f);
  training_metrics(rec, m, t, train_data, test_data);
  analyze_single(rec, m, t.model, f, ctx, "c1_");

  // The same census on raw W1 against a baseline matched to W1's signs.
  MlpModel raw = t.model;
  raw.embedding = make_embedding(EmbeddingKind::kIdentity, c.num_vars, 0);
  analyze_single(rec, m, raw, f, ctx, "w1_");
  m["pairing_accuracy"] = pairing_accuracy(reconstruct_pairs(disentangle_layer1(t.model)), f);

  // Round trip: plant C1*, set W1 = C1* C0^+, and recover it.
  Rng rng(sub_seed(ctx.seed, kRoundTripSeed));
  Matrix planted(t.model.hidden(), c.num_vars);
  for (double& v : planted.data()) v = rng.uniform(-1.0, 1.0);
  MlpModel probe = t.model;
  probe.w1 = multiply(planted, t.model.embedding.left_inverse);
  m["roundtrip_error"] = max_abs_difference(disentangle_layer1(probe), planted);
  return m;
}

DecoderEvaluation decode(const MlpModel& model, const CodeSet& codes, const Dataset& data,
                         DecoderConfig dc, BiasMode mode) {
  dc.bias_mode = mode;
  return evaluate_decoder(model, codes, data, dc);
}

json decoder_json(const DecoderEvaluation& e) {
  return {{"decision_fpr", e.decision_fpr},
          {"decision_fnr", e.decision_fnr},
          {"decision_error", e.decision_error()},
          {"fully_correct", e.fully_correct},
          {"positives", e.positives},
          {"negatives", e.negatives}};
}

json run_vision(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  const Dataset train_data =
      sample_consecutive_four(c.num_vars, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
  const Dataset test_data =
      sample_consecutive_four(c.num_vars, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  const Trained t = fit(ctx, train_data, 1, c.embedding);
  rec["formula"] = to_text(consecutive_run_formula(c.num_vars, c.decoder.run));
  training_metrics(rec, m, t, train_data, test_data);

  const MlpModel view = coding_view(t.model);
  const CodeSet codes = window_codes(view, c.decoder.run);
  const CodingSummary summary = summarize_codes(view, codes);
  m["coding_rows"] = summary.unique_rows;
  m["rows_per_position"] = summary.mean_rows_per_position;
  m["coding_rows_negative_bias"] = summary.negative_bias_fraction;
  m["positions_with_code"] = summary.positions_with_code;

  json dec;
  for (BiasMode mode : {BiasMode::kSubtractSigned, BiasMode::kSubtractMagnitude}) {
    const auto e = decode(view, codes, test_data, c.decoder, mode);
    const std::string name(to_string(mode));
    dec[name] = decoder_json(e);
    m["decoder_" + name + "_error"] = e.decision_error();
    m["decoder_" + name + "_fully_correct"] = e.fully_correct;
  }
  if (ctx.decoder_mode) {
    const std::string chosen(to_string(*ctx.decoder_mode));
    dec["bias_mode"] = chosen;
    for (const auto& [k, v] : dec[chosen].items())
      if (k != "positives" && k != "negatives") m[k] = v;
  }
  rec["decoder"] = std::move(dec);
  return m;
}

json run_multi(const TrialContext& ctx, json& rec) {
  const auto& c = ctx.config;
  json m;
  std::vector<Formula> formulas;
  for (std::size_t o = 0; o < c.outputs; ++o)
    formulas.push_back(random_partition_dnf(c.num_vars, c.clause_size, c.negatives_per_clause,
                                            mix(sub_seed(ctx.seed, kFormulaSeed), {o})));
  const Dataset train_data = sample_multi(formulas, c.train_samples, sub_seed(ctx.seed, kTrainDataSeed));
  const Dataset test_data = sample_multi(formulas, c.test_samples, sub_seed(ctx.seed, kTestDataSeed));
  const Trained t = fit(ctx, train_data, c.outputs, c.embedding);
  json texts = json::array();
  for (const auto& f : formulas) texts.push_back(to_text(f));
  rec["formula"] = std::move(texts);
  training_metrics(rec, m, t, train_data, test_data);
  rec["train_skipped"] = train_data.skipped;

  const MlpModel view = coding_view(t.model);
  const WitnessPartition part = witness_partition(t.model);
  m["negative_row_fraction"] = 1.0 - part.rho();
  m["tied_rows"] = part.tied_rows.size();
  json outputs = json::array();
  for (std::size_t o = 0; o < c.outputs; ++o) {
    const std::string prefix = "o" + std::to_string(o) + "_";
    const auto rows = part.rows_for_output(o);
    const PatternHistogram hist = census_on_matrix(view.w1, view.w2, formulas[o], o);
    const std::size_t j_eff = rows.size() + part.negative_rows.size();
    const double rho =
        j_eff == 0 ? 0.0 : static_cast<double>(rows.size()) / static_cast<double>(j_eff);
    const PatternHistogram base = random_baseline(
        j_eff, c.num_vars, rho, positive_entry_fraction(view.w1, rows),
        positive_entry_fraction(view.w1, part.negative_rows), formulas[o], c.baseline_samples,
        mix(sub_seed(ctx.seed, kBaselineSeed), {o}));
    const OverlapStats overlap = overlap_stats(clause_codes(view, formulas[o], o));
    m[prefix + "rows"] = rows.size();
    m[prefix + "zero_code_clauses"] = overlap.zero_code;
    census_metrics(m, hist, prefix);
    census_metrics(m, base, prefix + "rnd_");
    outputs.push_back({{"rows", rows.size()},
                       {"histogram", histogram_to_json(hist)},
                       {"baseline", histogram_to_json(base)},
                       {"overlap", overlap_to_json(overlap)}});
  }
  rec["outputs"] = std::move(outputs);
  return m;
}

json run_trial(const TrialContext& ctx, json& rec) {
  switch (ctx.config.experiment) {
    case ExperimentKind::kPaired: return run_paired(ctx, rec);
    case ExperimentKind::kScaling:
    case ExperimentKind::kEmergence: return run_scaling(ctx, rec);
    case ExperimentKind::kAndVsOr: return run_and_vs_or(ctx, rec);
    case ExperimentKind::kCnf: return run_cnf(ctx, rec);
    case ExperimentKind::kVision: return run_vision(ctx, rec);
    case ExperimentKind::kMulti: return run_multi(ctx, rec);
    case ExperimentKind::kDisentangle: return run_disentangle(ctx, rec);
  }
  throw ArgumentError("unknown experiment");
}

json trial_record(const TrialContext& ctx, std::size_t cell, std::size_t trial,
                  const std::string& digest) {
  json rec;
  rec["cell"] = cell;
  rec["trial"] = trial;
  rec["seed"] = ctx.seed;
  rec["config_digest"] = digest;
  try {
    json metrics = run_trial(ctx, rec);
    rec["metrics"] = std::move(metrics);
    rec["status"] = "ok";
  } catch (const std::exception& e) {
    rec["status"] = "failed";
    rec["error"] = e.what();
    rec.erase("metrics");
  }
  return rec;
}

std::optional<json> read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw FormatError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

fs::path trial_path(const fs::path& dir, std::size_t cell, std::size_t trial) {
  char name[64];
  std::snprintf(name, sizeof name, "c%03zu_t%03zu.json", cell, trial);
  return dir / "trials" / name;
}

// Trains one extra model off the trial seeds and keeps the bias mode with
// the lower decision error; ties go to the fully-correct rate, then signed.
json calibrate_decoder(const ExperimentConfig& config, const Cell& cell) {
  const std::uint64_t seed = mix(config.seed, {0xCA1B});
  const TrialContext ctx{config, cell, seed, std::nullopt};
  json rec;
  const json m = run_vision(ctx, rec);
  const json& s = rec["decoder"]["signed"];
  const json& g = rec["decoder"]["magnitude"];
  const double es = s["decision_error"].get<double>();
  const double eg = g["decision_error"].get<double>();
  bool magnitude = eg < es;
  if (eg == es) magnitude = g["fully_correct"].get<double>() > s["fully_correct"].get<double>();
  return {{"seed", seed},
          {"chosen", magnitude ? "magnitude" : "signed"},
          {"signed", s},
          {"magnitude", g},
          {"test_accuracy", m["test_accuracy"]}};
}

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, std::size_t trial) {
  return mix(master, {cell, trial});
}

json aggregate(const std::vector<json>& trials, std::size_t num_cells) {
  std::vector<std::map<std::string, std::vector<double>>> values(num_cells);
  for (const auto& rec : trials) {
    if (rec.value("status", "") != "ok") continue;
    const std::size_t cell = rec.at("cell").get<std::size_t>();
    if (cell >= num_cells) throw FormatError("trial record names an unknown cell");
    for (const auto& [name, v] : rec.at("metrics").items())
      if (v.is_number()) values[cell][name].push_back(v.get<double>());
  }
  json out = json::array();
  for (const auto& cell : values) {
    json agg = json::object();
    for (const auto& [name, xs] : cell) {
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double n = static_cast<double>(xs.size());
      const double mean = sum / n;
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      agg[name] = {{"mean", finite_or_zero(mean)}, {"std", finite_or_zero(sd)}, {"n", xs.size()}};
    }
    out.push_back(std::move(agg));
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const auto cells = make_cells(config);
  const std::string digest = config_digest(config);
  std::mutex log_mutex;
  const auto log = [&](const std::string& msg) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    options.log(msg);
  };

  if (options.out_dir) fs::create_directories(*options.out_dir / "trials");

  RunReport report;
  report.config = config_to_json(config);
  report.cells = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    json c = {{"cell", i}, {"j", cells[i].j}, {"k", cells[i].k}};
    if (!cells[i].task.empty()) c["task"] = cells[i].task;
    report.cells.push_back(std::move(c));
  }
  report.extra = json::object();

  std::optional<BiasMode> decoder_mode = config.decoder_bias_mode;
  if (config.experiment == ExperimentKind::kVision) {
    if (decoder_mode) {
      report.extra["decoder_calibration"] = {{"chosen", std::string(to_string(*decoder_mode))},
                                             {"fixed", true}};
    } else {
      std::optional<json> cached;
      const auto path = options.out_dir ? *options.out_dir / "calibration.json" : fs::path{};
      if (options.out_dir) {
        cached = read_json_file(path);
        if (cached && cached->value("config_digest", "") != digest) cached.reset();
      }
      json cal;
      if (cached) {
        cal = std::move(*cached);
        cal.erase("config_digest");
      } else {
        log("calibrating decoder bias mode");
        cal = calibrate_decoder(config, cells.front());
        if (options.out_dir) {
          json stored = cal;
          stored["config_digest"] = digest;
          write_text_atomic(path, dump(stored));
        }
      }
      decoder_mode = bias_mode_from_string(cal.at("chosen").get<std::string>());
      report.extra["decoder_calibration"] = std::move(cal);
    }
  }

  const std::size_t num_tasks = cells.size() * config.trials;
  std::vector<json> results(num_tasks);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t idx = next++; idx < num_tasks; idx = next++) {
      const std::size_t cell = idx / config.trials;
      const std::size_t trial = idx % config.trials;
      const TrialContext ctx{config, cells[cell], trial_seed(config.seed, cell, trial),
                             decoder_mode};
      if (options.out_dir) {
        const auto path = trial_path(*options.out_dir, cell, trial);
        if (auto rec = read_json_file(path);
            rec && rec->value("config_digest", "") == digest &&
            rec->value("seed", std::uint64_t{0}) == ctx.seed) {
          results[idx] = std::move(*rec);
          log("cell " + std::to_string(cell) + " trial " + std::to_string(trial) + ": reused");
          continue;
        }
      }
      json rec = trial_record(ctx, cell, trial, digest);
      if (options.out_dir) write_text_atomic(trial_path(*options.out_dir, cell, trial), dump(rec));
      log("cell " + std::to_string(cell) + " trial " + std::to_string(trial) + ": " +
          rec["status"].get<std::string>());
      results[idx] = std::move(rec);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(options.parallel, 1, std::max<std::size_t>(num_tasks, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  report.trials = std::move(results);
  for (const auto& rec : report.trials)
    if (rec.value("status", "") != "ok") ++report.failed;
  report.aggregates = aggregate(report.trials, cells.size());
  return report;
}

json report_to_json(const RunReport& r) {
  json j;
  j["format"] = "fcc-report";
  j["version"] = kReportVersion;
  j["config"] = r.config;
  j["cells"] = r.cells.is_null() ? json::array() : r.cells;
  j["trials"] = r.trials;
  j["aggregates"] = r.aggregates.is_null() ? json::array() : r.aggregates;
  j["extra"] = r.extra.is_null() ? json::object() : r.extra;
  j["failed"] = r.failed;
  return j;
}

RunReport report_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "fcc-report")
    throw FormatError("not a report document");
  if (j.value("version", 0) != kReportVersion) throw FormatError("unsupported report version");
  RunReport r;
  try {
    r.config = j.at("config");
    r.cells = j.at("cells");
    r.trials = j.at("trials").get<std::vector<json>>();
    r.aggregates = j.at("aggregates");
    r.extra = j.at("extra");
    r.failed = j.at("failed").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  if (!r.cells.is_array() || !r.aggregates.is_array() || r.aggregates.size() != r.cells.size())
    throw FormatError("report cells and aggregates disagree");
  return r;
}

namespace {

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.precision(17);
  return out;
}

std::string cell_task(const RunReport& r, std::size_t cell) {
  return r.cells.at(cell).value("task", std::string{});
}

std::size_t cell_field(const RunReport& r, std::size_t cell, const char* key) {
  return r.cells.at(cell).at(key).get<std::size_t>();
}

void write_metrics_csv(const RunReport& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "j,k,trial,metric,value\n";
  for (const auto& rec : r.trials) {
    if (rec.value("status", "") != "ok") continue;
    const std::size_t cell = rec.at("cell").get<std::size_t>();
    const std::string task = cell_task(r, cell);
    for (const auto& [name, v] : rec.at("metrics").items()) {
      if (!v.is_number()) continue;
      out << cell_field(r, cell, "j") << ',' << cell_field(r, cell, "k") << ','
          << rec.at("trial").get<std::size_t>() << ',' << (task.empty() ? "" : task + ".")
          << name << ',' << v.get<double>() << '\n';
    }
  }
}

void write_summary_csv(const RunReport& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "j,k,task,metric,mean,std,n\n";
  for (std::size_t cell = 0; cell < r.aggregates.size(); ++cell)
    for (const auto& [name, a] : r.aggregates[cell].items())
      out << cell_field(r, cell, "j") << ',' << cell_field(r, cell, "k") << ','
          << cell_task(r, cell) << ',' << name << ',' << a.at("mean").get<double>() << ','
          << a.at("std").get<double>() << ',' << a.at("n").get<std::size_t>() << '\n';
}

void write_histograms_csv(const RunReport& r, const fs::path& path, const char* key) {
  auto out = open_csv(path);
  write_histogram_csv_header(out);
  for (const auto& rec : r.trials) {
    if (rec.value("status", "") != "ok" || !rec.contains(key)) continue;
    const std::size_t cell = rec.at("cell").get<std::size_t>();
    write_histogram_csv(out, histogram_from_json(rec.at(key)), cell_field(r, cell, "k"),
                        cell_field(r, cell, "j"), rec.at("trial").get<std::size_t>());
  }
}

void write_bias_table(const RunReport& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "task,j,average_bias,average_bias_std,max_abs_bias,negative_bias_rows,trials\n";
  for (std::size_t cell = 0; cell < r.aggregates.size(); ++cell) {
    const auto& a = r.aggregates[cell];
    if (!a.contains("mean_bias_positive_rows")) continue;
    out << cell_task(r, cell) << ',' << cell_field(r, cell, "j") << ','
        << a["mean_bias_positive_rows"]["mean"].get<double>() << ','
        << a["mean_bias_positive_rows"]["std"].get<double>() << ','
        << a["max_abs_bias_positive_rows"]["mean"].get<double>() << ','
        << a["positive_rows_negative_bias"]["mean"].get<double>() << ','
        << a["mean_bias_positive_rows"]["n"].get<std::size_t>() << '\n';
  }
}

void write_decoder_csv(const RunReport& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "j,trial,bias_mode,decision_fpr,decision_fnr,decision_error,fully_correct\n";
  for (const auto& rec : r.trials) {
    if (rec.value("status", "") != "ok") continue;
    const std::size_t cell = rec.at("cell").get<std::size_t>();
    for (const auto& [mode, e] : rec.at("decoder").items()) {
      if (!e.is_object()) continue;
      out << cell_field(r, cell, "j") << ',' << rec.at("trial").get<std::size_t>() << ','
          << mode << ',' << e.at("decision_fpr").get<double>() << ','
          << e.at("decision_fnr").get<double>() << ',' << e.at("decision_error").get<double>()
          << ',' << e.at("fully_correct").get<double>() << '\n';
    }
  }
}

void write_emergence_csv(const RunReport& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "j,k,trial,scheduled,epoch,metric,value\n";
  for (const auto& rec : r.trials) {
    if (rec.value("status", "") != "ok" || !rec.contains("emergence")) continue;
    const std::size_t cell = rec.at("cell").get<std::size_t>();
    for (const auto& p : rec.at("emergence")) {
      for (const auto& [name, v] : p.items()) {
        if (name == "scheduled" || name == "epoch") continue;
        out << cell_field(r, cell, "j") << ',' << cell_field(r, cell, "k") << ','
            << rec.at("trial").get<std::size_t>() << ',' << p.at("scheduled").get<double>()
            << ',' << p.at("epoch").get<double>() << ',' << name << ',' << v.get<double>()
            << '\n';
      }
    }
  }
}

}  // namespace

void emit_report(const RunReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_atomic(dir / "report.json", dump(report_to_json(report)));
  write_metrics_csv(report, dir / "metrics.csv");
  write_summary_csv(report, dir / "summary.csv");
  write_histograms_csv(report, dir / "histograms.csv", "histogram");
  write_histograms_csv(report, dir / "histograms_random.csv", "baseline");
  const std::string experiment =
      report.config.is_object() ? report.config.value("experiment", std::string{}) : "";
  if (experiment == "and_vs_or") write_bias_table(report, dir / "bias_table.csv");
  if (experiment == "vision") write_decoder_csv(report, dir / "decoder.csv");
  if (experiment == "emergence" || experiment == "scaling")
    write_emergence_csv(report, dir / "emergence.csv");
}

RunReport load_report(const fs::path& report_json) {
  std::ifstream in(report_json);
  if (!in) throw FormatError("cannot open " + report_json.string());
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError(report_json.string() + " is not valid JSON: " + e.what());
  }
}

double metric_mean(const RunReport& report, std::size_t cell, std::string_view metric) {
  if (cell >= report.aggregates.size()) throw ArgumentError("no such cell");
  const auto& a = report.aggregates[cell];
  const std::string key(metric);
  if (!a.contains(key)) throw ArgumentError("metric '" + key + "' missing from cell");
  return a[key]["mean"].get<double>();
}

std::size_t metric_count(const RunReport& report, std::size_t cell, std::string_view metric) {
  if (cell >= report.aggregates.size()) return 0;
  const auto& a = report.aggregates[cell];
  const std::string key(metric);
  return a.contains(key) ? a[key]["n"].get<std::size_t>() : 0;
}

std::size_t find_cell(const RunReport& report, std::size_t j, std::size_t k,
                      std::string_view task) {
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& c = report.cells[i];
    if (c.at("j").get<std::size_t>() == j && c.at("k").get<std::size_t>() == k &&
        c.value("task", std::string{}) == task)
      return i;
  }
  throw ArgumentError("no cell with j=" + std::to_string(j) + " k=" + std::to_string(k));
}

}  // namespace fcc::lab
