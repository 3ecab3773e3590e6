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

#include <gtest/gtest.h>

#include "fcc/construct.hpp"
#include "fcc/error.hpp"
#include "fcc/model.hpp"
#include "fcc/rng.hpp"
#include "fcc/sampler.hpp"
#include "fcc/trainer.hpp"
#include "support/oracles.hpp"

namespace fcc {
namespace {

Dataset random_dataset(std::size_t vars, std::size_t outputs, std::size_t n, std::uint64_t seed) {
  Dataset d(vars, outputs, "random", seed);
  Rng rng(seed);
  std::vector<std::uint8_t> x(vars), y(outputs);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& b : x) b = rng.bernoulli(0.5);
    for (auto& b : y) b = rng.bernoulli(0.5);
    d.add(x, y);
  }
  return d;
}

// |a - b| <= 1e-4 max(|a|, |b|); entries that are zero on both sides up to
// 1e-9 (dead ReLU rows) count as equal.
bool gradients_agree(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  return diff < 1e-9 || diff <= 1e-4 * std::max(std::abs(analytic), std::abs(numeric));
}

template <typename Get>
void check_parameter(MlpModel& m, const Dataset& d, std::span<const std::size_t> idx,
                     double analytic, Get get, const std::string& what) {
  constexpr double h = 1e-4;
  double& p = get(m);
  const double saved = p;
  p = saved + h;
  const double up = oracle::loss(m, d, idx);
  p = saved - h;
  const double down = oracle::loss(m, d, idx);
  p = saved;
  const double numeric = (up - down) / (2 * h);
  EXPECT_TRUE(gradients_agree(analytic, numeric))
      << what << " analytic " << analytic << " numeric " << numeric;
}

TEST(Trainer, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t outputs = 1 + seed % 2;
    const auto kind = seed % 3 == 0 ? EmbeddingKind::kRandomSymmetric : EmbeddingKind::kIdentity;
    MlpModel m = init_model({6, 4, outputs}, kind, seed);
    const Dataset d = random_dataset(6, outputs, 24, seed + 100);
    std::vector<std::size_t> idx(d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const auto lg = loss_and_gradient(m, d, idx);
    EXPECT_NEAR(lg.loss, oracle::loss(m, d, idx), 1e-12);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < m.w1.cols(); ++c)
        check_parameter(m, d, idx, lg.gradient.w1(r, c),
                        [&](MlpModel& mm) -> double& { return mm.w1(r, c); }, "w1");
      check_parameter(m, d, idx, lg.gradient.b1[r],
                      [&](MlpModel& mm) -> double& { return mm.b1[r]; }, "b1");
      for (std::size_t t = 0; t < outputs; ++t)
        check_parameter(m, d, idx, lg.gradient.w2(t, r),
                        [&](MlpModel& mm) -> double& { return mm.w2(t, r); }, "w2");
    }
    for (std::size_t t = 0; t < outputs; ++t)
      check_parameter(m, d, idx, lg.gradient.b2[t],
                      [&](MlpModel& mm) -> double& { return mm.b2[t]; }, "b2");
  }
}

TEST(Model, InitSignsAndBiasRange) {
  const MlpModel m = init_model({64, 64, 1}, EmbeddingKind::kIdentity, 5);
  std::size_t positive = 0;
  for (double v : m.w1.data()) positive += v > 0.0;
  EXPECT_NEAR(static_cast<double>(positive) / static_cast<double>(m.w1.data().size()), 0.5, 0.05);
  for (double b : m.b1) EXPECT_LE(std::abs(b), 1.0);
  for (double b : m.b2) EXPECT_LE(std::abs(b), 1.0);
  EXPECT_EQ(m, init_model({64, 64, 1}, EmbeddingKind::kIdentity, 5));
  EXPECT_NE(m, init_model({64, 64, 1}, EmbeddingKind::kIdentity, 6));

  const MlpModel f = init_model({16, 16, 1}, EmbeddingKind::kIdentity, 5, true, BiasInit::kFanIn);
  for (double b : f.b1) EXPECT_LE(std::abs(b), 0.25);
  const MlpModel nb = init_model({16, 16, 1}, EmbeddingKind::kIdentity, 5, false);
  for (double b : nb.b2) EXPECT_EQ(b, 0.0);
}

TEST(Model, ForwardMatchesOracleAndTrace) {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MlpModel m = init_model({8, 6, 2}, EmbeddingKind::kHadamard, seed);
    std::vector<std::uint8_t> x(8);
    for (auto& b : x) b = rng.bernoulli(0.5);
    const auto res = forward(m, x);
    const auto z = oracle::logits(m, x);
    for (std::size_t t = 0; t < 2; ++t) {
      EXPECT_NEAR(res.trace.outputs[t].logit, z[t], 1e-12);
      double sum = m.b2[t];
      for (const auto& h : res.trace.hidden) sum += h.contribution[t];
      EXPECT_NEAR(res.trace.outputs[t].logit, sum, 1e-10 * std::max(1.0, std::abs(sum)));
      EXPECT_NEAR(res.probabilities[t], 1.0 / (1.0 + std::exp(-z[t])), 1e-12);
    }
    for (const auto& h : res.trace.hidden) EXPECT_GE(h.activation, 0.0);
  }
}

TEST(Model, ZeroInputZeroBias) {
  MlpModel m = init_model({8, 5, 1}, EmbeddingKind::kIdentity, 1);
  for (auto& b : m.b1) b = 0.0;
  m.b2[0] = 0.3;
  const auto res = forward(m, std::vector<std::uint8_t>(8, 0));
  for (const auto& h : res.trace.hidden) EXPECT_EQ(h.activation, 0.0);
  EXPECT_DOUBLE_EQ(res.probabilities[0], 1.0 / (1.0 + std::exp(-0.3)));
  EXPECT_THROW(forward(m, std::vector<std::uint8_t>(7, 0)), DimensionError);
}

TEST(Model, PlantedNetworkActivations) {
  PlantedSpec spec;
  spec.num_vars = 12;
  spec.hidden = 12;
  spec.pairs = {{3, 6}, {2, 4}, {7, 9}};
  spec.codes = {{4, 10}, {1, 5}, {0, 8}};
  const MlpModel m = build_planted(spec);
  std::vector<std::uint8_t> x(12, 0);
  x[3] = x[6] = 1;
  const auto res = forward(m, x);
  for (std::size_t r = 0; r < 12; ++r)
    EXPECT_EQ(res.trace.hidden[r].activation, (r == 4 || r == 10) ? 1.0 : 0.0) << r;
  EXPECT_EQ(res.trace.hidden[4].dot, 2.0);
}

TEST(Model, JsonRoundTrip) {
  const MlpModel m = init_model({8, 4, 2}, EmbeddingKind::kRandomSymmetric, 9, false);
  EXPECT_EQ(model_from_json(model_to_json(m)), m);
  EXPECT_THROW(model_from_json("{\"format\":\"other\"}"), FormatError);
}

TEST(Trainer, ZeroGradientLeavesWeightsUnchanged) {
  MlpModel m = init_model({8, 4, 1}, EmbeddingKind::kIdentity, 2, false);
  for (auto& b : m.b1) b = -5.0;
  for (double& v : m.w1.data()) v = 0.0;
  const MlpModel before = m;
  const Dataset d = random_dataset(8, 1, 64, 4);
  TrainConfig tc;
  tc.max_epochs = 3;
  tc.patience = 0;
  train(m, d, tc);
  EXPECT_EQ(m, before);
}

TEST(Trainer, Deterministic) {
  const Formula f = random_paired_and(12, 1);
  const Dataset d = sample_paired(f, 2000, 2);
  MlpModel a = init_model({12, 8, 1}, EmbeddingKind::kIdentity, 3);
  MlpModel b = a;
  TrainConfig tc;
  tc.max_epochs = 5;
  tc.seed = 11;
  train(a, d, tc);
  train(b, d, tc);
  EXPECT_EQ(a, b);
}

TEST(Trainer, PairedTaskLearns) {
  const Formula f = random_paired_and(16, 4);
  const Dataset d = sample_paired(f, 30000, 5);
  MlpModel m = init_model({16, 16, 1}, EmbeddingKind::kIdentity, 6, false);
  TrainConfig tc;
  tc.lr = 0.01;
  tc.max_epochs = 2000;
  tc.patience = 10;
  const auto hist = train(m, d, tc);
  EXPECT_LT(test_error(m, d).joint_error(), 0.02);
  EXPECT_LE(hist.epochs.size(), 2000u);
}

TEST(Trainer, SnapshotsAndEarlyStop) {
  const Formula f = random_paired_and(12, 1);
  const Dataset d = sample_paired(f, 1000, 2);
  MlpModel m = init_model({12, 8, 1}, EmbeddingKind::kIdentity, 3);
  const MlpModel init = m;
  TrainConfig tc;
  tc.max_epochs = 4;
  tc.patience = 0;
  tc.snapshot_schedule = {0.0, 0.5, 1.0, 3.0};
  const auto hist = train(m, d, tc);
  ASSERT_EQ(hist.snapshots.size(), 4u);
  EXPECT_EQ(hist.snapshots[0].model, init);
  EXPECT_EQ(hist.snapshots[0].epoch, 0.0);
  EXPECT_EQ(hist.snapshots[2].epoch, 1.0);
  EXPECT_EQ(hist.snapshots[1].scheduled, 0.5);
  EXPECT_NEAR(hist.snapshots[1].epoch, 0.5, 0.02);
  EXPECT_EQ(hist.epochs.size(), 4u);
  EXPECT_FALSE(hist.early_stopped);
  EXPECT_NEAR(hist.snapshots[0].loss, mean_loss(init, d), 1e-12);
}

TEST(Trainer, NonFiniteLossThrows) {
  MlpModel m = init_model({8, 4, 1}, EmbeddingKind::kIdentity, 2);
  m.w2(0, 0) = std::numeric_limits<double>::quiet_NaN();
  m.b1[0] = 1.0;
  const Dataset d = random_dataset(8, 1, 16, 1);
  EXPECT_THROW(train(m, d, TrainConfig{}), NumericalError);
}

TEST(Trainer, ErrorRates) {
  PlantedSpec spec;
  spec.num_vars = 8;
  spec.hidden = 4;
  spec.pairs = {{0, 1}, {2, 3}};
  spec.codes = {{0, 1}, {2, 3}};
  const MlpModel planted = build_planted(spec);
  const Formula f = planted_formula(spec);
  const Dataset d = sample_paired(f, 200, 1);
  // Planted logits are 0 on false inputs and the threshold is strict.
  EXPECT_EQ(test_error(planted, d, 0.5).per_output[0], 0.0);

  MlpModel flat = init_model({8, 4, 1}, EmbeddingKind::kIdentity, 1);
  for (double& v : flat.w2.data()) v = 0.0;
  flat.b2[0] = 0.0;
  const auto e = test_error(flat, d);
  double positives = 0;
  for (std::size_t i = 0; i < d.size(); ++i) positives += d.labels(i)[0];
  EXPECT_NEAR(e.per_output[0], positives / static_cast<double>(d.size()), 1e-12);
  EXPECT_NEAR(e.per_output[0], 0.5, 0.1);
}

}  // namespace
}  // namespace fcc
