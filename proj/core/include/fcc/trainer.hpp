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
#include <optional>
#include <span>
#include <vector>

#include "fcc/matrix.hpp"
#include "fcc/model.hpp"
#include "fcc/sampler.hpp"

namespace fcc {

struct TrainConfig {
  double lr = 0.001;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;  // 0 disables early stopping
  std::uint64_t seed = 0;
  // Fractional epochs at which to deep-copy the model, e.g. 0, 0.2, 0.4...
  std::vector<double> snapshot_schedule;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean minibatch loss during the epoch
  double error = 0.0;     // samples with any output wrong, seen during the epoch
};

struct Snapshot {
  double scheduled = 0.0;  // requested point from the schedule
  double epoch = 0.0;      // fractional epoch actually reached
  double loss = 0.0;   // full training-set loss of the snapshot
  double error = 0.0;  // full training-set error (any output wrong)
  MlpModel model;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<Snapshot> snapshots;  // sorted by epoch
  bool early_stopped = false;
};

// Minibatch Adam on mean binary cross-entropy over outputs. Shuffles with a
// stream seeded from config.seed each epoch; never touches the embedding.
// Throws NumericalError if the loss becomes non-finite, DimensionError if
// the dataset does not fit the model.
TrainHistory train(MlpModel& model, const Dataset& data, const TrainConfig& config);

struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
};

struct LossAndGradient {
  double loss = 0.0;
  Gradients gradient;
};

// Mean BCE over the selected samples and all outputs, with its exact
// gradient. ReLU'(0) is taken as 0. The b2 gradient is zero when
// model.use_b2 is false.
LossAndGradient loss_and_gradient(const MlpModel& model, const Dataset& data,
                                  std::span<const std::size_t> indices);

// Mean BCE over the whole dataset.
double mean_loss(const MlpModel& model, const Dataset& data);

struct ErrorRates {
  std::vector<double> per_output;  // misclassification rate per output
  double all_correct = 0.0;        // fraction with every output right
  double joint_error() const noexcept { return 1.0 - all_correct; }
};

ErrorRates test_error(const MlpModel& model, const Dataset& data, double threshold = 0.5);

}  // namespace fcc
