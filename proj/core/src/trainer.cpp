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

#include "fcc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fcc/error.hpp"
#include "fcc/rng.hpp"

namespace fcc {
namespace {

// Embedded inputs C0 x in compressed sparse rows. Identity embeddings keep
// only the set bits, which makes the first layer cost proportional to the
// number of ones.
struct SparseInputs {
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
};

SparseInputs embed_dataset(const MlpModel& m, const Dataset& data) {
  SparseInputs s;
  s.offsets.reserve(data.size() + 1);
  const bool identity = m.embedding.kind == EmbeddingKind::kIdentity;
  const auto& c0 = m.embedding.matrix;
  std::vector<double> e(m.embedded_width());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.input(i);
    if (identity) {
      for (std::size_t c = 0; c < x.size(); ++c) {
        if (x[c]) {
          s.index.push_back(static_cast<std::uint32_t>(c));
          s.value.push_back(1.0);
        }
      }
    } else {
      std::fill(e.begin(), e.end(), 0.0);
      for (std::size_t c = 0; c < x.size(); ++c) {
        if (!x[c]) continue;
        for (std::size_t r = 0; r < e.size(); ++r) e[r] += c0(r, c);
      }
      for (std::size_t r = 0; r < e.size(); ++r) {
        if (e[r] != 0.0) {
          s.index.push_back(static_cast<std::uint32_t>(r));
          s.value.push_back(e[r]);
        }
      }
    }
    s.offsets.push_back(s.index.size());
  }
  return s;
}

double stable_bce(double z, double y) {
  return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Parameters in one flat buffer: W1 transposed (n0 x n1, so each embedded
// coordinate owns a contiguous hidden-width slice), b1, W2 (o x n1), b2.
class FlatNet {
 public:
  explicit FlatNet(const MlpModel& m)
      : n0_(m.embedded_width()), n1_(m.hidden()), o_(m.outputs()), use_b2_(m.use_b2) {
    w1t_ = 0;
    b1_ = n0_ * n1_;
    w2_ = b1_ + n1_;
    b2_ = w2_ + o_ * n1_;
    params_.resize(b2_ + o_);
    grad_.assign(params_.size(), 0.0);
    for (std::size_t r = 0; r < n1_; ++r)
      for (std::size_t c = 0; c < n0_; ++c) params_[w1t_ + c * n1_ + r] = m.w1(r, c);
    std::copy(m.b1.begin(), m.b1.end(), params_.begin() + static_cast<std::ptrdiff_t>(b1_));
    std::copy(m.w2.data().begin(), m.w2.data().end(),
              params_.begin() + static_cast<std::ptrdiff_t>(w2_));
    std::copy(m.b2.begin(), m.b2.end(), params_.begin() + static_cast<std::ptrdiff_t>(b2_));
    pre_.resize(n1_);
    post_.resize(n1_);
    dh_.resize(n1_);
    delta_.resize(o_);
  }

  void write_back(MlpModel& m) const {
    for (std::size_t r = 0; r < n1_; ++r)
      for (std::size_t c = 0; c < n0_; ++c) m.w1(r, c) = params_[w1t_ + c * n1_ + r];
    std::copy_n(params_.begin() + static_cast<std::ptrdiff_t>(b1_), n1_, m.b1.begin());
    std::copy_n(params_.begin() + static_cast<std::ptrdiff_t>(w2_), o_ * n1_,
                m.w2.data().begin());
    std::copy_n(params_.begin() + static_cast<std::ptrdiff_t>(b2_), o_, m.b2.begin());
  }

  void zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

  // Forward pass for one sample; optionally accumulates scale * dLoss/dparam.
  // Returns the summed BCE over outputs and sets `wrong` when any output is
  // misclassified at threshold 0.5.
  double step_sample(const SparseInputs& xs, std::size_t i, std::span<const std::uint8_t> y,
                     double scale, bool accumulate, bool& wrong) {
    double* p = params_.data();
    const std::size_t begin = xs.offsets[i];
    const std::size_t end = xs.offsets[i + 1];

    std::copy_n(p + b1_, n1_, pre_.data());
    for (std::size_t k = begin; k < end; ++k) {
      const double v = xs.value[k];
      const double* col = p + w1t_ + static_cast<std::size_t>(xs.index[k]) * n1_;
      for (std::size_t r = 0; r < n1_; ++r) pre_[r] += v * col[r];
    }
    for (std::size_t r = 0; r < n1_; ++r) post_[r] = pre_[r] > 0.0 ? pre_[r] : 0.0;

    double loss = 0.0;
    wrong = false;
    for (std::size_t t = 0; t < o_; ++t) {
      const double* w2row = p + w2_ + t * n1_;
      double z = p[b2_ + t];
      for (std::size_t r = 0; r < n1_; ++r) z += w2row[r] * post_[r];
      const double target = y[t] ? 1.0 : 0.0;
      loss += stable_bce(z, target);
      if ((z > 0.0) != (y[t] != 0)) wrong = true;
      delta_[t] = (sigmoid(z) - target) * scale;
    }
    if (!accumulate) return loss;

    double* g = grad_.data();
    std::fill(dh_.begin(), dh_.end(), 0.0);
    for (std::size_t t = 0; t < o_; ++t) {
      const double d = delta_[t];
      const double* w2row = p + w2_ + t * n1_;
      double* gw2 = g + w2_ + t * n1_;
      for (std::size_t r = 0; r < n1_; ++r) {
        gw2[r] += d * post_[r];
        dh_[r] += d * w2row[r];
      }
      if (use_b2_) g[b2_ + t] += d;
    }
    for (std::size_t r = 0; r < n1_; ++r) dh_[r] = pre_[r] > 0.0 ? dh_[r] : 0.0;
    double* gb1 = g + b1_;
    for (std::size_t r = 0; r < n1_; ++r) gb1[r] += dh_[r];
    for (std::size_t k = begin; k < end; ++k) {
      const double v = xs.value[k];
      double* gcol = g + w1t_ + static_cast<std::size_t>(xs.index[k]) * n1_;
      for (std::size_t r = 0; r < n1_; ++r) gcol[r] += v * dh_[r];
    }
    return loss;
  }

  std::span<double> params() { return params_; }
  std::span<const double> grad() const { return grad_; }
  std::size_t w1t_offset() const { return w1t_; }
  std::size_t b2_offset() const { return b2_; }
  std::size_t outputs() const { return o_; }
  bool use_b2() const { return use_b2_; }

  Gradients gradients_as_model_layout() const {
    Gradients out{Matrix(n1_, n0_), std::vector<double>(n1_), Matrix(o_, n1_),
                  std::vector<double>(o_)};
    for (std::size_t r = 0; r < n1_; ++r)
      for (std::size_t c = 0; c < n0_; ++c) out.w1(r, c) = grad_[w1t_ + c * n1_ + r];
    std::copy_n(grad_.begin() + static_cast<std::ptrdiff_t>(b1_), n1_, out.b1.begin());
    std::copy_n(grad_.begin() + static_cast<std::ptrdiff_t>(w2_), o_ * n1_,
                out.w2.data().begin());
    std::copy_n(grad_.begin() + static_cast<std::ptrdiff_t>(b2_), o_, out.b2.begin());
    return out;
  }

 private:
  std::size_t n0_, n1_, o_;
  bool use_b2_;
  std::size_t w1t_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
  std::vector<double> params_;
  std::vector<double> grad_;
  std::vector<double> pre_, post_, dh_, delta_;
};

void check_fit(const MlpModel& m, const Dataset& data) {
  if (data.num_vars() != m.num_inputs() || data.num_outputs() != m.outputs()) {
    throw DimensionError("dataset " + std::to_string(data.num_vars()) + " inputs / " +
                         std::to_string(data.num_outputs()) + " outputs does not fit model " +
                         std::to_string(m.num_inputs()) + " / " + std::to_string(m.outputs()));
  }
}

struct Evaluation {
  double loss = 0.0;
  double error = 0.0;
};

Evaluation evaluate_flat(FlatNet& net, const SparseInputs& xs, const Dataset& data) {
  if (data.empty()) return {};
  double loss = 0.0;
  std::size_t wrong_count = 0;
  bool wrong = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    loss += net.step_sample(xs, i, data.labels(i), 0.0, false, wrong);
    wrong_count += wrong ? 1 : 0;
  }
  const double n = static_cast<double>(data.size());
  return {loss / (n * static_cast<double>(net.outputs())), static_cast<double>(wrong_count) / n};
}

}  // namespace

TrainHistory train(MlpModel& model, const Dataset& data, const TrainConfig& config) {
  if (!(config.lr > 0.0)) throw ArgumentError("learning rate must be positive");
  if (config.batch_size == 0) throw ArgumentError("batch size must be at least 1");
  validate(model);
  check_fit(model, data);

  TrainHistory history;
  if (data.empty()) return history;

  const SparseInputs xs = embed_dataset(model, data);
  FlatNet net(model);
  auto params = net.params();
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  const std::size_t trainable = net.use_b2() ? params.size() : net.b2_offset();

  const std::size_t n = data.size();
  const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  std::vector<double> schedule = config.snapshot_schedule;
  std::sort(schedule.begin(), schedule.end());
  std::size_t next_snapshot = 0;
  const auto take_snapshots = [&](std::size_t global_step) {
    while (next_snapshot < schedule.size()) {
      const double target = std::max(0.0, schedule[next_snapshot]);
      const auto target_step =
          static_cast<std::size_t>(std::llround(target * static_cast<double>(steps_per_epoch)));
      if (target_step > global_step) break;
      Snapshot snap;
      snap.scheduled = schedule[next_snapshot];
      snap.epoch = static_cast<double>(global_step) / static_cast<double>(steps_per_epoch);
      const auto eval = evaluate_flat(net, xs, data);
      snap.loss = eval.loss;
      snap.error = eval.error;
      snap.model = model;
      net.write_back(snap.model);
      history.snapshots.push_back(std::move(snap));
      ++next_snapshot;
    }
  };
  take_snapshots(0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(mix(config.seed, {0x5B0F}));

  double best = INFINITY;
  std::size_t since_best = 0;
  std::size_t step = 0;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;
  const double outputs = static_cast<double>(net.outputs());

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    std::size_t epoch_wrong = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      const double scale = 1.0 / (static_cast<double>(stop - start) * outputs);
      net.zero_grad();
      double batch_loss = 0.0;
      bool wrong = false;
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        batch_loss += net.step_sample(xs, i, data.labels(i), scale, true, wrong);
        epoch_wrong += wrong ? 1 : 0;
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", step " << step + 1;
        throw NumericalError(msg.str());
      }
      epoch_loss += batch_loss;

      ++step;
      beta1_pow *= kAdamBeta1;
      beta2_pow *= kAdamBeta2;
      const double c1 = 1.0 - beta1_pow;
      const double c2 = 1.0 - beta2_pow;
      const auto g = net.grad();
      for (std::size_t k = 0; k < trainable; ++k) {
        m1[k] = kAdamBeta1 * m1[k] + (1.0 - kAdamBeta1) * g[k];
        m2[k] = kAdamBeta2 * m2[k] + (1.0 - kAdamBeta2) * g[k] * g[k];
        const double mhat = m1[k] / c1;
        const double vhat = m2[k] / c2;
        params[k] -= config.lr * mhat / (std::sqrt(vhat) + kAdamEpsilon);
      }
      take_snapshots(step);
    }
    const double loss = epoch_loss / (static_cast<double>(n) * outputs);
    history.epochs.push_back(
        {epoch, loss, static_cast<double>(epoch_wrong) / static_cast<double>(n)});
    if (loss < best) {
      best = loss;
      since_best = 0;
    } else if (++since_best >= config.patience && config.patience > 0) {
      history.early_stopped = true;
      break;
    }
  }
  net.write_back(model);
  return history;
}

LossAndGradient loss_and_gradient(const MlpModel& model, const Dataset& data,
                                  std::span<const std::size_t> indices) {
  validate(model);
  check_fit(model, data);
  LossAndGradient out;
  const SparseInputs xs = embed_dataset(model, data);
  FlatNet net(model);
  net.zero_grad();
  if (indices.empty()) {
    out.gradient = net.gradients_as_model_layout();
    return out;
  }
  const double scale =
      1.0 / (static_cast<double>(indices.size()) * static_cast<double>(model.outputs()));
  double loss = 0.0;
  bool wrong = false;
  for (std::size_t i : indices) {
    if (i >= data.size()) throw DimensionError("sample index out of range");
    loss += net.step_sample(xs, i, data.labels(i), scale, true, wrong);
  }
  out.loss = loss * scale;
  out.gradient = net.gradients_as_model_layout();
  return out;
}

double mean_loss(const MlpModel& model, const Dataset& data) {
  validate(model);
  check_fit(model, data);
  const SparseInputs xs = embed_dataset(model, data);
  FlatNet net(model);
  return evaluate_flat(net, xs, data).loss;
}

ErrorRates test_error(const MlpModel& model, const Dataset& data, double threshold) {
  validate(model);
  check_fit(model, data);
  ErrorRates rates;
  rates.per_output.assign(model.outputs(), 0.0);
  if (data.empty()) {
    rates.all_correct = 1.0;
    return rates;
  }
  std::size_t all_correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto probs = forward(model, data.input(i)).probabilities;
    const auto labels = data.labels(i);
    bool ok = true;
    for (std::size_t t = 0; t < probs.size(); ++t) {
      const bool predicted = probs[t] > threshold;
      if (predicted != (labels[t] != 0)) {
        rates.per_output[t] += 1.0;
        ok = false;
      }
    }
    all_correct += ok ? 1 : 0;
  }
  const double n = static_cast<double>(data.size());
  for (double& e : rates.per_output) e /= n;
  rates.all_correct = static_cast<double>(all_correct) / n;
  return rates;
}

}  // namespace fcc
