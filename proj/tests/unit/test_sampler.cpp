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
#include <map>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "fcc/error.hpp"
#include "fcc/sampler.hpp"
#include "support/oracles.hpp"

namespace fcc {
namespace {

std::size_t ones(std::span<const std::uint8_t> x) {
  return static_cast<std::size_t>(std::accumulate(x.begin(), x.end(), 0));
}

double positive_rate(const Dataset& d, std::size_t output = 0) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += d.labels(i)[output];
  return s / static_cast<double>(d.size());
}

void expect_oracle_labels(const Dataset& d, std::span<const Formula> fs) {
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t o = 0; o < fs.size(); ++o)
      ASSERT_EQ(d.labels(i)[o] != 0, oracle::eval(fs[o], d.input(i))) << "sample " << i;
}

TEST(Sampler, PairedBalanceAndBitCounts) {
  const Formula f = random_paired_and(16, 3);
  const Dataset d = sample_paired(f, 30000, 11);
  ASSERT_EQ(d.size(), 30000u);
  const double rate = positive_rate(d);
  EXPECT_GE(rate, 0.45);
  EXPECT_LE(rate, 0.55);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto k = ones(d.input(i));
    ASSERT_GE(k, 2u);
    ASSERT_LE(k, 6u);
  }
  expect_oracle_labels(d, std::span(&f, 1));
  EXPECT_TRUE(labels_match(d, std::span(&f, 1)));
}

TEST(Sampler, Dnf4) {
  for (std::size_t neg : {0u, 1u}) {
    const Formula f = random_dnf(32, 8, 4, neg, 5);
    const Dataset d = sample_dnf4(f, 20000, 6);
    EXPECT_NEAR(positive_rate(d), 0.5, 0.02);
    expect_oracle_labels(d, std::span(&f, 1));
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels(i)[0]) continue;
      const auto k = ones(d.input(i));
      ASSERT_GE(k, 4u - (neg ? 1u : 0u)) << i;
      ASSERT_LE(k, 6u) << i;
    }
  }
}

TEST(Sampler, Or) {
  const Dataset d = sample_or(16, 10000, 2);
  const double rate = positive_rate(d);
  EXPECT_NEAR(1.0 - std::pow(1.0 - kOrBitProbability, 16), 0.505, 0.001);
  EXPECT_GE(rate, 0.45);
  EXPECT_LE(rate, 0.56);
  const Formula f = all_variables_or(16);
  expect_oracle_labels(d, std::span(&f, 1));
  EXPECT_FALSE(eval(f, std::vector<std::uint8_t>(16, 0)));
}

TEST(Sampler, Cnf) {
  const Formula f = random_cnf_pairs(16, 8);
  const Dataset d = sample_cnf(f, 40000, 9);
  const double expected = std::pow(1.0 - 0.25 * 0.25, 8);
  EXPECT_NEAR(expected, 0.596, 0.001);
  const double sigma = std::sqrt(expected * (1 - expected) / 40000.0);
  EXPECT_NEAR(positive_rate(d), expected, 4 * sigma);
  expect_oracle_labels(d, std::span(&f, 1));
}

TEST(Sampler, ConsecutiveFour) {
  const Dataset d = sample_consecutive_four(128, 5000, 4);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = d.input(i);
    const bool truth = !oracle::regex_runs(x).empty();
    ASSERT_EQ(d.labels(i)[0] != 0, truth) << i;
    if (truth) {
      ASSERT_EQ(ones(x), 6u);
      std::size_t lo = x.size(), hi = 0;
      for (std::size_t v = 0; v < x.size(); ++v)
        if (x[v]) lo = std::min(lo, v), hi = std::max(hi, v);
      ASSERT_LE(hi - lo, 7u);
    }
    if (ones(x) == 0) {
      ++zeros;
      ASSERT_EQ(d.labels(i)[0], 0);
    }
  }
  EXPECT_NEAR(positive_rate(d), 0.5, 0.05);
  EXPECT_LT(zeros, d.size() / 10);
}

TEST(Sampler, MultiCombinations) {
  const std::vector<Formula> fs = {random_partition_dnf(32, 4, 0, 1),
                                   random_partition_dnf(32, 4, 0, 2)};
  const Dataset d = sample_multi(fs, 50000, 3);
  std::map<int, std::size_t> combos;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto k = ones(d.input(i));
    ASSERT_GE(k, 8u);
    ASSERT_LE(k, 10u);
    ++combos[d.labels(i)[0] * 2 + d.labels(i)[1]];
  }
  ASSERT_EQ(combos.size(), 4u);
  for (const auto& [c, n] : combos) {
    const double share = static_cast<double>(n) / static_cast<double>(d.size());
    EXPECT_GE(share, 0.22) << c;
    EXPECT_LE(share, 0.28) << c;
  }
  expect_oracle_labels(d, fs);
}

TEST(Sampler, DeterministicAndSerializable) {
  const Formula f = random_dnf(32, 4, 4, 0, 1);
  const Dataset a = sample_dnf4(f, 500, 77);
  EXPECT_EQ(a, sample_dnf4(f, 500, 77));
  EXPECT_NE(a, sample_dnf4(f, 500, 78));
  std::stringstream ss;
  write_dataset(ss, a);
  const Dataset b = read_dataset(ss);
  EXPECT_EQ(a, b);
  const Dataset g = generate(Distribution::kDnf4, std::span(&f, 1), 32, 500, 77);
  EXPECT_EQ(a, g);
}

TEST(Sampler, RejectsBadInput) {
  const Formula paired = random_paired_and(16, 1);
  EXPECT_THROW(sample_consecutive_four(6, 10, 1), ArgumentError);
  EXPECT_THROW(sample_dnf4(paired, 10, 1), ArgumentError);
  EXPECT_THROW(distribution_from_string("nope"), FormatError);
  std::stringstream bad("not a dataset\n");
  EXPECT_THROW(read_dataset(bad), FormatError);
}

}  // namespace
}  // namespace fcc
