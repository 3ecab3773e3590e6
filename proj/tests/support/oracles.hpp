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

// Independent reference implementations used as test oracles.

#include <cmath>
#include <cstdint>
#include <regex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcc/formula.hpp"
#include "fcc/matrix.hpp"
#include "fcc/model.hpp"
#include "fcc/sampler.hpp"

namespace fcc::oracle {

inline bool literal_true(const Literal& l, std::span<const std::uint8_t> x) {
  return l.negated ? x[l.var] == 0 : x[l.var] == 1;
}

inline bool eval(const Formula& f, std::span<const std::uint8_t> x) {
  if (f.kind == FormulaKind::kCnf) {
    for (const auto& c : f.clauses) {
      bool any = false;
      for (const auto& l : c.literals) any = any || literal_true(l, x);
      if (!any) return false;
    }
    return true;
  }
  if (f.kind == FormulaKind::kOr) {
    for (const auto& c : f.clauses)
      for (const auto& l : c.literals)
        if (literal_true(l, x)) return true;
    return false;
  }
  for (const auto& c : f.clauses) {
    bool all = true;
    for (const auto& l : c.literals) all = all && literal_true(l, x);
    if (all) return true;
  }
  return false;
}

inline std::vector<std::uint8_t> bits_of(std::uint64_t code, std::size_t n) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
  return x;
}

// Positions i where x[i..i+run) are all ones, found with a lookahead regex.
inline std::vector<std::size_t> regex_runs(std::span<const std::uint8_t> x, std::size_t run = 4) {
  std::string s;
  for (auto b : x) s += b ? '1' : '0';
  const std::regex re("(?=" + std::string(run, '1') + ")");
  std::vector<std::size_t> out;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator();
       ++it)
    out.push_back(static_cast<std::size_t>(it->position()));
  return out;
}

// Plain triple loops over the stored matrices.
inline std::vector<double> logits(const MlpModel& m, std::span<const std::uint8_t> x) {
  const Matrix& c0 = m.embedding.matrix;
  std::vector<double> z(c0.rows(), 0.0);
  for (std::size_t r = 0; r < c0.rows(); ++r)
    for (std::size_t c = 0; c < c0.cols(); ++c) z[r] += c0(r, c) * x[c];
  std::vector<double> h(m.w1.rows(), 0.0);
  for (std::size_t r = 0; r < m.w1.rows(); ++r) {
    double s = m.b1[r];
    for (std::size_t c = 0; c < m.w1.cols(); ++c) s += m.w1(r, c) * z[c];
    h[r] = s > 0.0 ? s : 0.0;
  }
  std::vector<double> out(m.w2.rows(), 0.0);
  for (std::size_t t = 0; t < m.w2.rows(); ++t) {
    double s = m.b2.empty() ? 0.0 : m.b2[t];
    for (std::size_t r = 0; r < m.w2.cols(); ++r) s += m.w2(t, r) * h[r];
    out[t] = s;
  }
  return out;
}

inline double bce(double logit, int y) {
  const double p = 1.0 / (1.0 + std::exp(-logit));
  return y ? -std::log(p) : -std::log1p(-p);
}

inline double loss(const MlpModel& m, const Dataset& d, std::span<const std::size_t> idx) {
  double s = 0.0;
  for (std::size_t i : idx) {
    const auto z = logits(m, d.input(i));
    for (std::size_t t = 0; t < z.size(); ++t) s += bce(z[t], d.labels(i)[t]);
  }
  return s / static_cast<double>(idx.size() * m.outputs());
}

// Gauss-Jordan elimination with partial pivoting.
inline Matrix inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix w(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) w(r, c) = a(r, c);
    w(r, n + r) = 1.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(w(r, c)) > std::abs(w(p, c))) p = r;
    if (std::abs(w(p, c)) < 1e-14) throw std::runtime_error("singular");
    for (std::size_t k = 0; k < 2 * n; ++k) std::swap(w(c, k), w(p, k));
    const double d = w(c, c);
    for (std::size_t k = 0; k < 2 * n; ++k) w(c, k) /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = w(r, c);
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < 2 * n; ++k) w(r, k) -= f * w(c, k);
    }
  }
  Matrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = w(r, n + c);
  return out;
}

}  // namespace fcc::oracle
