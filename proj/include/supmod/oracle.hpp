// Copyright 2026 The Supmod Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exhaustive references and property checkers for small instances.

#ifndef SUPMOD_ORACLE_HPP_
#define SUPMOD_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/core_model.hpp"
#include "supmod/losses.hpp"
#include "supmod/set_function.hpp"

namespace supmod {

inline constexpr std::size_t kMaxBruteForcePixels = 20;
inline constexpr double kCheckSlack = 1e-9;

struct BruteForceResult {
  Labeling labeling;
  double value = 0.0;
};

namespace detail {

inline void check_enumerable(std::size_t p, const char* who) {
  if (p > kMaxBruteForcePixels) {
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(p) +
                                " pixels is too many to enumerate (max " +
                                std::to_string(kMaxBruteForcePixels) + ")");
  }
}

}  // namespace detail

/// argmax_y <w, phi(x, y)> + loss(y*, y) over all 2^p labelings. The first
/// maximizer in mask order wins ties.
inline BruteForceResult brute_force_loss_augmented(const WeightVector& w,
                                                   const UnaryFeatures& features,
                                                   const EdgeSet& edges, const Labeling& y_star,
                                                   const LossFunction& loss) {
  const std::size_t p = y_star.size();
  detail::check_enumerable(p, "brute_force_loss_augmented");
  BruteForceResult best;
  bool first = true;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    Labeling y = Labeling::FromMask(mask, p);
    const double v = score(w, features, edges, y) + evaluate(loss, y_star, y);
    if (first || v > best.value) {
      best = {y, v};
      first = false;
    }
  }
  return best;
}

/// Minimum energy over all labelings.
inline BruteForceResult brute_force_minimize_energy(const EnergyModel& model) {
  const std::size_t p = model.pixels();
  detail::check_enumerable(p, "brute_force_minimize_energy");
  BruteForceResult best;
  bool first = true;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    Labeling y = Labeling::FromMask(mask, p);
    const double v = model.evaluate(y);
    if (first || v < best.value) {
      best = {y, v};
      first = false;
    }
  }
  return best;
}

struct SetOptimum {
  std::vector<std::size_t> members;
  double value = 0.0;
};

/// max over all subsets of f.
inline SetOptimum brute_force_set_maximum(const SetFunctionOracle& f) {
  const std::size_t n = f.size();
  detail::check_enumerable(n, "brute_force_set_maximum");
  SetOptimum best;
  bool first = true;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    auto mask = mask_from_bits(bits, n);
    const double v = f(mask);
    if (first || v > best.value) {
      best = {mask_members(mask), v};
      first = false;
    }
  }
  return best;
}

inline SetOptimum brute_force_set_minimum(const SetFunctionOracle& f) {
  auto best = brute_force_set_maximum(f.negated());
  best.value = -best.value;
  return best;
}

struct Violation {
  std::uint64_t a = 0;  // subset bit masks
  std::uint64_t b = 0;
  std::size_t v = 0;
  double lhs = 0.0;  // f(A + v) - f(A)
  double rhs = 0.0;  // f(B + v) - f(B)
};

struct ViolationReport {
  std::vector<Violation> violations;  // truncated at `max_recorded`
  std::size_t total = 0;
  std::size_t checked = 0;
  bool empty() const { return total == 0; }
};

/// Tests f(A + v) - f(A) <= f(B + v) - f(B) for A subset of B, v not in B.
/// Exhaustive for n <= 10; beyond that, `samples` random triples from `seed`.
inline ViolationReport check_supermodular(const SetFunctionOracle& f, std::size_t n,
                                          std::size_t max_recorded = 64,
                                          std::size_t samples = 10000,
                                          std::uint64_t seed = 0x5eed) {
  if (f.size() != n) throw std::invalid_argument("check_supermodular: ground set size mismatch");
  if (n > 62) throw std::invalid_argument("check_supermodular: ground set too large");
  ViolationReport report;
  auto record = [&](std::uint64_t a, std::uint64_t b, std::size_t v, double lhs, double rhs) {
    ++report.checked;
    if (lhs > rhs + kCheckSlack) {
      ++report.total;
      if (report.violations.size() < max_recorded) report.violations.push_back({a, b, v, lhs, rhs});
    }
  };

  if (n <= 10) {
    const std::uint64_t full = std::uint64_t{1} << n;
    std::vector<double> table(full);
    for (std::uint64_t bits = 0; bits < full; ++bits) table[bits] = f(mask_from_bits(bits, n));
    for (std::uint64_t b = 0; b < full; ++b) {
      // All submasks a of b, including b itself and 0.
      for (std::uint64_t a = b;; a = (a - 1) & b) {
        for (std::size_t v = 0; v < n; ++v) {
          const std::uint64_t bit = std::uint64_t{1} << v;
          if (b & bit) continue;
          record(a, b, v, table[a | bit] - table[a], table[b | bit] - table[b]);
        }
        if (a == 0) break;
      }
    }
    return report;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::bernoulli_distribution coin(0.5);
  auto eval = [&](std::uint64_t bits) { return f(mask_from_bits(bits, n)); };
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t v = pick(rng);
    const std::uint64_t bit = std::uint64_t{1} << v;
    std::uint64_t b = 0, a = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == v) continue;
      if (coin(rng)) {
        b |= std::uint64_t{1} << i;
        if (coin(rng)) a |= std::uint64_t{1} << i;
      }
    }
    record(a, b, v, eval(a | bit) - eval(a), eval(b | bit) - eval(b));
  }
  return report;
}

struct BiconvexViolation {
  std::size_t e_minus = 0;
  std::size_t e_plus = 0;
  bool along_e_minus = true;  // otherwise along e+
  double second_difference = 0.0;
};

struct BiconvexReport {
  std::vector<BiconvexViolation> violations;
  std::size_t total = 0;
  bool empty() const { return total == 0; }
};

/// Negative second finite differences of loss(e-, e+) on [0, m] x [0, p - m].
inline BiconvexReport check_biconvex(const std::function<double(std::size_t, std::size_t)>& loss,
                                     std::size_t m, std::size_t p, std::size_t max_recorded = 64) {
  if (m > p) throw std::invalid_argument("check_biconvex: m exceeds p");
  const std::size_t q = p - m;
  std::vector<double> grid((m + 1) * (q + 1));
  auto at = [&](std::size_t i, std::size_t k) -> double& { return grid[i * (q + 1) + k]; };
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t k = 0; k <= q; ++k) at(i, k) = loss(i, k);

  BiconvexReport report;
  auto record = [&](std::size_t i, std::size_t k, bool axis, double d2) {
    if (d2 < -kCheckSlack) {
      ++report.total;
      if (report.violations.size() < max_recorded) report.violations.push_back({i, k, axis, d2});
    }
  };
  for (std::size_t i = 1; i + 1 <= m; ++i)
    for (std::size_t k = 0; k <= q; ++k)
      record(i, k, true, at(i + 1, k) - 2.0 * at(i, k) + at(i - 1, k));
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t k = 1; k + 1 <= q; ++k)
      record(i, k, false, at(i, k + 1) - 2.0 * at(i, k) + at(i, k - 1));
  return report;
}

}  // namespace supmod

#endif  // SUPMOD_ORACLE_HPP_
