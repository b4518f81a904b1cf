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


// Timing of the square-loss subproblem  max_A (|A|/alpha)^2 + sum_{j in A} w_j
// by the sorting solver and by generic min-norm-point minimization of its
// negation.

#ifndef SUPMOD_BENCH_HPP_
#define SUPMOD_BENCH_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/loss_solvers.hpp"
#include "supmod/losses.hpp"
#include "supmod/minnorm.hpp"

namespace supmod {

inline constexpr std::size_t kMinNormSizeCap = 4096;

struct BenchConfig {
  std::vector<std::size_t> sizes{64, 128, 256, 512, 1024};
  std::vector<std::string> methods{"specialized", "minnorm"};
  std::size_t repetitions = 20;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string method;
  std::size_t n = 0;
  double median_ms = 0.0;
  double iqr_ms = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<std::string> notes;  // skipped cells
  /// Largest |specialized - minnorm| optimal value over sizes run by both.
  double max_value_gap = 0.0;
};

struct SquareInstance {
  Labeling y_star;
  std::vector<double> w;
};

/// Half the pixels positive; w_j uniform in [-4, 1].
inline SquareInstance make_square_instance(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("make_square_instance: n must be >= 2");
  std::mt19937_64 rng(seed);
  SquareInstance inst{Labeling(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n / 2; ++j) inst.y_star.set(j, 1);
  std::uniform_real_distribution<double> u(-4.0, 1.0);
  for (auto& v : inst.w) v = u(rng);
  return inst;
}

/// Negated subproblem as a submodular set function over the misprediction set.
inline SetFunctionOracle negated_square_subproblem(const SquareInstance& inst) {
  const double alpha = LossFunction::Square().resolve_alpha(inst.y_star.count_positive());
  return {inst.w.size(), [w = inst.w, alpha](std::span<const std::uint8_t> mask) {
            double k = 0.0, s = 0.0;
            for (std::size_t j = 0; j < mask.size(); ++j)
              if (mask[j]) {
                k += 1.0;
                s += w[j];
              }
            const double r = k / alpha;
            return -(r * r + s);
          }};
}

/// Linear-interpolated quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline BenchResult run_bench(const BenchConfig& config) {
  if (config.repetitions == 0) throw std::invalid_argument("bench: repetitions must be >= 1");
  for (const auto& m : config.methods)
    if (m != "specialized" && m != "minnorm") throw std::invalid_argument("bench: unknown method '" + m + "'");

  BenchResult result;
  using Clock = std::chrono::steady_clock;
  for (std::size_t n : config.sizes) {
    const auto inst = make_square_instance(n, config.seed + n);
    const auto loss = LossFunction::Square();
    double specialized_value = NAN, minnorm_value = NAN;
    for (const auto& method : config.methods) {
      if (method == "minnorm" && n > kMinNormSizeCap) {
        result.notes.push_back("skipped minnorm at n=" + std::to_string(n) + " (cap " +
                               std::to_string(kMinNormSizeCap) + ")");
        continue;
      }
      std::vector<double> ms;
      ms.reserve(config.repetitions);
      for (std::size_t r = 0; r < config.repetitions; ++r) {
        const auto t0 = Clock::now();
        if (method == "specialized") {
          specialized_value = solve_loss_augmented(loss, inst.y_star, inst.w).value;
        } else {
          minnorm_value = -minimize(negated_square_subproblem(inst)).value;
        }
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
      }
      const double q1 = quantile(ms, 0.25), q3 = quantile(ms, 0.75);
      result.rows.push_back({method, n, quantile(ms, 0.5), q3 - q1});
    }
    if (!std::isnan(specialized_value) && !std::isnan(minnorm_value)) {
      result.max_value_gap = std::max(result.max_value_gap, std::abs(specialized_value - minnorm_value));
    }
  }
  return result;
}

/// Least-squares slope of log(median_ms) against log(n) for one method.
inline double loglog_slope(const std::vector<BenchRow>& rows, const std::string& method) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (const auto& r : rows) {
    if (r.method != method || r.median_ms <= 0.0) continue;
    const double x = std::log(static_cast<double>(r.n)), y = std::log(r.median_ms);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) throw std::invalid_argument("loglog_slope: need two sizes for '" + method + "'");
  const double kk = static_cast<double>(k);
  const double denom = kk * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("loglog_slope: sizes must differ");
  return (kk * sxy - sx * sy) / denom;
}

inline const BenchRow* find_row(const std::vector<BenchRow>& rows, const std::string& method,
                                std::size_t n) {
  for (const auto& r : rows)
    if (r.method == method && r.n == n) return &r;
  return nullptr;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "method,n,median_ms,iqr_ms\n";
  for (const auto& r : rows) os << r.method << ',' << r.n << ',' << r.median_ms << ',' << r.iqr_ms << '\n';
}

}  // namespace supmod

#endif  // SUPMOD_BENCH_HPP_
