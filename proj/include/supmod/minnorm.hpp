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

// Generic submodular minimization by the Fujishige-Wolfe minimum-norm-point
// algorithm over the base polytope B(f). Vertices of B(f) come from Edmonds'
// greedy algorithm; minor cycles project onto the affine hull of the active
// vertex set.

#ifndef SUPMOD_MINNORM_HPP_
#define SUPMOD_MINNORM_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "supmod/set_function.hpp"

namespace supmod {

using BasePoint = std::vector<double>;

/// Greedy vertex: x_{pi(i)} = f(pi(1..i)) - f(pi(1..i-1)).
inline BasePoint greedy_vertex(const SetFunctionOracle& f, std::span<const std::size_t> ordering) {
  const std::size_t n = f.size();
  if (ordering.size() != n) throw std::invalid_argument("greedy_vertex: ordering size mismatch");
  std::vector<bool> used(n, false);
  for (std::size_t i : ordering) {
    if (i >= n || used[i]) throw std::invalid_argument("greedy_vertex: ordering is not a permutation");
    used[i] = true;
  }
  SetMask mask(n, 0);
  BasePoint x(n, 0.0);
  double previous = f(mask);
  for (std::size_t i : ordering) {
    mask[i] = 1;
    const double current = f(mask);
    x[i] = current - previous;
    previous = current;
  }
  return x;
}

struct MinNormOptions {
  /// Major-cycle stop: ||x||^2 - <x, q> <= tolerance * max(1, max ||s||^2).
  double tolerance = 1e-10;
  double affine_tolerance = 1e-10;
  double drop_threshold = 1e-12;
  /// 0 means 10 n^2.
  std::size_t max_major_cycles = 0;
};

struct MinNormResult {
  std::vector<std::size_t> minimizer;
  double value = 0.0;
  BasePoint point;
  std::size_t major_cycles = 0;
  /// Set when the cycle cap was reached; the result is the best found so far.
  bool hit_iteration_cap = false;
};

namespace detail {

// Affine minimizer of a vertex set given its Gram matrix: coefficients
// alpha with sum alpha = 1 minimizing ||V alpha||.
inline Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& gram, double tolerance) {
  const Eigen::Index k = gram.cols();
  Eigen::MatrixXd system(k + 1, k + 1);
  system.topLeftCorner(k, k) = gram;
  system.topRightCorner(k, 1).setOnes();
  system.bottomLeftCorner(1, k).setOnes();
  system(k, k) = 0.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
  qr.setThreshold(tolerance);
  Eigen::VectorXd sol = qr.solve(rhs);
  return sol.head(k);
}

}  // namespace detail

inline MinNormResult minimize(const SetFunctionOracle& f, const MinNormOptions& options = {}) {
  const std::size_t n = f.size();
  MinNormResult result;
  if (n == 0) {
    result.value = f(SetMask{});
    return result;
  }
  const std::size_t cap =
      options.max_major_cycles > 0 ? options.max_major_cycles : std::max<std::size_t>(10 * n * n, 10);

  auto vertex_for = [&](const Eigen::VectorXd& direction) {
    // Linear minimization over B(f): greedy with increasing direction.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return direction(a) < direction(b); });
    auto v = greedy_vertex(f, order);
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n)).eval();
  };

  Eigen::MatrixXd active(n, 1);
  active.col(0) = vertex_for(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  Eigen::MatrixXd gram(1, 1);
  gram(0, 0) = active.col(0).squaredNorm();
  Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = active.col(0);
  double max_norm_sq = x.squaredNorm();

  std::size_t major = 0;
  for (; major < cap; ++major) {
    Eigen::VectorXd q = vertex_for(x);
    max_norm_sq = std::max(max_norm_sq, q.squaredNorm());
    const double gap = x.squaredNorm() - x.dot(q);
    if (gap <= options.tolerance * std::max(1.0, max_norm_sq)) break;
    bool duplicate = false;
    for (Eigen::Index c = 0; c < active.cols(); ++c) {
      if ((active.col(c) - q).lpNorm<Eigen::Infinity>() == 0.0) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) break;

    const Eigen::Index k = active.cols();
    Eigen::VectorXd cross = active.transpose() * q;
    active.conservativeResize(Eigen::NoChange, k + 1);
    active.col(k) = q;
    gram.conservativeResize(k + 1, k + 1);
    gram.col(k).head(k) = cross;
    gram.row(k).head(k) = cross.transpose();
    gram(k, k) = q.squaredNorm();
    lambda.conservativeResize(lambda.size() + 1);
    lambda(lambda.size() - 1) = 0.0;

    // Minor cycles.
    for (;;) {
      Eigen::VectorXd alpha = detail::affine_minimizer(gram, options.affine_tolerance);
      if ((alpha.array() > options.drop_threshold).all()) {
        lambda = alpha;
        x = active * lambda;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha(i) <= options.drop_threshold) {
          const double denom = lambda(i) - alpha(i);
          if (denom > 0.0) theta = std::min(theta, lambda(i) / denom);
        }
      }
      theta = std::clamp(theta, 0.0, 1.0);
      lambda = theta * alpha + (1.0 - theta) * lambda;

      // Drop vertices whose convex coefficient vanished.
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda(i) > options.drop_threshold) keep.push_back(i);
      if (keep.empty()) {
        // Numerical breakdown; keep the largest coefficient.
        Eigen::Index best = 0;
        lambda.maxCoeff(&best);
        keep.push_back(best);
      }
      const auto kept = static_cast<Eigen::Index>(keep.size());
      Eigen::MatrixXd next(n, kept);
      Eigen::MatrixXd next_gram(kept, kept);
      Eigen::VectorXd next_lambda(kept);
      for (Eigen::Index i = 0; i < kept; ++i) {
        next.col(i) = active.col(keep[i]);
        next_lambda(i) = lambda(keep[i]);
        for (Eigen::Index j = 0; j < kept; ++j) next_gram(i, j) = gram(keep[i], keep[j]);
      }
      next_lambda /= next_lambda.sum();
      active = std::move(next);
      gram = std::move(next_gram);
      lambda = std::move(next_lambda);
      x = active * lambda;
      if (active.cols() == 1) break;
    }
  }
  result.major_cycles = major;
  result.hit_iteration_cap = (major >= cap);
  result.point.assign(x.data(), x.data() + n);

  // Level sets of the min-norm point; the near-zero variants absorb
  // round-off in coordinates that are zero at the exact point.
  const double slack = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff());
  struct LevelSet {
    double bound;
    bool inclusive;
  };
  const LevelSet level_sets[] = {{0.0, false}, {0.0, true}, {-slack, false}, {slack, true}};
  bool first = true;
  for (const auto& level : level_sets) {
    SetMask mask(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = x(static_cast<Eigen::Index>(i));
      mask[i] = level.inclusive ? (xi <= level.bound) : (xi < level.bound);
    }
    const double value = f(mask);
    if (first || value < result.value) {
      result.value = value;
      result.minimizer = mask_members(mask);
      first = false;
    }
  }
  return result;
}

}  // namespace supmod

#endif  // SUPMOD_MINNORM_HPP_
