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

// Exact maximizers of loss(A) + sum_{j in A} w_j over misprediction sets A,
// one per loss structure: symmetric (cardinality), biconvex in (e-, e+), and
// pairwise (graph-representable).

#ifndef SUPMOD_LOSS_SOLVERS_HPP_
#define SUPMOD_LOSS_SOLVERS_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/core_model.hpp"
#include "supmod/losses.hpp"
#include "supmod/maxflow.hpp"

namespace supmod {

/// Gain w_j of placing pixel j in the misprediction set.
using ModularCoefficients = std::vector<double>;

struct SubsetSolution {
  std::vector<std::size_t> members;  // ascending
  double value = 0.0;
};

/// Coefficients such that -rho/2 ||y_a - y + u||^2 equals
/// sum_{j in mispred(y)} w_j plus a constant independent of y.
inline ModularCoefficients admm_modular_coefficients(std::span<const double> y_a,
                                                     const Labeling& y_star,
                                                     std::span<const double> u, double rho) {
  if (y_a.size() != y_star.size() || u.size() != y_star.size()) {
    throw std::invalid_argument("admm_modular_coefficients: length mismatch");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("admm_modular_coefficients: rho must be > 0");
  ModularCoefficients w(y_star.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double s = static_cast<double>(y_star[j]);
    const double flipped = y_a[j] + s + u[j];
    const double kept = y_a[j] - s + u[j];
    w[j] = -0.5 * rho * flipped * flipped + 0.5 * rho * kept * kept;
  }
  return w;
}

/// The constant dropped by admm_modular_coefficients: -rho/2 ||y_a - y* + u||^2.
inline double admm_modular_offset(std::span<const double> y_a, const Labeling& y_star,
                                  std::span<const double> u, double rho) {
  double s = 0.0;
  for (std::size_t j = 0; j < y_star.size(); ++j) {
    const double d = y_a[j] - static_cast<double>(y_star[j]) + u[j];
    s += d * d;
  }
  return -0.5 * rho * s;
}

namespace detail {

// Indices of `w` sorted by decreasing value, ties by ascending index.
inline std::vector<std::size_t> descending_order(std::span<const double> w) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  return order;
}

inline std::vector<double> prefix_sums(std::span<const double> w,
                                       std::span<const std::size_t> order) {
  std::vector<double> prefix(order.size() + 1, 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) prefix[i + 1] = prefix[i] + w[order[i]];
  return prefix;
}

}  // namespace detail

/// max_A c(|A|) + sum_{j in A} w_j for a cardinality profile c with c(0) = 0.
/// Sort w descending; the best set of size k is the top-k prefix.
inline SubsetSolution solve_symmetric_augmented(std::span<const double> profile,
                                                std::span<const double> w) {
  const std::size_t n = w.size();
  if (profile.size() != n + 1) {
    throw std::invalid_argument("solve_symmetric_augmented: profile must have p+1 = " +
                                std::to_string(n + 1) + " entries, got " +
                                std::to_string(profile.size()));
  }
  auto order = detail::descending_order(w);
  // Running total of augmented marginals (c(k) - c(k-1)) + w_{pi(k)}.
  double running = profile[0];
  double best = running;
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    running += (profile[k] - profile[k - 1]) + w[order[k - 1]];
    if (running > best) {
      best = running;
      best_k = k;
    }
  }
  SubsetSolution sol;
  sol.members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k));
  std::sort(sol.members.begin(), sol.members.end());
  // Report the directly evaluated objective rather than the running sum.
  double modular = 0.0;
  for (std::size_t j : sol.members) modular += w[j];
  sol.value = profile[best_k] + modular;
  return sol;
}

struct BiconvexSolution {
  std::vector<std::size_t> false_negatives;  // indices into w_neg
  std::vector<std::size_t> false_positives;  // indices into w_pos
  double value = 0.0;
};

/// max over FN subset of the m ground-truth positives and FP subset of the
/// p - m negatives of loss(e-, e+) + sum w_neg[FN] + sum w_pos[FP].
///
/// For each e- = j the best FP count k_opt(j) maximizes the cumulative
/// augmented marginals along e+; the total objective is then evaluated at
/// every (j, k_opt(j)) from prefix sums of the sorted coefficient vectors.
template <typename Profile>
BiconvexSolution solve_biconvex_augmented(const Profile& loss, std::size_t m,
                                          std::span<const double> w_neg,
                                          std::span<const double> w_pos) {
  if (w_neg.size() != m) {
    throw std::invalid_argument("solve_biconvex_augmented: w_neg has " +
                                std::to_string(w_neg.size()) + " entries, expected m = " +
                                std::to_string(m));
  }
  const std::size_t q = w_pos.size();
  auto order_neg = detail::descending_order(w_neg);
  auto order_pos = detail::descending_order(w_pos);
  auto prefix_neg = detail::prefix_sums(w_neg, order_neg);
  auto prefix_pos = detail::prefix_sums(w_pos, order_pos);

  double best = 0.0;
  std::size_t best_j = 0, best_k = 0;
  bool have_best = false;
  for (std::size_t j = 0; j <= m; ++j) {
    double running = 0.0;
    double best_run = 0.0;
    std::size_t k_opt = 0;
    for (std::size_t k = 1; k <= q; ++k) {
      running += (loss(j, k) - loss(j, k - 1)) + w_pos[order_pos[k - 1]];
      if (running > best_run) {
        best_run = running;
        k_opt = k;
      }
    }
    const double total = loss(j, k_opt) + prefix_neg[j] + prefix_pos[k_opt];
    if (!have_best || total > best) {
      best = total;
      best_j = j;
      best_k = k_opt;
      have_best = true;
    }
  }

  BiconvexSolution sol;
  sol.false_negatives.assign(order_neg.begin(),
                             order_neg.begin() + static_cast<std::ptrdiff_t>(best_j));
  sol.false_positives.assign(order_pos.begin(),
                             order_pos.begin() + static_cast<std::ptrdiff_t>(best_k));
  std::sort(sol.false_negatives.begin(), sol.false_negatives.end());
  std::sort(sol.false_positives.begin(), sol.false_positives.end());
  sol.value = best;
  return sol;
}

/// Pixel-indexed form: splits w by the ground truth and maps the result back.
template <typename Profile>
SubsetSolution solve_biconvex_augmented(const Profile& loss, const Labeling& y_star,
                                        std::span<const double> w) {
  if (w.size() != y_star.size()) {
    throw std::invalid_argument("solve_biconvex_augmented: length mismatch");
  }
  std::vector<std::size_t> positives, negatives;
  std::vector<double> w_neg, w_pos;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (y_star.positive(j)) {
      positives.push_back(j);
      w_neg.push_back(w[j]);
    } else {
      negatives.push_back(j);
      w_pos.push_back(w[j]);
    }
  }
  auto split = solve_biconvex_augmented(loss, positives.size(), w_neg, w_pos);
  SubsetSolution sol;
  for (std::size_t i : split.false_negatives) sol.members.push_back(positives[i]);
  for (std::size_t i : split.false_positives) sol.members.push_back(negatives[i]);
  std::sort(sol.members.begin(), sol.members.end());
  sol.value = split.value;
  return sol;
}

/// max_A |A| + gamma * #{edges inside A} + sum_{j in A} w_j, by min-cut on
/// the negated objective over membership indicators.
inline SubsetSolution solve_pairwise_augmented(std::size_t pixels, double gamma,
                                               const EdgeSet& loss_edges,
                                               std::span<const double> w) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("solve_pairwise_augmented: gamma must be >= 0");
  if (w.size() != pixels || loss_edges.pixels() != pixels) {
    throw std::invalid_argument("solve_pairwise_augmented: dimension mismatch");
  }
  // Label +1 of the auxiliary model means "mispredicted".
  EnergyModel model;
  model.unary.resize(pixels);
  for (std::size_t j = 0; j < pixels; ++j) model.unary[j] = {0.0, -1.0 - w[j]};
  model.edges = loss_edges.edges();
  PairwiseTable table;
  table.e[1][1] = -gamma;
  model.pairwise.assign(loss_edges.size(), table);

  auto cut = minimize_energy(model);
  SubsetSolution sol;
  for (std::size_t j = 0; j < pixels; ++j)
    if (cut.labeling.positive(j)) sol.members.push_back(j);
  sol.value = -cut.energy;
  return sol;
}

/// Dispatches the loss subproblem on the loss' solver capability.
inline SubsetSolution solve_loss_augmented(const LossFunction& loss, const Labeling& y_star,
                                           std::span<const double> w) {
  const std::size_t p = y_star.size();
  if (w.size() != p) throw std::invalid_argument("solve_loss_augmented: length mismatch");
  switch (loss.capability()) {
    case SolverCapability::kModular: {
      SubsetSolution sol;
      for (std::size_t j = 0; j < p; ++j) {
        if (1.0 + w[j] > 0.0) {
          sol.members.push_back(j);
          sol.value += 1.0 + w[j];
        }
      }
      return sol;
    }
    case SolverCapability::kPairwiseGraph:
      return solve_pairwise_augmented(p, loss.gamma(), loss.loss_edges(), w);
    case SolverCapability::kSymmetricCardinality: {
      auto profile = cardinality_profile(loss, y_star.count_positive(), p);
      return solve_symmetric_augmented(profile, w);
    }
    case SolverCapability::kBiconvex:
      return solve_biconvex_augmented(biconvex_profile(loss, y_star.count_positive()), y_star, w);
    case SolverCapability::kNone:
      break;
  }
  throw std::invalid_argument("solve_loss_augmented: loss '" + loss.name() +
                              "' has no exact loss-augmented solver");
}

}  // namespace supmod

#endif  // SUPMOD_LOSS_SOLVERS_HPP_
