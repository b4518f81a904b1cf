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

// Loss-augmented inference  argmax_y <w, phi(x, y)> + loss(y*, y)  by
// consensus splitting in scaled form:
//
//   y_a <- argmin_y  -<w, phi(x, y)> + rho/2 ||y - y_b + u||^2   (graph cut)
//   y_b <- argmax_y  loss(y*, y) - rho/2 ||y_a - y + u||^2       (loss solver)
//   u   <- u + y_a - y_b
//
// Both updates run over binary labelings; for y in {-1, +1} the quadratic
// coupling is separable and folds into unary terms. The result is the best
// iterate of either copy under the true objective.

#ifndef SUPMOD_ADMM_HPP_
#define SUPMOD_ADMM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/core_model.hpp"
#include "supmod/loss_solvers.hpp"
#include "supmod/losses.hpp"
#include "supmod/maxflow.hpp"

namespace supmod {

struct ADMMParams {
  double rho = 0.1;
  double eps_abs = 1e-4;
  double eps_rel = 1e-2;
  int max_iterations = 200;

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("ADMMParams: rho must be > 0");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) {
      throw std::invalid_argument("ADMMParams: tolerances must be > 0");
    }
    if (max_iterations < 1) throw std::invalid_argument("ADMMParams: max_iterations must be >= 1");
  }
};

struct ResidualRecord {
  int iteration = 0;
  double primal = 0.0;
  double dual = 0.0;
};

struct ADMMState {
  Labeling y_a;
  Labeling y_b;
  Labeling y_b_previous;
  std::vector<double> u;
  int t = 0;
  std::vector<ResidualRecord> residuals;
};

struct ADMMResult {
  Labeling labeling;
  double objective = 0.0;  // <w, phi(x, labeling)> + loss(y*, labeling)
  bool converged = false;
  int iterations = 0;
  std::vector<ResidualRecord> residuals;
  /// Iterates at exit (residual history moved to `residuals`).
  ADMMState state;
};

namespace detail {

inline double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double labeling_distance(const Labeling& a, const Labeling& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

inline double primal_residual(const ADMMState& s) { return detail::labeling_distance(s.y_a, s.y_b); }

inline double dual_residual(const ADMMState& s, double rho) {
  return rho * detail::labeling_distance(s.y_b, s.y_b_previous);
}

/// Primal and dual residuals both under their absolute-plus-relative bounds.
inline bool stopping_criterion(const ADMMState& state, const ADMMParams& params) {
  if (state.t < 1) return false;
  const double root_p = std::sqrt(static_cast<double>(state.y_a.size()));
  // Every +-1 labeling has norm sqrt(p).
  const double primal_bound = root_p * params.eps_abs + params.eps_rel * root_p;
  std::vector<double> scaled_u(state.u.size());
  for (std::size_t j = 0; j < scaled_u.size(); ++j) scaled_u[j] = params.rho * state.u[j];
  const double dual_bound = root_p * params.eps_abs + params.eps_rel * detail::l2_norm(scaled_u);
  return primal_residual(state) <= primal_bound && dual_residual(state, params.rho) <= dual_bound;
}

inline double loss_augmented_objective(const WeightVector& w, const UnaryFeatures& features,
                                       const EdgeSet& edges, const Labeling& y_star,
                                       const LossFunction& loss, const Labeling& y) {
  return score(w, features, edges, y) + evaluate(loss, y_star, y);
}

/// Loss folded into unaries; valid only for losses modular in the
/// misprediction set (Hamming): a single graph cut is exact.
inline Labeling modular_loss_augmented_map(const WeightVector& w, const UnaryFeatures& features,
                                           const EdgeSet& edges, const Labeling& y_star) {
  UnaryTable extra(y_star.size());
  for (std::size_t j = 0; j < y_star.size(); ++j) {
    // Energy -1 for the label that disagrees with the ground truth.
    extra[j] = {0.0, 0.0};
    extra[j][!y_star.positive(j)] = -1.0;
  }
  return minimize_energy(build_energy(w, features, edges, extra)).labeling;
}

inline ADMMResult loss_augmented_inference(const WeightVector& w, const UnaryFeatures& features,
                                           const EdgeSet& edges, const Labeling& y_star,
                                           const LossFunction& loss,
                                           const ADMMParams& params = {}) {
  params.validate();
  if (!w.is_submodular()) {
    throw std::invalid_argument("loss_augmented_inference: weight vector violates submodularity");
  }
  const std::size_t p = y_star.size();
  if (features.rows() != p || edges.pixels() != p) {
    throw std::invalid_argument("loss_augmented_inference: dimension mismatch");
  }
  if (loss.capability() == SolverCapability::kNone) {
    throw std::invalid_argument("loss_augmented_inference: loss '" + loss.name() +
                                "' has no supported solver capability");
  }

  ADMMResult result;
  if (loss.capability() == SolverCapability::kModular) {
    result.labeling = modular_loss_augmented_map(w, features, edges, y_star);
    result.objective = loss_augmented_objective(w, features, edges, y_star, loss, result.labeling);
    result.converged = true;
    result.iterations = 1;
    result.residuals.push_back({1, 0.0, 0.0});
    result.state.y_a = result.state.y_b = result.state.y_b_previous = result.labeling;
    result.state.u.assign(p, 0.0);
    result.state.t = 1;
    return result;
  }

  ADMMState state;
  state.y_b = y_star;
  state.y_a = y_star;
  state.u.assign(p, 0.0);
  const double rho = params.rho;
  UnaryTable coupling(p);
  // Best labeling among all iterates of both copies.
  result.labeling = y_star;
  result.objective = loss_augmented_objective(w, features, edges, y_star, loss, y_star);
  auto consider = [&](const Labeling& y) {
    const double obj = loss_augmented_objective(w, features, edges, y_star, loss, y);
    if (obj > result.objective) {
      result.objective = obj;
      result.labeling = y;
    }
  };

  for (int t = 1; t <= params.max_iterations; ++t) {
    // Inference copy: rho/2 (s - v_j)^2 with v = y_b - u, for s = -1 and +1.
    for (std::size_t j = 0; j < p; ++j) {
      const double v = static_cast<double>(state.y_b[j]) - state.u[j];
      coupling[j] = {0.5 * rho * (-1.0 - v) * (-1.0 - v), 0.5 * rho * (1.0 - v) * (1.0 - v)};
    }
    state.y_a = minimize_energy(build_energy(w, features, edges, coupling)).labeling;

    // Loss copy.
    const auto y_a_reals = state.y_a.as_reals();
    auto coeffs = admm_modular_coefficients(y_a_reals, y_star, state.u, rho);
    auto sol = solve_loss_augmented(loss, y_star, coeffs);
    state.y_b_previous = state.y_b;
    state.y_b = flip_set(y_star, sol.members);
    consider(state.y_a);
    consider(state.y_b);

    for (std::size_t j = 0; j < p; ++j) {
      state.u[j] += static_cast<double>(state.y_a[j]) - static_cast<double>(state.y_b[j]);
    }
    state.t = t;
    state.residuals.push_back({t, primal_residual(state), dual_residual(state, rho)});
    if (stopping_criterion(state, params)) {
      result.converged = true;
      break;
    }
  }

  result.iterations = state.t;
  result.residuals = std::move(state.residuals);
  result.state = std::move(state);
  return result;
}

/// CSV rows "iteration,primal,dual" with a header line.
inline void write_residual_csv(std::ostream& os, const std::vector<ResidualRecord>& trace) {
  os << "iteration,primal,dual\n";
  for (const auto& r : trace) os << r.iteration << ',' << r.primal << ',' << r.dual << '\n';
}

}  // namespace supmod

#endif  // SUPMOD_ADMM_HPP_
