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

// Margin-rescaled structured SVM, n-slack cutting-plane training:
//
//   min_w 1/2 ||w||^2 + C sum_i xi_i
//   s.t.  <w, phi(x_i, y*_i) - phi(x_i, y)> >= loss(y*_i, y) - xi_i,
//         w[both-] + w[both+] - 2 w[disagree] >= 0.
//
// Most violated constraints come from ADMM loss-augmented inference. The
// restricted problem is solved in the dual,
//
//   max  sum alpha_ik loss_ik - 1/2 ||w||^2,   w = sum alpha_ik psi_ik + beta a,
//   s.t. alpha >= 0, sum_k alpha_ik <= C, beta >= 0,
//
// by pairwise coordinate ascent within each sample's box plus an exact
// coordinate step on the multiplier beta of the submodularity constraint.

#ifndef SUPMOD_SSVM_HPP_
#define SUPMOD_SSVM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "supmod/admm.hpp"
#include "supmod/core_model.hpp"
#include "supmod/losses.hpp"
#include "supmod/maxflow.hpp"
#include "supmod/parallel.hpp"

namespace supmod {

struct Sample {
  UnaryFeatures features;
  GridShape shape;
  EdgeSet edges;
  Labeling y_star;

  void validate() const {
    const std::size_t p = shape.pixels();
    if (features.rows() != p || edges.pixels() != p || y_star.size() != p) {
      throw std::invalid_argument("Sample: inconsistent dimensions");
    }
    if (y_star.count_positive() == 0) throw std::invalid_argument("Sample: no foreground pixels");
  }
};

struct TrainConfig {
  double C = 1.0;
  /// A plane is added when its violation exceeds xi_i + eps_stop * max(1, loss).
  double eps_stop = 1e-3;
  int max_outer_iterations = 100;
  LossConfig loss;
  ADMMParams admm;
  std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0, 100.0};
  /// Relative duality gap target for the restricted QP.
  double qp_gap = 1e-6;
  int max_qp_sweeps = 20000;
  unsigned threads = 0;

  void validate() const {
    if (!(C > 0.0)) throw std::invalid_argument("TrainConfig: C must be > 0");
    if (!(eps_stop > 0.0)) throw std::invalid_argument("TrainConfig: eps_stop must be > 0");
    if (max_outer_iterations < 1) throw std::invalid_argument("TrainConfig: max_outer_iterations must be >= 1");
    if (!(qp_gap > 0.0)) throw std::invalid_argument("TrainConfig: qp_gap must be > 0");
    admm.validate();
  }
};

struct CuttingPlane {
  Labeling labeling;
  std::vector<double> psi;  // phi(x, y*) - phi(x, labeling)
  double loss = 0.0;
};

class WorkingSet {
 public:
  explicit WorkingSet(std::size_t samples = 0) : planes_(samples) {}

  /// False if this sample already holds a plane for the same labeling.
  bool add(std::size_t sample, CuttingPlane plane) {
    auto& list = planes_.at(sample);
    for (const auto& p : list)
      if (p.labeling == plane.labeling) return false;
    list.push_back(std::move(plane));
    return true;
  }

  std::size_t samples() const { return planes_.size(); }
  const std::vector<CuttingPlane>& planes(std::size_t sample) const { return planes_.at(sample); }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& l : planes_) n += l.size();
    return n;
  }

 private:
  std::vector<std::vector<CuttingPlane>> planes_;
};

struct TrainingTrace {
  std::vector<double> dual_objective;     // after each outer iteration's QP solve
  std::vector<double> sweep_dual;         // after every coordinate-ascent sweep
  std::vector<std::size_t> plane_counts;  // working-set size per outer iteration
  std::vector<std::size_t> added_planes;  // new planes per outer iteration
  int outer_iterations = 0;
  bool converged = false;
  /// max_i (violation_i - xi_i) / max(1, loss_i) at the last check; at most
  /// eps_stop when converged.
  double final_max_excess = 0.0;
};

struct Model {
  WeightVector w;
  double C = 1.0;
  LossConfig loss;
  TrainingTrace trace;
};

/// Dual of the restricted n-slack QP with one extra nonnegative multiplier
/// for the pairwise submodularity constraint.
class RestrictedDual {
 public:
  RestrictedDual(std::size_t samples, std::size_t dimension, double C)
      : C_(C), dim_(dimension), alpha_(samples), w_(dimension, 0.0), a_(dimension, 0.0) {
    if (dimension < 3) throw std::invalid_argument("RestrictedDual: dimension < 3");
    a_[dimension - 3 + kBothBackground] = 1.0;
    a_[dimension - 3 + kDisagree] = -2.0;
    a_[dimension - 3 + kBothForeground] = 1.0;
  }

  void add_plane(std::size_t sample) { alpha_.at(sample).push_back(0.0); }

  const std::vector<double>& w() const { return w_; }

  double objective(const WorkingSet& ws) const {
    double linear = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i)
      for (std::size_t k = 0; k < alpha_[i].size(); ++k) linear += alpha_[i][k] * ws.planes(i)[k].loss;
    return linear - 0.5 * dot(w_, w_);
  }

  /// 1/2 ||w||^2 + C sum_i xi_i at the current w.
  double primal(const WorkingSet& ws) const {
    double slack = 0.0;
    for (std::size_t i = 0; i < alpha_.size(); ++i) slack += sample_slack(ws, i);
    return 0.5 * dot(w_, w_) + C_ * slack;
  }

  double sample_slack(const WorkingSet& ws, std::size_t i) const {
    double xi = 0.0;
    for (const auto& p : ws.planes(i)) xi = std::max(xi, p.loss - dot(w_, p.psi));
    return xi;
  }

  /// Runs sweeps until the relative gap target holds; appends the dual
  /// value after each sweep to `trace`.
  void solve(const WorkingSet& ws, double gap_target, int max_sweeps, std::vector<double>* trace) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double max_kkt = 0.0;
      for (std::size_t i = 0; i < alpha_.size(); ++i) max_kkt = std::max(max_kkt, pair_step(ws, i));
      beta_step();
      const double dual = objective(ws);
      if (trace) trace->push_back(dual);
      const double gap = primal(ws) - dual;
      const bool feasible = dot(w_, a_) >= -1e-12 * std::max(1.0, std::sqrt(dot(w_, w_)));
      if (feasible && gap <= gap_target * std::max(1.0, std::abs(dual))) break;
      if (feasible && max_kkt <= 1e-12) break;
    }
  }

 private:
  // One SMO step between the best ascent and descent directions within
  // sample i (including the implicit slack variable C - sum alpha_i).
  // Returns the KKT violation before the step.
  double pair_step(const WorkingSet& ws, std::size_t i) {
    auto& alpha = alpha_[i];
    const auto& planes = ws.planes(i);
    if (planes.empty()) return 0.0;
    const std::ptrdiff_t kSlack = -1;
    double slack_value = C_;
    for (double v : alpha) slack_value -= v;
    slack_value = std::max(0.0, slack_value);

    std::vector<double> grad(planes.size());
    for (std::size_t k = 0; k < planes.size(); ++k) grad[k] = planes[k].loss - dot(w_, planes[k].psi);

    std::ptrdiff_t up = kSlack, down = kSlack;
    double g_up = 0.0, g_down = std::numeric_limits<double>::infinity();
    if (slack_value > 0.0) g_down = 0.0;
    for (std::size_t k = 0; k < planes.size(); ++k) {
      if (grad[k] > g_up) {
        g_up = grad[k];
        up = static_cast<std::ptrdiff_t>(k);
      }
      if (alpha[k] > 0.0 && grad[k] < g_down) {
        g_down = grad[k];
        down = static_cast<std::ptrdiff_t>(k);
      }
    }
    const double violation = g_up - g_down;
    if (!(violation > 0.0) || up == down) return std::max(0.0, std::isfinite(violation) ? violation : 0.0);

    // Direction d = psi_up - psi_down (slack has psi = 0).
    std::vector<double> d(dim_, 0.0);
    if (up != kSlack)
      for (std::size_t c = 0; c < dim_; ++c) d[c] += planes[static_cast<std::size_t>(up)].psi[c];
    if (down != kSlack)
      for (std::size_t c = 0; c < dim_; ++c) d[c] -= planes[static_cast<std::size_t>(down)].psi[c];
    const double curvature = dot(d, d);
    const double available = down == kSlack ? slack_value : alpha[static_cast<std::size_t>(down)];
    double step = curvature > 0.0 ? violation / curvature : available;
    step = std::min(step, available);
    if (!(step > 0.0)) return violation;

    if (up != kSlack) alpha[static_cast<std::size_t>(up)] += step;
    if (down != kSlack) {
      auto& v = alpha[static_cast<std::size_t>(down)];
      v = (step == available) ? 0.0 : v - step;
    }
    for (std::size_t c = 0; c < dim_; ++c) w_[c] += step * d[c];
    return violation;
  }

  void beta_step() {
    const double grad = -dot(w_, a_);
    const double next = std::max(0.0, beta_ + grad / dot(a_, a_));
    const double delta = next - beta_;
    if (delta == 0.0) return;
    beta_ = next;
    for (std::size_t c = 0; c < dim_; ++c) w_[c] += delta * a_[c];
  }

  double C_;
  std::size_t dim_;
  std::vector<std::vector<double>> alpha_;
  double beta_ = 0.0;
  std::vector<double> w_;
  std::vector<double> a_;
};

inline CuttingPlane make_plane(const Sample& s, const LossFunction& loss, const Labeling& y) {
  CuttingPlane plane;
  plane.labeling = y;
  auto phi_star = joint_feature(s.features, s.edges, s.y_star);
  auto phi = joint_feature(s.features, s.edges, y);
  plane.psi.resize(phi.size());
  for (std::size_t c = 0; c < phi.size(); ++c) plane.psi[c] = phi_star[c] - phi[c];
  plane.loss = evaluate(loss, s.y_star, y);
  return plane;
}

inline void validate_training_set(std::span<const Sample> samples, const TrainConfig& config) {
  if (samples.empty()) throw std::invalid_argument("train: empty sample list");
  const std::size_t d = samples.front().features.cols();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].validate();
    if (samples[i].features.cols() != d) {
      throw std::invalid_argument("train: sample " + std::to_string(i) + " has " +
                                  std::to_string(samples[i].features.cols()) +
                                  " feature channels, expected " + std::to_string(d));
    }
  }
  if (config.loss.kind == LossKind::kIoU) {
    throw std::invalid_argument("train: the IoU loss is evaluation-only");
  }
}

inline Model train(std::span<const Sample> samples, const TrainConfig& config) {
  config.validate();
  validate_training_set(samples, config);
  const std::size_t n = samples.size();
  const std::size_t d = samples.front().features.cols();

  std::vector<LossFunction> losses;
  losses.reserve(n);
  for (const auto& s : samples) losses.push_back(config.loss.bind(s.shape));

  Model model;
  model.C = config.C;
  model.loss = config.loss;
  model.w = WeightVector::Zero(d);
  WorkingSet working(n);
  RestrictedDual dual(n, d + 3, config.C);

  for (int outer = 1; outer <= config.max_outer_iterations; ++outer) {
    const WeightVector snapshot = model.w;
    std::vector<Labeling> found(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          const auto& s = samples[i];
          found[i] = loss_augmented_inference(snapshot, s.features, s.edges, s.y_star, losses[i],
                                              config.admm)
                         .labeling;
        },
        config.threads);

    std::size_t added = 0;
    double max_excess = -std::numeric_limits<double>::infinity();
    const auto w_flat = snapshot.flat();
    for (std::size_t i = 0; i < n; ++i) {
      auto plane = make_plane(samples[i], losses[i], found[i]);
      double xi = 0.0;
      for (const auto& p : working.planes(i)) xi = std::max(xi, p.loss - dot(w_flat, p.psi));
      const double violation = plane.loss - dot(w_flat, plane.psi);
      max_excess = std::max(max_excess, (violation - xi) / std::max(1.0, plane.loss));
      if (violation > xi + config.eps_stop * std::max(1.0, plane.loss)) {
        if (working.add(i, std::move(plane))) {
          dual.add_plane(i);
          ++added;
        }
      }
    }
    model.trace.outer_iterations = outer;
    model.trace.added_planes.push_back(added);
    model.trace.plane_counts.push_back(working.total());
    model.trace.final_max_excess = max_excess;
    if (added == 0) {
      model.trace.converged = true;
      break;
    }

    dual.solve(working, config.qp_gap, config.max_qp_sweeps, &model.trace.sweep_dual);
    model.trace.dual_objective.push_back(dual.objective(working));
    model.w = WeightVector::FromFlat(dual.w());
    model.w.project_submodular();
  }
  return model;
}

/// MAP labeling under the model; all-background on exact ties.
inline Labeling predict(const Model& model, const UnaryFeatures& features, const GridShape& shape,
                        const EdgeSet& edges) {
  if (features.rows() != shape.pixels()) throw std::invalid_argument("predict: shape mismatch");
  return minimize_energy(build_energy(model.w, features, edges)).labeling;
}

struct LossSummary {
  std::string name;
  double mean = 0.0;
  double standard_error = 0.0;
};

inline LossSummary summarize(std::string name, std::span<const double> values) {
  LossSummary s{std::move(name), 0.0, 0.0};
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    s.standard_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return s;
}

/// Mean and standard error of each loss over the model's predictions.
inline std::vector<LossSummary> evaluate_model(const Model& model, std::span<const Sample> samples,
                                               std::span<const LossConfig> losses) {
  if (samples.empty()) throw std::invalid_argument("evaluate_model: empty sample list");
  std::vector<Labeling> predictions;
  predictions.reserve(samples.size());
  for (const auto& s : samples) predictions.push_back(predict(model, s.features, s.shape, s.edges));
  std::vector<LossSummary> out;
  for (const auto& cfg : losses) {
    std::vector<double> values;
    for (std::size_t i = 0; i < samples.size(); ++i)
      values.push_back(evaluate(cfg.bind(samples[i].shape), samples[i].y_star, predictions[i]));
    out.push_back(summarize(to_string(cfg.kind), values));
  }
  return out;
}

struct CrossValidationResult {
  double best_C = 1.0;
  std::vector<std::pair<double, double>> validation_loss;  // (C, mean loss)
};

/// Holds out every `folds`-th sample in turn, trains on the rest for each C
/// in the grid, and picks the C with the lowest mean validation loss (the
/// training loss). Earlier grid entries win ties.
inline CrossValidationResult cross_validate(std::span<const Sample> samples, const TrainConfig& config,
                                            std::size_t folds = 2) {
  if (samples.size() < 2) throw std::invalid_argument("cross_validate: need at least 2 samples");
  folds = std::clamp<std::size_t>(folds, 2, samples.size());
  CrossValidationResult result;
  double best = std::numeric_limits<double>::infinity();
  const LossConfig eval_loss[] = {config.loss};
  for (double c : config.c_grid) {
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<Sample> train_part, val_part;
      for (std::size_t i = 0; i < samples.size(); ++i)
        (i % folds == f ? val_part : train_part).push_back(samples[i]);
      TrainConfig cfg = config;
      cfg.C = c;
      auto model = train(train_part, cfg);
      total += evaluate_model(model, val_part, eval_loss).front().mean;
    }
    const double mean = total / static_cast<double>(folds);
    result.validation_loss.emplace_back(c, mean);
    if (mean < best) {
      best = mean;
      result.best_C = c;
    }
  }
  return result;
}

}  // namespace supmod

#endif  // SUPMOD_SSVM_HPP_
