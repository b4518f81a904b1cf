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

// Segmentation losses and their views as set functions of the misprediction
// set {j : y*_j != y_j}.
//
//   hamming   |A|
//   delta8    |A| + gamma * #{(k,l) in E_loss : k in A and l in A}
//   square    (|A| / alpha)^2, alpha defaults to sqrt(m)
//   biconvex  (e- + e+) / (m - e- + 1)
//   iou       1 - |y* n y| / |y* u y|   (evaluation only)

#ifndef SUPMOD_LOSSES_HPP_
#define SUPMOD_LOSSES_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/core_model.hpp"
#include "supmod/set_function.hpp"

namespace supmod {

enum class LossKind { kHamming, kDelta8, kSquare, kBiconvex, kIoU };

enum class SolverCapability { kModular, kPairwiseGraph, kSymmetricCardinality, kBiconvex, kNone };

inline std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kHamming: return "hamming";
    case LossKind::kDelta8: return "delta8";
    case LossKind::kSquare: return "square";
    case LossKind::kBiconvex: return "biconvex";
    case LossKind::kIoU: return "iou";
  }
  return "unknown";
}

inline LossKind loss_kind_from_string(const std::string& name) {
  if (name == "hamming") return LossKind::kHamming;
  if (name == "delta8") return LossKind::kDelta8;
  if (name == "square") return LossKind::kSquare;
  if (name == "biconvex") return LossKind::kBiconvex;
  if (name == "iou") return LossKind::kIoU;
  throw std::invalid_argument("unknown loss '" + name + "'");
}

struct ErrorCounts {
  std::size_t e_minus = 0;  // false negatives
  std::size_t e_plus = 0;   // false positives
  std::size_t m = 0;        // ground-truth positives

  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

inline ErrorCounts error_counts(const Labeling& y_star, const Labeling& y_tilde) {
  if (y_star.size() != y_tilde.size()) throw std::invalid_argument("error_counts: length mismatch");
  ErrorCounts c;
  for (std::size_t j = 0; j < y_star.size(); ++j) {
    if (y_star.positive(j)) {
      ++c.m;
      if (!y_tilde.positive(j)) ++c.e_minus;
    } else if (y_tilde.positive(j)) {
      ++c.e_plus;
    }
  }
  return c;
}

/// A loss bound to a particular pixel count (and loss edge set for delta8).
class LossFunction {
 public:
  static LossFunction Hamming() { return LossFunction(LossKind::kHamming); }
  static LossFunction Delta8(EdgeSet loss_edges, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("delta8: gamma must be >= 0");
    LossFunction f(LossKind::kDelta8);
    f.gamma_ = gamma;
    f.edges_ = std::move(loss_edges);
    return f;
  }
  static LossFunction Square(std::optional<double> alpha = std::nullopt) {
    if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("square: alpha must be > 0");
    LossFunction f(LossKind::kSquare);
    f.alpha_ = alpha;
    return f;
  }
  static LossFunction Biconvex() { return LossFunction(LossKind::kBiconvex); }
  static LossFunction IoU() { return LossFunction(LossKind::kIoU); }

  LossKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  std::optional<double> alpha() const { return alpha_; }
  const EdgeSet& loss_edges() const { return edges_; }
  std::string name() const { return to_string(kind_); }

  SolverCapability capability() const {
    switch (kind_) {
      case LossKind::kHamming: return SolverCapability::kModular;
      case LossKind::kDelta8: return SolverCapability::kPairwiseGraph;
      case LossKind::kSquare: return SolverCapability::kSymmetricCardinality;
      case LossKind::kBiconvex: return SolverCapability::kBiconvex;
      case LossKind::kIoU: return SolverCapability::kNone;
    }
    return SolverCapability::kNone;
  }

  /// Square-loss scale for a ground truth with m positives.
  double resolve_alpha(std::size_t m) const {
    if (alpha_) return *alpha_;
    if (m == 0) {
      throw std::invalid_argument("square loss: default alpha = sqrt(m) undefined for m = 0");
    }
    return std::sqrt(static_cast<double>(m));
  }

 private:
  explicit LossFunction(LossKind kind) : kind_(kind) {}

  LossKind kind_;
  double gamma_ = 0.0;
  std::optional<double> alpha_;
  EdgeSet edges_;
};

/// Loss parameters independent of a particular grid.
struct LossConfig {
  LossKind kind = LossKind::kHamming;
  double gamma = 0.5;
  std::optional<double> alpha;
  Connectivity loss_connectivity = Connectivity::kEight;

  LossFunction bind(const GridShape& shape) const {
    switch (kind) {
      case LossKind::kHamming: return LossFunction::Hamming();
      case LossKind::kDelta8:
        return LossFunction::Delta8(EdgeSet::Grid(shape, loss_connectivity), gamma);
      case LossKind::kSquare: return LossFunction::Square(alpha);
      case LossKind::kBiconvex: return LossFunction::Biconvex();
      case LossKind::kIoU: return LossFunction::IoU();
    }
    throw std::invalid_argument("LossConfig: unknown kind");
  }
};

inline double biconvex_value(std::size_t m, std::size_t e_minus, std::size_t e_plus) {
  if (e_minus > m) throw std::invalid_argument("biconvex loss: e- exceeds m");
  return static_cast<double>(e_minus + e_plus) / static_cast<double>(m - e_minus + 1);
}

inline double evaluate(const LossFunction& loss, const Labeling& y_star, const Labeling& y_tilde) {
  if (y_star.size() != y_tilde.size()) {
    throw std::invalid_argument("loss evaluate: length mismatch (" + std::to_string(y_star.size()) +
                                " vs " + std::to_string(y_tilde.size()) + ")");
  }
  const std::size_t p = y_star.size();
  switch (loss.kind()) {
    case LossKind::kHamming: {
      double n = 0.0;
      for (std::size_t j = 0; j < p; ++j) n += (y_star[j] != y_tilde[j]);
      return n;
    }
    case LossKind::kDelta8: {
      if (loss.loss_edges().pixels() != p) {
        throw std::invalid_argument("delta8: loss edge set built for " +
                                    std::to_string(loss.loss_edges().pixels()) + " pixels, got " +
                                    std::to_string(p));
      }
      double singles = 0.0;
      for (std::size_t j = 0; j < p; ++j) singles += (y_star[j] != y_tilde[j]);
      double pairs = 0.0;
      for (const auto& e : loss.loss_edges()) {
        pairs += (y_star[e.first] != y_tilde[e.first] && y_star[e.second] != y_tilde[e.second]);
      }
      return singles + loss.gamma() * pairs;
    }
    case LossKind::kSquare: {
      double k = 0.0;
      for (std::size_t j = 0; j < p; ++j) k += (y_star[j] != y_tilde[j]);
      const double a = loss.resolve_alpha(y_star.count_positive());
      return (k / a) * (k / a);
    }
    case LossKind::kBiconvex: {
      auto c = error_counts(y_star, y_tilde);
      return biconvex_value(c.m, c.e_minus, c.e_plus);
    }
    case LossKind::kIoU: {
      std::size_t inter = 0, uni = 0;
      for (std::size_t j = 0; j < p; ++j) {
        inter += (y_star.positive(j) && y_tilde.positive(j));
        uni += (y_star.positive(j) || y_tilde.positive(j));
      }
      if (uni == 0) return 0.0;
      return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
    }
  }
  throw std::invalid_argument("loss evaluate: unknown kind");
}

/// l(A) = loss(y*, y* with A flipped).
inline SetFunctionOracle as_set_function(const LossFunction& loss, const Labeling& y_star) {
  return {y_star.size(), [loss, y_star](std::span<const std::uint8_t> mask) {
            Labeling y = y_star;
            for (std::size_t j = 0; j < mask.size(); ++j)
              if (mask[j]) y.flip(j);
            return evaluate(loss, y_star, y);
          }};
}

/// c(k) = (k / alpha)^2 for k = 0..p.
inline std::vector<double> cardinality_profile(const LossFunction& loss, std::size_t m,
                                               std::size_t p) {
  if (loss.capability() != SolverCapability::kSymmetricCardinality) {
    throw std::invalid_argument("cardinality_profile: loss '" + loss.name() +
                                "' is not symmetric in the misprediction count");
  }
  const double a = loss.resolve_alpha(m);
  std::vector<double> c(p + 1);
  for (std::size_t k = 0; k <= p; ++k) {
    const double r = static_cast<double>(k) / a;
    c[k] = r * r;
  }
  return c;
}

/// l_C(e-, e+) for a ground truth with m positives.
class BiconvexProfile {
 public:
  explicit BiconvexProfile(std::size_t m) : m_(m) {}
  std::size_t m() const { return m_; }
  double operator()(std::size_t e_minus, std::size_t e_plus) const {
    return biconvex_value(m_, e_minus, e_plus);
  }

 private:
  std::size_t m_;
};

inline BiconvexProfile biconvex_profile(const LossFunction& loss, std::size_t m) {
  if (loss.capability() != SolverCapability::kBiconvex) {
    throw std::invalid_argument("biconvex_profile: loss '" + loss.name() + "' is not biconvex");
  }
  return BiconvexProfile(m);
}

}  // namespace supmod

#endif  // SUPMOD_LOSSES_HPP_
