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

// Grid structure, labelings, the joint feature map and energy construction
// for binary segmentation with pairwise submodular potentials.

#ifndef SUPMOD_CORE_MODEL_HPP_
#define SUPMOD_CORE_MODEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace supmod {

struct GridShape {
  int width = 1;
  int height = 1;

  GridShape() = default;
  GridShape(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) {
      throw std::invalid_argument("GridShape: width and height must be >= 1, got " +
                                  std::to_string(w) + "x" + std::to_string(h));
    }
  }

  std::size_t pixels() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// A binary labeling over {-1, +1}. +1 is foreground.
class Labeling {
 public:
  using value_type = std::int8_t;

  Labeling() = default;
  explicit Labeling(std::size_t n, value_type fill = -1) : values_(n, fill) {
    check_label(fill);
  }
  Labeling(std::initializer_list<int> values) {
    values_.reserve(values.size());
    for (int v : values) {
      check_label(v);
      values_.push_back(static_cast<value_type>(v));
    }
  }
  explicit Labeling(std::vector<value_type> values) : values_(std::move(values)) {
    for (auto v : values_) check_label(v);
  }

  /// Builds a labeling from the low bits of `mask`: bit j set -> +1.
  static Labeling FromMask(std::uint64_t mask, std::size_t n) {
    Labeling y(n);
    for (std::size_t j = 0; j < n; ++j) y.values_[j] = ((mask >> j) & 1U) ? 1 : -1;
    return y;
  }

  std::size_t size() const { return values_.size(); }
  value_type operator[](std::size_t j) const { return values_[j]; }
  bool positive(std::size_t j) const { return values_[j] > 0; }

  void set(std::size_t j, int v) {
    check_label(v);
    values_[j] = static_cast<value_type>(v);
  }
  void flip(std::size_t j) { values_[j] = static_cast<value_type>(-values_[j]); }

  std::size_t count_positive() const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), value_type{1}));
  }

  Labeling complement() const {
    Labeling out = *this;
    for (auto& v : out.values_) v = static_cast<value_type>(-v);
    return out;
  }

  std::vector<double> as_reals() const { return {values_.begin(), values_.end()}; }
  const std::vector<value_type>& values() const { return values_; }

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  static void check_label(int v) {
    if (v != -1 && v != 1) {
      throw std::invalid_argument("Labeling: entries must be -1 or +1, got " + std::to_string(v));
    }
  }

  std::vector<value_type> values_;
};

/// Labeling obtained from `y_star` by flipping every pixel in `members`.
inline Labeling flip_set(const Labeling& y_star, std::span<const std::size_t> members) {
  Labeling out = y_star;
  for (std::size_t j : members) {
    if (j >= out.size()) throw std::out_of_range("flip_set: pixel index out of range");
    out.flip(j);
  }
  return out;
}

/// Indices where the two labelings differ.
inline std::vector<std::size_t> misprediction_set(const Labeling& y_star, const Labeling& y) {
  if (y_star.size() != y.size()) throw std::invalid_argument("misprediction_set: length mismatch");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (y_star[j] != y[j]) out.push_back(j);
  return out;
}

enum class Connectivity { kFour, kEight, kCustom };

struct Edge {
  std::size_t first;
  std::size_t second;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class EdgeSet {
 public:
  EdgeSet() = default;

  EdgeSet(std::size_t pixels, std::vector<Edge> edges, Connectivity tag = Connectivity::kCustom)
      : pixels_(pixels), edges_(std::move(edges)), tag_(tag) {
    std::set<Edge> seen;
    for (const auto& e : edges_) {
      if (e.first >= e.second) {
        throw std::invalid_argument("EdgeSet: edge (" + std::to_string(e.first) + "," +
                                    std::to_string(e.second) + ") must satisfy k < l");
      }
      if (e.second >= pixels_) {
        throw std::invalid_argument("EdgeSet: edge index " + std::to_string(e.second) +
                                    " out of range for " + std::to_string(pixels_) + " pixels");
      }
      if (!seen.insert(e).second) {
        throw std::invalid_argument("EdgeSet: duplicate edge (" + std::to_string(e.first) + "," +
                                    std::to_string(e.second) + ")");
      }
    }
  }

  static EdgeSet Grid(const GridShape& shape, Connectivity connectivity) {
    std::vector<Edge> edges;
    auto add = [&](int x0, int y0, int x1, int y1) {
      if (x1 < 0 || y1 < 0 || x1 >= shape.width || y1 >= shape.height) return;
      std::size_t a = shape.index(x0, y0);
      std::size_t b = shape.index(x1, y1);
      edges.push_back({std::min(a, b), std::max(a, b)});
    };
    for (int y = 0; y < shape.height; ++y) {
      for (int x = 0; x < shape.width; ++x) {
        add(x, y, x + 1, y);
        add(x, y, x, y + 1);
        if (connectivity == Connectivity::kEight) {
          add(x, y, x + 1, y + 1);
          add(x, y, x - 1, y + 1);
        }
      }
    }
    return EdgeSet(shape.pixels(), std::move(edges), connectivity);
  }

  std::size_t pixels() const { return pixels_; }
  std::size_t size() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  Connectivity connectivity() const { return tag_; }

  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

 private:
  std::size_t pixels_ = 0;
  std::vector<Edge> edges_;
  Connectivity tag_ = Connectivity::kCustom;
};

/// Dense p x d matrix of per-pixel feature channels, row-major.
class UnaryFeatures {
 public:
  UnaryFeatures() = default;
  UnaryFeatures(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("UnaryFeatures: data size " + std::to_string(data_.size()) +
                                  " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("UnaryFeatures: non-finite entry");
    }
  }
  UnaryFeatures(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t j) const { return {data_.data() + j * cols_, cols_}; }
  double& at(std::size_t j, std::size_t c) { return data_[j * cols_ + c]; }
  double at(std::size_t j, std::size_t c) const { return data_[j * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Slots of the pairwise indicator block.
enum PairCase : std::size_t { kBothBackground = 0, kDisagree = 1, kBothForeground = 2 };

inline PairCase pair_case(int a, int b) {
  if (a != b) return kDisagree;
  return a > 0 ? kBothForeground : kBothBackground;
}

struct WeightVector {
  std::vector<double> unary;
  std::array<double, 3> pairwise{0.0, 0.0, 0.0};

  WeightVector() = default;
  WeightVector(std::vector<double> u, std::array<double, 3> pw)
      : unary(std::move(u)), pairwise(pw) {}
  static WeightVector Zero(std::size_t unary_dims) { return {std::vector<double>(unary_dims, 0.0), {}}; }

  std::size_t dimension() const { return unary.size() + 3; }

  /// w[both-] + w[both+] - 2 w[disagree]; nonnegative iff -<w, phi_p> is submodular.
  double submodularity_margin() const {
    return (pairwise[kBothBackground] + pairwise[kBothForeground]) - 2.0 * pairwise[kDisagree];
  }
  bool is_submodular() const { return submodularity_margin() >= 0.0; }

  /// Clamps the disagreement weight onto the feasible boundary if needed.
  void project_submodular() {
    if (!is_submodular()) {
      pairwise[kDisagree] = (pairwise[kBothBackground] + pairwise[kBothForeground]) / 2.0;
    }
  }

  std::vector<double> flat() const {
    std::vector<double> out = unary;
    out.insert(out.end(), pairwise.begin(), pairwise.end());
    return out;
  }
  static WeightVector FromFlat(std::span<const double> flat) {
    if (flat.size() < 3) throw std::invalid_argument("WeightVector: flat vector shorter than 3");
    WeightVector w;
    w.unary.assign(flat.begin(), flat.end() - 3);
    std::copy(flat.end() - 3, flat.end(), w.pairwise.begin());
    return w;
  }
};

/// 2x2 energy table indexed by [label(k) == +1][label(l) == +1].
struct PairwiseTable {
  std::array<std::array<double, 2>, 2> e{};

  double at(int yk, int yl) const { return e[yk > 0][yl > 0]; }
  /// T(-,-) + T(+,+) <= T(-,+) + T(+,-)
  bool is_submodular() const { return e[0][0] + e[1][1] <= e[0][1] + e[1][0]; }
};

/// Per-pixel energy of label -1 (index 0) and +1 (index 1).
using UnaryTable = std::vector<std::array<double, 2>>;

struct EnergyModel {
  UnaryTable unary;
  std::vector<Edge> edges;
  std::vector<PairwiseTable> pairwise;

  std::size_t pixels() const { return unary.size(); }

  double evaluate(const Labeling& y) const {
    if (y.size() != unary.size()) throw std::invalid_argument("EnergyModel: labeling length mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < unary.size(); ++j) total += unary[j][y.positive(j)];
    for (std::size_t i = 0; i < edges.size(); ++i)
      total += pairwise[i].at(y[edges[i].first], y[edges[i].second]);
    return total;
  }
};

/// phi(x, y): unary block sums feature rows of +1 pixels; pairwise block
/// counts (both -1, disagree, both +1) over the edge set.
inline std::vector<double> joint_feature(const UnaryFeatures& features, const EdgeSet& edges,
                                         const Labeling& y) {
  if (features.rows() != y.size() || edges.pixels() != y.size()) {
    throw std::invalid_argument("joint_feature: dimension mismatch (features " +
                                std::to_string(features.rows()) + ", edges " +
                                std::to_string(edges.pixels()) + ", labeling " +
                                std::to_string(y.size()) + ")");
  }
  const std::size_t d = features.cols();
  std::vector<double> phi(d + 3, 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!y.positive(j)) continue;
    auto row = features.row(j);
    for (std::size_t c = 0; c < d; ++c) phi[c] += row[c];
  }
  for (const auto& e : edges) phi[d + pair_case(y[e.first], y[e.second])] += 1.0;
  return phi;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double score(const WeightVector& w, const UnaryFeatures& features, const EdgeSet& edges,
                    const Labeling& y) {
  if (w.unary.size() != features.cols()) {
    throw std::invalid_argument("score: weight dimension " + std::to_string(w.unary.size()) +
                                " != feature channels " + std::to_string(features.cols()));
  }
  auto phi = joint_feature(features, edges, y);
  return dot(w.flat(), phi);
}

/// Energy whose minimizer maximizes score(w, ., y) - extra_unary(y).
inline EnergyModel build_energy(const WeightVector& w, const UnaryFeatures& features,
                                const EdgeSet& edges,
                                std::optional<std::span<const std::array<double, 2>>> extra_unary =
                                    std::nullopt) {
  if (!w.is_submodular()) {
    throw std::invalid_argument("build_energy: weight vector violates the submodularity constraint (margin " +
                                std::to_string(w.submodularity_margin()) + ")");
  }
  if (w.unary.size() != features.cols()) {
    throw std::invalid_argument("build_energy: weight dimension mismatch");
  }
  const std::size_t p = features.rows();
  if (edges.pixels() != p) throw std::invalid_argument("build_energy: edge set pixel count mismatch");
  if (extra_unary && extra_unary->size() != p) {
    throw std::invalid_argument("build_energy: extra unary length mismatch");
  }

  EnergyModel model;
  model.unary.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    model.unary[j] = {0.0, -dot(w.unary, features.row(j))};
    if (extra_unary) {
      model.unary[j][0] += (*extra_unary)[j][0];
      model.unary[j][1] += (*extra_unary)[j][1];
    }
  }
  PairwiseTable table;
  table.e[0][0] = -w.pairwise[kBothBackground];
  table.e[0][1] = -w.pairwise[kDisagree];
  table.e[1][0] = -w.pairwise[kDisagree];
  table.e[1][1] = -w.pairwise[kBothForeground];
  model.edges = edges.edges();
  model.pairwise.assign(edges.size(), table);
  return model;
}

}  // namespace supmod

#endif  // SUPMOD_CORE_MODEL_HPP_
