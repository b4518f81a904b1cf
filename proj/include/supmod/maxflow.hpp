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

// Exact minimization of submodular binary pairwise energies by s-t min-cut.
//
// Each 2x2 table [[A, B], [C, D]] (rows: first pixel -1/+1, columns: second
// pixel -1/+1) decomposes as
//   A + (C - A) x_k + (D - C) x_l + (B + C - A - D) (1 - x_k) x_l,
// where x = 1 means label +1. The last coefficient is nonnegative for a
// submodular table and becomes the capacity of arc l -> k. Source side of
// the cut is label +1.

#ifndef SUPMOD_MAXFLOW_HPP_
#define SUPMOD_MAXFLOW_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "supmod/core_model.hpp"

namespace supmod {

/// Dinic max-flow on a graph with real capacities.
class FlowGraph {
 public:
  explicit FlowGraph(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t nodes() const { return adjacency_.size(); }

  void add_arc(std::size_t from, std::size_t to, double capacity, double reverse_capacity = 0.0) {
    if (capacity < 0.0 || reverse_capacity < 0.0) {
      throw std::invalid_argument("FlowGraph: negative capacity");
    }
    if (capacity == 0.0 && reverse_capacity == 0.0) return;
    adjacency_[from].push_back(arcs_.size());
    arcs_.push_back({to, capacity});
    adjacency_[to].push_back(arcs_.size());
    arcs_.push_back({from, reverse_capacity});
    max_capacity_ = std::max({max_capacity_, capacity, reverse_capacity});
  }

  double max_flow(std::size_t source, std::size_t sink) {
    epsilon_ = 1e-13 * std::max(1.0, max_capacity_);
    double total = 0.0;
    while (build_levels(source, sink)) {
      next_arc_.assign(nodes(), 0);
      for (;;) {
        double pushed = augment(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Nodes reachable from `source` in the residual graph after max_flow.
  std::vector<bool> source_side(std::size_t source) const {
    std::vector<bool> seen(nodes(), false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t a : adjacency_[v]) {
        const Arc& arc = arcs_[a];
        if (arc.residual > epsilon_ && !seen[arc.to]) {
          seen[arc.to] = true;
          stack.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    double residual;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    level_.assign(nodes(), -1);
    std::queue<std::size_t> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop();
      for (std::size_t a : adjacency_[v]) {
        const Arc& arc = arcs_[a];
        if (arc.residual > epsilon_ && level_[arc.to] < 0) {
          level_[arc.to] = level_[v] + 1;
          queue.push(arc.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  // Iterative blocking-flow DFS; returns the amount pushed along one path.
  double augment(std::size_t source, std::size_t sink, double limit) {
    std::vector<std::size_t> path;  // arc ids
    std::size_t v = source;
    while (true) {
      if (v == sink) {
        double bottleneck = limit;
        for (std::size_t a : path) bottleneck = std::min(bottleneck, arcs_[a].residual);
        for (std::size_t a : path) {
          arcs_[a].residual -= bottleneck;
          arcs_[a ^ 1U].residual += bottleneck;
        }
        return bottleneck;
      }
      bool advanced = false;
      auto& it = next_arc_[v];
      while (it < adjacency_[v].size()) {
        std::size_t a = adjacency_[v][it];
        const Arc& arc = arcs_[a];
        if (arc.residual > epsilon_ && level_[arc.to] == level_[v] + 1) {
          path.push_back(a);
          v = arc.to;
          advanced = true;
          break;
        }
        ++it;
      }
      if (!advanced) {
        if (path.empty()) return 0.0;
        // Dead end: retreat and skip the arc that led here.
        level_[v] = -1;
        std::size_t a = path.back();
        path.pop_back();
        v = arcs_[a ^ 1U].to;
        ++next_arc_[v];
      }
    }
  }

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> next_arc_;
  double max_capacity_ = 0.0;
  double epsilon_ = 0.0;
};

struct MinCutResult {
  Labeling labeling;
  double energy = 0.0;
};

/// Global minimizer of a submodular pairwise energy. Ties resolve toward -1.
inline MinCutResult minimize_energy(const EnergyModel& model) {
  const std::size_t p = model.pixels();
  if (model.edges.size() != model.pairwise.size()) {
    throw std::invalid_argument("minimize_energy: edge/table count mismatch");
  }
  for (std::size_t i = 0; i < model.edges.size(); ++i) {
    if (!model.pairwise[i].is_submodular()) {
      const auto& e = model.edges[i];
      throw std::invalid_argument("minimize_energy: non-submodular pairwise table on edge #" +
                                  std::to_string(i) + " (" + std::to_string(e.first) + "," +
                                  std::to_string(e.second) + ")");
    }
    if (model.edges[i].first >= p || model.edges[i].second >= p) {
      throw std::invalid_argument("minimize_energy: edge index out of range");
    }
  }

  // Cost of label +1 relative to label -1, after absorbing pairwise shifts.
  std::vector<double> plus_cost(p);
  for (std::size_t j = 0; j < p; ++j) plus_cost[j] = model.unary[j][1] - model.unary[j][0];

  const std::size_t source = p;
  const std::size_t sink = p + 1;
  FlowGraph graph(p + 2);
  for (std::size_t i = 0; i < model.edges.size(); ++i) {
    const auto& t = model.pairwise[i].e;
    const std::size_t k = model.edges[i].first;
    const std::size_t l = model.edges[i].second;
    plus_cost[k] += t[1][0] - t[0][0];
    plus_cost[l] += t[1][1] - t[1][0];
    double coupling = std::max(0.0, (t[0][1] + t[1][0]) - (t[0][0] + t[1][1]));
    graph.add_arc(l, k, coupling);
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (plus_cost[j] > 0.0) {
      graph.add_arc(j, sink, plus_cost[j]);
    } else if (plus_cost[j] < 0.0) {
      graph.add_arc(source, j, -plus_cost[j]);
    }
  }
  graph.max_flow(source, sink);
  auto side = graph.source_side(source);

  MinCutResult result{Labeling(p), 0.0};
  for (std::size_t j = 0; j < p; ++j) {
    if (side[j]) result.labeling.set(j, 1);
  }
  result.energy = model.evaluate(result.labeling);
  return result;
}

}  // namespace supmod

#endif  // SUPMOD_MAXFLOW_HPP_
