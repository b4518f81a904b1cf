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


// Synthetic segmentation data: thin foreground structures on a background,
// observed through a noisy signed-distance channel.

#ifndef SUPMOD_SYNTHETIC_HPP_
#define SUPMOD_SYNTHETIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/core_model.hpp"
#include "supmod/ssvm.hpp"

namespace supmod {

enum class Structure { kPolylines, kBars, kBlobs };

inline std::string to_string(Structure s) {
  switch (s) {
    case Structure::kPolylines: return "polylines";
    case Structure::kBars: return "bars";
    case Structure::kBlobs: return "blobs";
  }
  return "?";
}

inline Structure structure_from_string(const std::string& name) {
  if (name == "polylines") return Structure::kPolylines;
  if (name == "bars") return Structure::kBars;
  if (name == "blobs") return Structure::kBlobs;
  throw std::invalid_argument("unknown structure '" + name + "'");
}

struct SyntheticConfig {
  GridShape shape{24, 24};
  std::size_t samples = 20;
  Structure structure = Structure::kPolylines;
  /// Standard deviation of the noise on the distance channel and of the
  /// pure-noise channels.
  double noise = 0.0;
  std::size_t noise_channels = 1;
  /// |signed distance| is truncated here.
  double distance_cap = 3.0;
  Connectivity model_connectivity = Connectivity::kFour;
  std::uint64_t seed = 0;

  void validate() const {
    if (shape.width < 2 || shape.height < 2) throw std::invalid_argument("SyntheticConfig: grid must be at least 2x2");
    if (samples == 0) throw std::invalid_argument("SyntheticConfig: samples must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw std::invalid_argument("SyntheticConfig: noise must be >= 0");
    if (!(distance_cap > 0.0)) throw std::invalid_argument("SyntheticConfig: distance_cap must be > 0");
    if (model_connectivity == Connectivity::kCustom) {
      throw std::invalid_argument("SyntheticConfig: model connectivity must be four or eight");
    }
  }

  std::size_t channels() const { return 2 + noise_channels; }
};

namespace detail {

inline void draw_segment(std::vector<std::uint8_t>& mask, const GridShape& s, int x0, int y0, int x1,
                         int y1) {
  // Bresenham; 8-connected one-pixel-wide strokes.
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    if (x0 >= 0 && y0 >= 0 && x0 < s.width && y0 < s.height) mask[s.index(x0, y0)] = 1;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

inline std::vector<std::uint8_t> draw_structure(std::mt19937_64& rng, const GridShape& s,
                                                Structure structure) {
  std::vector<std::uint8_t> mask(s.pixels(), 0);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  switch (structure) {
    case Structure::kPolylines: {
      const int lines = uniform(1, 2);
      for (int l = 0; l < lines; ++l) {
        int x = uniform(0, s.width - 1), y = uniform(0, s.height - 1);
        const int vertices = uniform(2, 4);
        for (int v = 0; v < vertices; ++v) {
          const int nx = uniform(0, s.width - 1), ny = uniform(0, s.height - 1);
          draw_segment(mask, s, x, y, nx, ny);
          x = nx;
          y = ny;
        }
      }
      break;
    }
    case Structure::kBars: {
      const int bars = uniform(1, 3);
      for (int b = 0; b < bars; ++b) {
        const int thick = uniform(1, 2);
        if (uniform(0, 1) == 0) {
          const int y = uniform(0, s.height - thick), x0 = uniform(0, s.width / 2),
                    x1 = uniform(s.width / 2, s.width - 1);
          for (int t = 0; t < thick; ++t) draw_segment(mask, s, x0, y + t, x1, y + t);
        } else {
          const int x = uniform(0, s.width - thick), y0 = uniform(0, s.height / 2),
                    y1 = uniform(s.height / 2, s.height - 1);
          for (int t = 0; t < thick; ++t) draw_segment(mask, s, x + t, y0, x + t, y1);
        }
      }
      break;
    }
    case Structure::kBlobs: {
      const int blobs = uniform(1, 3);
      const double r_max = std::max(1.0, std::min(s.width, s.height) / 4.0);
      for (int b = 0; b < blobs; ++b) {
        const double cx = uniform(0, s.width - 1), cy = uniform(0, s.height - 1);
        const double rx = std::uniform_real_distribution<double>(1.0, r_max)(rng);
        const double ry = std::uniform_real_distribution<double>(1.0, r_max)(rng);
        for (int y = 0; y < s.height; ++y)
          for (int x = 0; x < s.width; ++x) {
            const double u = (x - cx) / rx, v = (y - cy) / ry;
            if (u * u + v * v <= 1.0) mask[s.index(x, y)] = 1;
          }
      }
      break;
    }
  }
  return mask;
}

// 4-neighbour BFS distance from every pixel to the nearest pixel whose mask
// value equals `target`.
inline std::vector<int> distance_to(const std::vector<std::uint8_t>& mask, const GridShape& s,
                                    std::uint8_t target) {
  std::vector<int> dist(mask.size(), std::numeric_limits<int>::max());
  std::deque<std::size_t> queue;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j] == target) {
      dist[j] = 0;
      queue.push_back(j);
    }
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(j % static_cast<std::size_t>(s.width));
    const int y = static_cast<int>(j / static_cast<std::size_t>(s.width));
    const int nx[] = {x - 1, x + 1, x, x};
    const int ny[] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= s.width || ny[k] >= s.height) continue;
      const std::size_t i = s.index(nx[k], ny[k]);
      if (dist[i] > dist[j] + 1) {
        dist[i] = dist[j] + 1;
        queue.push_back(i);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Signed distance channel: +d inside the foreground (d = steps to the
/// background), -d outside, truncated at `cap`. Never zero.
inline std::vector<double> signed_distance(const Labeling& y, const GridShape& s, double cap) {
  std::vector<std::uint8_t> mask(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) mask[j] = y.positive(j);
  const auto to_bg = detail::distance_to(mask, s, 0);
  const auto to_fg = detail::distance_to(mask, s, 1);
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double d = y.positive(j) ? to_bg[j] : to_fg[j];
    out[j] = (y.positive(j) ? 1.0 : -1.0) * std::min(d, cap);
  }
  return out;
}

/// Channels: noisy signed distance, constant 1, then pure noise.
inline std::vector<Sample> generate(const SyntheticConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const GridShape& shape = config.shape;
  const std::size_t p = shape.pixels();
  const std::size_t d = config.channels();
  const EdgeSet edges = EdgeSet::Grid(shape, config.model_connectivity);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Sample> out;
  out.reserve(config.samples);
  for (std::size_t i = 0; i < config.samples; ++i) {
    std::vector<std::uint8_t> mask;
    std::size_t m = 0;
    do {
      mask = detail::draw_structure(rng, shape, config.structure);
      m = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
    } while (m == 0 || m == p);
    Labeling y(p);
    for (std::size_t j = 0; j < p; ++j) y.set(j, mask[j] ? 1 : -1);

    const auto dist = signed_distance(y, shape, config.distance_cap);
    UnaryFeatures f(p, d);
    for (std::size_t j = 0; j < p; ++j) {
      f.at(j, 0) = dist[j] + config.noise * normal(rng);
      f.at(j, 1) = 1.0;
      for (std::size_t c = 2; c < d; ++c) f.at(j, c) = config.noise * normal(rng);
    }
    out.push_back({std::move(f), shape, edges, std::move(y)});
  }
  return out;
}

}  // namespace supmod

#endif  // SUPMOD_SYNTHETIC_HPP_
