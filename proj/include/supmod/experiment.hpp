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


// Cross-evaluation protocol: repeated random train/test splits, one model per
// training loss, every model scored under every evaluation loss.

#ifndef SUPMOD_EXPERIMENT_HPP_
#define SUPMOD_EXPERIMENT_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "supmod/parallel.hpp"
#include "supmod/ssvm.hpp"
#include "supmod/synthetic.hpp"

namespace supmod {

inline std::vector<LossConfig> default_losses(bool include_iou) {
  std::vector<LossConfig> out;
  for (auto k : {LossKind::kHamming, LossKind::kDelta8, LossKind::kSquare, LossKind::kBiconvex}) {
    LossConfig c;
    c.kind = k;
    out.push_back(c);
  }
  if (include_iou) {
    LossConfig c;
    c.kind = LossKind::kIoU;
    out.push_back(c);
  }
  return out;
}

struct ExperimentConfig {
  SyntheticConfig data;
  std::vector<LossConfig> train_losses = default_losses(false);
  std::vector<LossConfig> eval_losses = default_losses(true);
  std::size_t splits = 5;
  double test_fraction = 0.5;
  TrainConfig train;
  /// Pick C per split and training loss by cross-validation on the
  /// training part instead of using train.C.
  bool select_c = false;
  std::uint64_t seed = 0;

  void validate() const {
    data.validate();
    if (train_losses.empty() || eval_losses.empty()) throw std::invalid_argument("experiment: empty loss list");
    if (splits == 0) throw std::invalid_argument("experiment: splits must be >= 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
      throw std::invalid_argument("experiment: test_fraction must be in (0, 1)");
    }
    const auto test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(data.samples)));
    if (test < 1 || test >= data.samples) throw std::invalid_argument("experiment: split leaves an empty side");
    train.validate();
  }
};

struct SplitResult {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<double> C;                        // per training loss
  std::vector<std::vector<LossSummary>> table;  // [train loss][eval loss]
  std::vector<double> train_ms;                 // wall clock, not reproducible
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SplitResult> splits;
  /// Mean over splits of the per-split test means; standard error across splits.
  std::vector<std::vector<LossSummary>> table;
};

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> random_split(std::size_t n,
                                                                                  double test_fraction,
                                                                                  std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> te(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(test));
  std::vector<std::size_t> tr(idx.begin() + static_cast<std::ptrdiff_t>(test), idx.end());
  std::sort(te.begin(), te.end());
  std::sort(tr.begin(), tr.end());
  return {tr, te};
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto data = generate(config.data);
  ExperimentResult result;
  result.config = config;
  result.splits.resize(config.splits);

  // Splits run concurrently; training inside a split stays on one thread.
  parallel_for(result.splits.size(), [&](std::size_t s) {
    auto& split = result.splits[s];
    split.seed = config.seed + 1000003ULL * (s + 1);
    std::tie(split.train_indices, split.test_indices) =
        random_split(data.size(), config.test_fraction, split.seed);
    std::vector<Sample> train_set, test_set;
    for (auto i : split.train_indices) train_set.push_back(data[i]);
    for (auto i : split.test_indices) test_set.push_back(data[i]);

    for (const auto& loss : config.train_losses) {
      TrainConfig cfg = config.train;
      cfg.loss = loss;
      cfg.threads = 1;
      if (config.select_c && train_set.size() >= 2) cfg.C = cross_validate(train_set, cfg).best_C;
      const auto t0 = std::chrono::steady_clock::now();
      const Model model = train(train_set, cfg);
      split.train_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
      split.C.push_back(cfg.C);
      split.table.push_back(evaluate_model(model, test_set, config.eval_losses));
    }
  });

  for (std::size_t t = 0; t < config.train_losses.size(); ++t) {
    std::vector<LossSummary> row;
    for (std::size_t e = 0; e < config.eval_losses.size(); ++e) {
      std::vector<double> means;
      for (const auto& split : result.splits) means.push_back(split.table[t][e].mean);
      row.push_back(summarize(to_string(config.eval_losses[e].kind), means));
    }
    result.table.push_back(std::move(row));
  }
  return result;
}

}  // namespace supmod

#endif  // SUPMOD_EXPERIMENT_HPP_
