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


#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "supmod/bench.hpp"
#include "supmod/experiment.hpp"
#include "supmod/raster.hpp"
#include "supmod/serialization.hpp"
#include "supmod/synthetic.hpp"
#include "test_util.hpp"

namespace supmod {
namespace {

TEST(Generate, NoiselessDistanceSignIsGroundTruth) {
  for (auto structure : {Structure::kPolylines, Structure::kBars, Structure::kBlobs}) {
    SyntheticConfig cfg;
    cfg.structure = structure;
    cfg.samples = 5;
    cfg.seed = 3;
    for (const auto& s : generate(cfg)) {
      for (std::size_t j = 0; j < s.shape.pixels(); ++j) {
        EXPECT_EQ(s.features.at(j, 0) > 0.0, s.y_star.positive(j));
        EXPECT_EQ(s.features.at(j, 1), 1.0);
      }
    }
  }
}

TEST(Generate, SameSeedSameData) {
  SyntheticConfig cfg;
  cfg.noise = 0.7;
  cfg.seed = 99;
  auto a = generate(cfg), b = generate(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].y_star, b[i].y_star);
    EXPECT_EQ(a[i].features.data(), b[i].features.data());
  }
  cfg.seed = 100;
  EXPECT_NE(generate(cfg)[0].features.data(), a[0].features.data());
}

TEST(Generate, SampleInvariantsOverRandomConfigs) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> side(2, 12);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> noise(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    SyntheticConfig cfg;
    cfg.shape = GridShape(side(rng), side(rng));
    cfg.samples = 2;
    cfg.structure = static_cast<Structure>(kind(rng));
    cfg.noise = noise(rng);
    cfg.noise_channels = static_cast<std::size_t>(trial % 3);
    cfg.seed = rng();
    for (const auto& s : generate(cfg)) {
      EXPECT_NO_THROW(s.validate());
      const auto m = s.y_star.count_positive();
      EXPECT_GE(m, 1u);
      EXPECT_LT(m, s.shape.pixels());
      EXPECT_EQ(s.features.cols(), cfg.channels());
    }
  }
}

TEST(Generate, RejectsDegenerateConfig) {
  SyntheticConfig cfg;
  cfg.noise = -1.0;
  EXPECT_THROW(generate(cfg), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.samples = 0;
  EXPECT_THROW(generate(cfg), std::invalid_argument);
}

TEST(SignedDistance, KnownValues) {
  GridShape shape(5, 1);
  Labeling y{-1, -1, 1, -1, -1};
  EXPECT_EQ(signed_distance(y, shape, 3.0), (std::vector<double>{-2, -1, 1, -1, -2}));
  EXPECT_EQ(signed_distance(y, shape, 1.5), (std::vector<double>{-1.5, -1, 1, -1, -1.5}));
}

TEST(Raster, LabelRoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    GridShape shape(1 + trial % 7, 1 + trial % 5);
    auto y = testing::random_labeling(rng, shape.pixels());
    std::stringstream buf;
    write_raster(buf, raster_from_labels(y, shape));
    auto r = read_raster(buf);
    EXPECT_EQ(r.shape, shape);
    EXPECT_EQ(labels_from_raster(r), y);
  }
}

TEST(Raster, AllWhiteIsForeground) {
  std::stringstream buf("P5\n2 2\n255\n\xff\xff\xff\xff");
  EXPECT_EQ(labels_from_raster(read_raster(buf)), (Labeling{1, 1, 1, 1}));
}

TEST(Raster, HeaderCommentsAccepted) {
  std::stringstream buf(std::string("P5\n# note\n2 1\n255\n") + '\0' + '\xff');
  EXPECT_EQ(labels_from_raster(read_raster(buf)), (Labeling{-1, 1}));
}

TEST(Raster, MismatchedDimensionsRejected) {
  std::stringstream short_data("P5\n3 3\n255\n\xff\xff\xff\xff");
  EXPECT_THROW(read_raster(short_data), std::runtime_error);
  std::stringstream long_data("P5\n1 1\n255\n\xff\xff");
  EXPECT_THROW(read_raster(long_data), std::runtime_error);
}

TEST(Raster, MalformedHeaderRejected) {
  std::stringstream magic("P2\n1 1\n255\n\xff");
  EXPECT_THROW(read_raster(magic), std::runtime_error);
  std::stringstream maxval("P5\n1 1\n65535\n\xff");
  EXPECT_THROW(read_raster(maxval), std::runtime_error);
  std::stringstream missing("P5\n1\n");
  EXPECT_THROW(read_raster(missing), std::runtime_error);
}

TEST(Raster, NonBinaryLabelRejected) {
  std::stringstream buf("P5\n2 1\n255\n\xff\x80");
  auto r = read_raster(buf);
  EXPECT_THROW(labels_from_raster(r), std::runtime_error);
  EXPECT_NEAR(channel_from_raster(r)[1], 128.0 / 255.0, 1e-12);
}

TEST(Serialization, DatasetRoundTrip) {
  SyntheticConfig cfg;
  cfg.shape = GridShape(6, 5);
  cfg.samples = 3;
  cfg.noise = 0.3;
  auto data = generate(cfg);
  const Json j = dataset_to_json(data);
  auto back = dataset_from_json(Json::parse(j.dump()));
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].shape, data[i].shape);
    EXPECT_EQ(back[i].y_star, data[i].y_star);
    EXPECT_EQ(back[i].features.data(), data[i].features.data());
    EXPECT_EQ(back[i].edges.edges(), data[i].edges.edges());
  }
}

TEST(Serialization, CustomEdgesRoundTrip) {
  GridShape shape(3, 1);
  EdgeSet edges(3, {{0, 2}});
  auto back = edges_from_json(Json::parse(edges_to_json(edges).dump()), shape);
  EXPECT_EQ(back.edges(), edges.edges());
}

TEST(Serialization, ModelRoundTripAndValidation) {
  Model m;
  m.w = WeightVector({0.1, -2.5}, {1.0, 0.25, 3.0});
  m.C = 10.0;
  m.loss.kind = LossKind::kSquare;
  m.loss.alpha = 2.0;
  m.trace.dual_objective = {0.5, 0.75};
  const Json j = m;
  Model back = Json::parse(j.dump()).get<Model>();
  EXPECT_EQ(back.w.flat(), m.w.flat());
  EXPECT_EQ(back.loss.kind, LossKind::kSquare);
  EXPECT_EQ(back.loss.alpha, 2.0);
  EXPECT_EQ(back.trace.dual_objective, m.trace.dual_objective);

  Json bad = j;
  bad["w"]["pairwise"] = {0.0, 1.0, 0.0};
  EXPECT_THROW(bad.get<Model>(), std::invalid_argument);
}

TEST(Serialization, UnknownLossRejected) {
  EXPECT_THROW((Json{{"kind", "zero-one"}}.get<LossConfig>()), std::invalid_argument);
}

ExperimentConfig tiny_experiment(double noise) {
  ExperimentConfig cfg;
  cfg.data.shape = GridShape(8, 8);
  cfg.data.samples = 6;
  cfg.data.noise = noise;
  cfg.data.seed = 11;
  cfg.splits = 2;
  cfg.train.C = 10.0;
  return cfg;
}

TEST(Experiment, SeparableDiagonalNearZero) {
  auto result = run_experiment(tiny_experiment(0.0));
  ASSERT_EQ(result.table.size(), result.config.train_losses.size());
  for (std::size_t t = 0; t < result.table.size(); ++t) {
    ASSERT_EQ(result.table[t].size(), result.config.eval_losses.size());
    EXPECT_LE(result.table[t][t].mean, 1e-9) << result.table[t][t].name;
  }
  for (const auto& split : result.splits) {
    EXPECT_EQ(split.train_indices.size() + split.test_indices.size(), 6u);
    EXPECT_EQ(split.table.size(), result.config.train_losses.size());
  }
}

TEST(Experiment, JsonReloadIdenticalAndReproducible) {
  auto cfg = tiny_experiment(1.0);
  cfg.train_losses.resize(2);
  auto a = run_experiment(cfg);
  Json ja = a;
  auto reloaded = Json::parse(ja.dump()).get<ExperimentResult>();
  EXPECT_EQ(Json(reloaded).dump(), ja.dump());

  auto b = run_experiment(cfg);
  for (std::size_t t = 0; t < a.table.size(); ++t)
    for (std::size_t e = 0; e < a.table[t].size(); ++e) EXPECT_EQ(a.table[t][e].mean, b.table[t][e].mean);
}

TEST(Experiment, RejectsBadSplit) {
  auto cfg = tiny_experiment(0.0);
  cfg.test_fraction = 1.0;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(Bench, RowsAndAgreement) {
  BenchConfig cfg;
  cfg.sizes = {8, 16, 32};
  cfg.repetitions = 3;
  auto r = run_bench(cfg);
  ASSERT_EQ(r.rows.size(), 6u);
  EXPECT_LE(r.max_value_gap, 1e-9);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.median_ms, 0.0);
    EXPECT_GE(row.iqr_ms, 0.0);
  }
  std::ostringstream csv;
  write_bench_csv(csv, r.rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "method,n,median_ms,iqr_ms");
}

TEST(Bench, MinNormSizeCapSkips) {
  BenchConfig cfg;
  cfg.sizes = {kMinNormSizeCap + 1};
  cfg.methods = {"minnorm"};
  cfg.repetitions = 1;
  auto r = run_bench(cfg);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(r.notes.size(), 1u);
}

TEST(Bench, QuantileAndSlope) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  std::vector<BenchRow> rows{{"x", 10, 1.0, 0}, {"x", 100, 100.0, 0}, {"y", 10, 1.0, 0}, {"y", 100, 10.0, 0}};
  EXPECT_NEAR(loglog_slope(rows, "x"), 2.0, 1e-12);
  EXPECT_NEAR(loglog_slope(rows, "y"), 1.0, 1e-12);
  EXPECT_THROW(loglog_slope(rows, "z"), std::invalid_argument);
}

}  // namespace
}  // namespace supmod
