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

#include "supmod/admm.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "supmod/oracle.hpp"
#include "test_util.hpp"

namespace supmod {
namespace {

struct Instance {
  GridShape shape{3, 3};
  EdgeSet edges;
  UnaryFeatures features;
  WeightVector w;
  Labeling y_star;
};

Instance RandomInstance(std::mt19937_64& rng, GridShape shape = {3, 3}) {
  Instance in;
  in.shape = shape;
  in.edges = EdgeSet::Grid(shape, Connectivity::kFour);
  in.features = testing::random_features(rng, shape.pixels(), 3);
  in.w = testing::random_weights(rng, 3);
  in.y_star = testing::random_ground_truth(rng, shape.pixels());
  return in;
}

TEST(StoppingCriterionTest, AgreementStops) {
  ADMMState s;
  s.y_a = s.y_b = s.y_b_previous = Labeling{1, -1, 1};
  s.u = {0.0, 0.0, 0.0};
  s.t = 1;
  EXPECT_TRUE(stopping_criterion(s, ADMMParams{}));
  s.t = 0;
  EXPECT_FALSE(stopping_criterion(s, ADMMParams{}));
}

TEST(StoppingCriterionTest, SingleDisagreementOn100PixelsContinues) {
  ADMMState s;
  s.y_a = Labeling(100, -1);
  s.y_b = s.y_a;
  s.y_b.flip(0);
  s.y_b_previous = s.y_b;
  s.u.assign(100, 0.0);
  s.t = 1;
  EXPECT_DOUBLE_EQ(primal_residual(s), 2.0);
  EXPECT_FALSE(stopping_criterion(s, ADMMParams{}));
}

TEST(AdmmTest, HammingEqualsSingleJointCut) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = RandomInstance(rng);
    auto loss = LossFunction::Hamming();
    auto r = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss);
    auto ref = brute_force_loss_augmented(in.w, in.features, in.edges, in.y_star, loss);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 1);
    EXPECT_TRUE(testing::near_relative(r.objective, ref.value));
    auto joint = modular_loss_augmented_map(in.w, in.features, in.edges, in.y_star);
    EXPECT_DOUBLE_EQ(r.objective,
                     loss_augmented_objective(in.w, in.features, in.edges, in.y_star, loss, joint));
  }
}

TEST(AdmmTest, ZeroWeightsHammingGivesComplement) {
  std::mt19937_64 rng(42);
  auto in = RandomInstance(rng);
  auto r = loss_augmented_inference(WeightVector::Zero(3), in.features, in.edges, in.y_star,
                                    LossFunction::Hamming());
  EXPECT_EQ(r.labeling, in.y_star.complement());
  EXPECT_DOUBLE_EQ(r.objective, 9.0);
}

TEST(AdmmTest, ZeroWeightsMaximizesLoss) {
  std::mt19937_64 rng(43);
  auto in = RandomInstance(rng);
  auto loss = LossFunction::Delta8(EdgeSet::Grid(in.shape, Connectivity::kEight), 0.5);
  auto r = loss_augmented_inference(WeightVector::Zero(3), in.features, in.edges, in.y_star, loss);
  EXPECT_EQ(r.labeling, in.y_star.complement());
}

TEST(AdmmTest, ObjectiveMatchesReevaluation) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    auto in = RandomInstance(rng);
    auto loss = LossFunction::Square();
    auto r = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss);
    EXPECT_DOUBLE_EQ(r.objective, score(in.w, in.features, in.edges, r.labeling) +
                                      evaluate(loss, in.y_star, r.labeling));
    EXPECT_EQ(r.residuals.size(), static_cast<std::size_t>(r.iterations));
  }
}

TEST(AdmmTest, ResultDominatesFinalIteratesAndGroundTruth) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = RandomInstance(rng);
    auto loss = LossFunction::Biconvex();
    auto r = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss);
    for (const auto* y : {&r.state.y_a, &r.state.y_b, &in.y_star}) {
      EXPECT_GE(r.objective, loss_augmented_objective(in.w, in.features, in.edges, in.y_star, loss, *y));
    }
    EXPECT_EQ(r.state.t, r.iterations);
    EXPECT_EQ(r.converged, stopping_criterion(r.state, ADMMParams{}));
  }
}

TEST(AdmmTest, Delta8NearOptimalOnSmallGrids) {
  std::mt19937_64 rng(45);
  int within = 0, exact = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    auto in = RandomInstance(rng);
    auto loss = LossFunction::Delta8(EdgeSet::Grid(in.shape, Connectivity::kEight), 0.5);
    auto r = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss);
    auto ref = brute_force_loss_augmented(in.w, in.features, in.edges, in.y_star, loss);
    ASSERT_LE(r.objective, ref.value + 1e-9);
    within += (ref.value - r.objective) <= 0.02 * std::abs(ref.value);
    exact += testing::near_relative(r.objective, ref.value);
  }
  EXPECT_GE(within, 95);
  EXPECT_GE(exact, 80);
}

TEST(AdmmTest, ConvergedRunsSatisfyCriterionAtFinalIterate) {
  std::mt19937_64 rng(46);
  ADMMParams params;
  for (int trial = 0; trial < 30; ++trial) {
    auto in = RandomInstance(rng);
    auto loss = LossFunction::Biconvex();
    auto r = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss, params);
    if (!r.converged) continue;
    const auto& last = r.residuals.back();
    const double bound = 3.0 * params.eps_abs + params.eps_rel * 3.0;
    EXPECT_LE(last.primal, bound);
  }
}

TEST(AdmmTest, MaxIterationsStillReportsTrace) {
  std::mt19937_64 rng(47);
  auto in = RandomInstance(rng, {4, 4});
  ADMMParams params;
  params.max_iterations = 1;
  auto r = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, LossFunction::Square(),
                                    params);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.residuals.size(), 1u);
}

TEST(AdmmTest, Deterministic) {
  std::mt19937_64 rng(48);
  auto in = RandomInstance(rng, {5, 4});
  auto loss = LossFunction::Biconvex();
  auto a = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss);
  auto b = loss_augmented_inference(in.w, in.features, in.edges, in.y_star, loss);
  EXPECT_EQ(a.labeling, b.labeling);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(AdmmTest, RejectsUnsupportedLossAndBadParams) {
  std::mt19937_64 rng(49);
  auto in = RandomInstance(rng);
  EXPECT_THROW(loss_augmented_inference(in.w, in.features, in.edges, in.y_star, LossFunction::IoU()),
               std::invalid_argument);
  ADMMParams bad;
  bad.rho = -1.0;
  EXPECT_THROW(loss_augmented_inference(in.w, in.features, in.edges, in.y_star,
                                        LossFunction::Square(), bad),
               std::invalid_argument);
  WeightVector w = in.w;
  w.pairwise = {0.0, 1.0, 0.0};
  EXPECT_THROW(loss_augmented_inference(w, in.features, in.edges, in.y_star, LossFunction::Square()),
               std::invalid_argument);
}

TEST(AdmmTest, ResidualCsv) {
  std::ostringstream os;
  write_residual_csv(os, {{1, 2.0, 0.5}, {2, 0.0, 0.0}});
  EXPECT_EQ(os.str(), "iteration,primal,dual\n1,2,0.5\n2,0,0\n");
}

}  // namespace
}  // namespace supmod
