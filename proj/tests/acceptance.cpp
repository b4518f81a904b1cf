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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Every check is seeded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "supmod/admm.hpp"
#include "supmod/bench.hpp"
#include "supmod/experiment.hpp"
#include "supmod/loss_solvers.hpp"
#include "supmod/losses.hpp"
#include "supmod/minnorm.hpp"
#include "supmod/oracle.hpp"
#include "supmod/ssvm.hpp"
#include "supmod/synthetic.hpp"
#include "test_util.hpp"

namespace supmod {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

bool relative_match(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Loss-subproblem instance max_A loss(A) + sum_{j in A} c_j written as
// loss-augmented inference: one feature channel, zero pairwise weights.
// Flipping pixel j away from y* changes the score by exactly c_j.
struct SubproblemInstance {
  Labeling y_star;
  std::vector<double> c;
  GridShape shape;
};

double brute_force_subproblem(const SubproblemInstance& in, const LossFunction& loss) {
  const std::size_t p = in.c.size();
  std::vector<double> x(p);
  double offset = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    x[j] = in.y_star.positive(j) ? -in.c[j] : in.c[j];
    if (in.y_star.positive(j)) offset += x[j];
  }
  UnaryFeatures features(p, 1, x);
  WeightVector w({1.0}, {0.0, 0.0, 0.0});
  const auto edges = EdgeSet::Grid(in.shape, Connectivity::kFour);
  return brute_force_loss_augmented(w, features, edges, in.y_star, loss).value - offset;
}

Outcome criterion_solver_exactness() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> side(1, 4);
  std::normal_distribution<double> normal(0.0, 1.5);
  std::uniform_real_distribution<double> gamma_dist(0.0, 2.0);
  int mismatches[3] = {0, 0, 0};
  double worst = 0.0;
  const int kInstances = 300;
  for (int t = 0; t < kInstances; ++t) {
    GridShape shape;
    do shape = GridShape(side(rng), side(rng) + 1);
    while (shape.pixels() > 14 || shape.pixels() < 2);
    SubproblemInstance in{testing::random_ground_truth(rng, shape.pixels()), {}, shape};
    in.c.resize(shape.pixels());
    for (auto& v : in.c) v = normal(rng);
    const double gamma = gamma_dist(rng);
    const LossFunction losses[3] = {LossFunction::Square(), LossFunction::Biconvex(),
                                    LossFunction::Delta8(EdgeSet::Grid(shape, Connectivity::kEight), gamma)};
    const std::size_t m = in.y_star.count_positive();
    const double got[3] = {
        solve_symmetric_augmented(cardinality_profile(losses[0], m, shape.pixels()), in.c).value,
        solve_biconvex_augmented(biconvex_profile(losses[1], m), in.y_star, in.c).value,
        solve_pairwise_augmented(shape.pixels(), gamma, losses[2].loss_edges(), in.c).value};
    for (int k = 0; k < 3; ++k) {
      const double want = brute_force_subproblem(in, losses[k]);
      worst = std::max(worst, std::abs(got[k] - want) / std::max({1.0, std::abs(want)}));
      if (!relative_match(got[k], want, 1e-9)) ++mismatches[k];
    }
  }
  const bool pass = mismatches[0] == 0 && mismatches[1] == 0 && mismatches[2] == 0;
  return {pass, format("%d instances x 3 solvers; mismatches symmetric=%d biconvex=%d pairwise=%d; "
                       "max rel err %.2e",
                       kInstances, mismatches[0], mismatches[1], mismatches[2], worst)};
}

struct AdmmRun {
  double objective = 0.0;
  double optimum = 0.0;
  bool converged = false;
  bool criterion_holds = false;
  int iterations = 0;
};

// Shared by the quality and convergence criteria.
const std::vector<std::vector<AdmmRun>>& admm_runs() {
  static std::vector<std::vector<AdmmRun>> runs = [] {
    std::vector<std::vector<AdmmRun>> out(3);
    const GridShape shape(3, 3);
    const LossFunction losses[3] = {LossFunction::Delta8(EdgeSet::Grid(shape, Connectivity::kEight), 0.5),
                                    LossFunction::Square(), LossFunction::Biconvex()};
    const ADMMParams params;
    for (int k = 0; k < 3; ++k) {
      std::mt19937_64 rng(2000 + k);
      for (int t = 0; t < 100; ++t) {
        const auto features = testing::random_features(rng, 9, 3);
        const auto w = testing::random_weights(rng, 3);
        const auto y_star = testing::random_ground_truth(rng, 9);
        const auto edges = EdgeSet::Grid(shape, Connectivity::kFour);
        const auto r = loss_augmented_inference(w, features, edges, y_star, losses[k], params);
        const auto ref = brute_force_loss_augmented(w, features, edges, y_star, losses[k]);
        out[k].push_back({r.objective, ref.value, r.converged, stopping_criterion(r.state, params), r.iterations});
      }
    }
    return out;
  }();
  return runs;
}

Outcome criterion_admm_quality() {
  const char* names[3] = {"delta8", "square", "biconvex"};
  bool pass = true;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    int exact = 0;
    double worst_ratio = 1.0;
    for (const auto& r : admm_runs()[k]) {
      // Fraction of the optimum, measured as 1 - gap / |optimum|.
      const double ratio = 1.0 - (r.optimum - r.objective) / std::max(1e-12, std::abs(r.optimum));
      worst_ratio = std::min(worst_ratio, ratio);
      exact += relative_match(r.objective, r.optimum, 1e-9);
    }
    pass = pass && worst_ratio >= 0.98 && exact >= 80;
    detail += format("%s: exact %d/100, worst %.4f; ", names[k], exact, worst_ratio);
  }
  return {pass, detail};
}

Outcome criterion_supermodularity() {
  const GridShape shape(3, 2);
  const std::size_t p = shape.pixels();
  struct Case {
    std::string name;
    LossFunction loss;
  };
  const auto loss_edges = EdgeSet::Grid(shape, Connectivity::kEight);
  const std::vector<Case> cases{{"delta8(0.25)", LossFunction::Delta8(loss_edges, 0.25)},
                                {"delta8(0.5)", LossFunction::Delta8(loss_edges, 0.5)},
                                {"delta8(1)", LossFunction::Delta8(loss_edges, 1.0)},
                                {"square", LossFunction::Square()},
                                {"biconvex", LossFunction::Biconvex()}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    std::size_t violations = 0, checked = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << p); ++bits) {
      const Labeling y_star = Labeling::FromMask(bits, p);
      if (c.loss.kind() == LossKind::kSquare && bits == 0) continue;  // scale undefined at m = 0
      const auto report = check_supermodular(as_set_function(c.loss, y_star), p);
      violations += report.total;
      checked += report.checked;
    }
    pass = pass && violations == 0;
    detail += format("%s %zu/%zu; ", c.name.c_str(), violations, checked);
  }
  std::size_t iou_violations = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << p); ++bits)
    iou_violations += check_supermodular(as_set_function(LossFunction::IoU(), Labeling::FromMask(bits, p)), p).total;
  pass = pass && iou_violations > 0;
  detail += format("iou %zu violations", iou_violations);
  return {pass, detail};
}

Outcome criterion_biconvexity() {
  std::size_t violations = 0, cells = 0;
  for (std::size_t p = 0; p <= 100; ++p)
    for (std::size_t m = 0; m <= std::min<std::size_t>(50, p); ++m) {
      violations += check_biconvex(BiconvexProfile(m), m, p).total;
      cells += (m + 1) * (p - m + 1);
    }
  return {violations == 0, format("%zu negative second differences over %zu grid cells", violations, cells)};
}

Outcome criterion_minnorm() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> size(1, 10);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> positive(0.0, 2.0);
  int random_bad = 0;
  double random_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    // Concave functions of the cardinality of random subsets, plus a modular term.
    struct Term {
      std::vector<std::uint8_t> support;
      double scale, exponent;
    };
    std::vector<Term> terms(3);
    for (auto& term : terms) {
      term.support.resize(n);
      for (auto& s : term.support) s = rng() & 1;
      term.scale = positive(rng);
      term.exponent = 0.2 + 0.8 * positive(rng) / 2.0;
    }
    std::vector<double> modular(n);
    for (auto& v : modular) v = normal(rng);
    const SetFunctionOracle f(n, [terms, modular](std::span<const std::uint8_t> mask) {
      double v = 0.0;
      for (const auto& term : terms) {
        double k = 0.0;
        for (std::size_t j = 0; j < mask.size(); ++j) k += mask[j] && term.support[j];
        v += term.scale * std::pow(k, term.exponent);
      }
      for (std::size_t j = 0; j < mask.size(); ++j)
        if (mask[j]) v += modular[j];
      return v;
    });
    const double got = minimize(f).value;
    const double want = brute_force_set_minimum(f).value;
    random_worst = std::max(random_worst, std::abs(got - want));
    random_bad += std::abs(got - want) > 1e-6;
  }

  int subproblem_bad = 0;
  double subproblem_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 13);
    const auto y_star = testing::random_ground_truth(rng, n);
    std::vector<double> c(n);
    for (auto& v : c) v = 1.5 * normal(rng);
    const LossFunction loss = t % 2 ? LossFunction::Biconvex() : LossFunction::Square();
    const double specialized = solve_loss_augmented(loss, y_star, c).value;
    const auto l = as_set_function(loss, y_star);
    const SetFunctionOracle negated(n, [&](std::span<const std::uint8_t> mask) {
      double v = l(mask);
      for (std::size_t j = 0; j < n; ++j)
        if (mask[j]) v += c[j];
      return -v;
    });
    const double via_minnorm = -minimize(negated).value;
    subproblem_worst = std::max(subproblem_worst, std::abs(specialized - via_minnorm));
    subproblem_bad += std::abs(specialized - via_minnorm) > 1e-6;
  }
  return {random_bad == 0 && subproblem_bad == 0,
          format("random submodular n<=10: %d/100 off (max %.1e); negated subproblems n<=14: %d/100 off (max %.1e)",
                 random_bad, random_worst, subproblem_bad, subproblem_worst)};
}

Outcome criterion_timing() {
  BenchConfig cfg;
  cfg.sizes = {64, 128, 256, 512, 1024};
  cfg.repetitions = 20;
  cfg.seed = 404;
  const auto result = run_bench(cfg);
  const auto* fast = find_row(result.rows, "specialized", 1024);
  const auto* slow = find_row(result.rows, "minnorm", 1024);
  if (!fast || !slow) return {false, "missing n=1024 rows"};
  const double speedup = slow->median_ms / std::max(fast->median_ms, 1e-9);
  const double slope_fast = loglog_slope(result.rows, "specialized");
  const double slope_slow = loglog_slope(result.rows, "minnorm");
  const bool pass = speedup >= 10.0 && slope_slow > slope_fast && result.max_value_gap <= 1e-6;
  return {pass, format("n=1024 median %.4f ms vs %.1f ms (speedup %.0fx); slopes %.2f vs %.2f; value gap %.1e",
                       fast->median_ms, slow->median_ms, speedup, slope_fast, slope_slow,
                       result.max_value_gap)};
}

Outcome criterion_training() {
  SyntheticConfig data_cfg;
  data_cfg.shape = GridShape(24, 24);
  data_cfg.samples = 20;
  data_cfg.noise = 1.0;
  data_cfg.seed = 505;
  const auto noisy = generate(data_cfg);

  TrainConfig cfg;
  cfg.loss.kind = LossKind::kDelta8;
  cfg.C = 1.0;
  const Model model = train(noisy, cfg);
  bool monotone = true;
  double worst_drop = 0.0;
  const auto& dual = model.trace.sweep_dual;
  for (std::size_t k = 1; k < dual.size(); ++k) {
    worst_drop = std::max(worst_drop, dual[k - 1] - dual[k]);
    monotone = monotone && dual[k] >= dual[k - 1] - 1e-9;
  }
  const bool terminated = model.trace.converged && model.trace.final_max_excess <= cfg.eps_stop;

  data_cfg.noise = 0.0;
  data_cfg.seed = 506;
  const auto clean = generate(data_cfg);
  TrainConfig clean_cfg;
  clean_cfg.C = 10.0;
  const Model clean_model = train(clean, clean_cfg);
  std::size_t errors = 0;
  for (const auto& s : clean) errors += misprediction_set(s.y_star, predict(clean_model, s.features, s.shape, s.edges)).size();

  return {monotone && terminated && errors == 0,
          format("delta8 noisy: %zu sweeps, worst dual drop %.1e, %d outer iterations, converged=%d, "
                 "final relative excess %.1e; noiseless hamming: %zu training errors",
                 dual.size(), worst_drop, model.trace.outer_iterations, model.trace.converged ? 1 : 0,
                 model.trace.final_max_excess, errors)};
}

Outcome criterion_generalization() {
  ExperimentConfig cfg;
  cfg.data.shape = GridShape(24, 24);
  cfg.data.samples = 20;
  cfg.data.structure = Structure::kPolylines;
  cfg.data.noise = 1.5;
  cfg.data.seed = 606;
  cfg.seed = 606;
  cfg.splits = 5;
  cfg.train.C = 1.0;
  cfg.train_losses = {LossConfig{LossKind::kHamming}, LossConfig{LossKind::kDelta8}};
  cfg.eval_losses = {LossConfig{LossKind::kDelta8}};
  const auto result = run_experiment(cfg);
  int wins = 0;
  std::string detail;
  for (const auto& split : result.splits) {
    const double hamming = split.table[0][0].mean, delta8 = split.table[1][0].mean;
    wins += delta8 <= hamming;
    detail += format("%.2f/%.2f ", delta8, hamming);
  }
  return {wins >= 3, format("delta8-trained no worse in %d/5 splits (test delta8, delta8/hamming-trained: %s)", wins,
                            detail.c_str())};
}

Outcome criterion_convergence() {
  int converged = 0, total = 0, inconsistent = 0;
  for (const auto& per_loss : admm_runs())
    for (const auto& r : per_loss) {
      ++total;
      if (r.converged) {
        ++converged;
        inconsistent += !r.criterion_holds;
      }
    }
  return {converged >= 0.95 * total && inconsistent == 0,
          format("%d/%d converged before the cap; %d converged runs fail the criterion at exit", converged, total,
                 inconsistent)};
}

}  // namespace
}  // namespace supmod

int main(int argc, char** argv) {
  using namespace supmod;
  struct Criterion {
    const char* name;
    double budget_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 solver exactness", 60, criterion_solver_exactness},
      {"2 admm quality", 120, criterion_admm_quality},
      {"3 supermodularity", 60, criterion_supermodularity},
      {"4 biconvexity", 10, criterion_biconvexity},
      {"5 minnorm agreement", 600, criterion_minnorm},
      {"6 timing trend", 600, criterion_timing},
      {"7 training sanity", 300, criterion_training},
      {"8 generalization trend", 1800, criterion_generalization},
      {"9 admm convergence", 120, criterion_convergence},
  };
  // Optional arguments select criteria by number.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failures = 0, run = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    const auto& c = criteria[i];
    if (!selected.empty() && std::find(selected.begin(), selected.end(), static_cast<int>(i + 1)) == selected.end()) {
      continue;
    }
    ++run;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(t0);
    const bool within = elapsed <= c.budget_s;
    const bool pass = o.pass && within;
    failures += !pass;
    std::printf("%s  %-24s %7.2fs  %s%s\n", pass ? "PASS" : "FAIL", c.name, elapsed, o.detail.c_str(),
                within ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", run - failures, run);
  return failures == 0 ? 0 : 1;
}
