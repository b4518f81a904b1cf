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


// Command-line front end: data generation, training, prediction,
// evaluation, cross-evaluation experiments, timing and self-checks.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "supmod/admm.hpp"
#include "supmod/bench.hpp"
#include "supmod/experiment.hpp"
#include "supmod/loss_solvers.hpp"
#include "supmod/oracle.hpp"
#include "supmod/raster.hpp"
#include "supmod/serialization.hpp"
#include "supmod/ssvm.hpp"
#include "supmod/synthetic.hpp"

namespace fs = std::filesystem;
using namespace supmod;

namespace {

GridShape parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("--grid expects WxH, got '" + text + "'");
  std::size_t used_w = 0, used_h = 0;
  const int w = std::stoi(text.substr(0, x), &used_w);
  const int h = std::stoi(text.substr(x + 1), &used_h);
  if (used_w != x || used_h != text.size() - x - 1) {
    throw std::invalid_argument("--grid expects WxH, got '" + text + "'");
  }
  return GridShape(w, h);
}

const std::vector<std::string> kTrainLosses{"hamming", "delta8", "square", "biconvex"};
const std::vector<std::string> kStructures{"polylines", "bars", "blobs"};

struct LossFlags {
  std::string loss = "hamming";
  double gamma = 0.5;
  double alpha = 0.0;  // 0: default sqrt(m)

  void add(CLI::App* app) {
    app->add_option("--loss", loss, "Training loss")->check(CLI::IsMember(kTrainLosses))->capture_default_str();
    app->add_option("--gamma", gamma, "Pairwise weight of the delta8 loss")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Square-loss scale (default sqrt(m))")->check(CLI::PositiveNumber);
  }
  LossConfig config() const {
    LossConfig c;
    c.kind = loss_kind_from_string(loss);
    c.gamma = gamma;
    if (alpha > 0.0) c.alpha = alpha;
    return c;
  }
};

void print_table(const std::vector<std::string>& rows, const std::vector<std::vector<LossSummary>>& table) {
  std::printf("%-10s", "train\\eval");
  for (const auto& cell : table.front()) std::printf(" %22s", cell.name.c_str());
  std::printf("\n");
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::printf("%-10s", rows[r].c_str());
    for (const auto& cell : table[r]) std::printf(" %12.4f +- %7.4f", cell.mean, cell.standard_error);
    std::printf("\n");
  }
}

// Builds features [channel, 1, 0...] from a grayscale raster.
UnaryFeatures features_from_image(const Raster& r, std::size_t channels, double lo, double hi) {
  if (channels < 2) throw std::invalid_argument("model needs at least two feature channels for image input");
  const auto ch = channel_from_raster(r, lo, hi);
  UnaryFeatures f(ch.size(), channels);
  for (std::size_t j = 0; j < ch.size(); ++j) {
    f.at(j, 0) = ch[j];
    f.at(j, 1) = 1.0;
  }
  return f;
}

int cmd_gen(const SyntheticConfig& cfg, const std::string& out, const std::string& raster_dir) {
  const auto data = generate(cfg);
  write_json_file(out, dataset_to_json(data));
  if (!raster_dir.empty()) {
    fs::create_directories(raster_dir);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& s = data[i];
      std::vector<double> ch(s.shape.pixels());
      for (std::size_t j = 0; j < ch.size(); ++j) ch[j] = s.features.at(j, 0);
      const std::string stem = (fs::path(raster_dir) / ("sample_" + std::to_string(i))).string();
      write_raster(stem + "_labels.pgm", raster_from_labels(s.y_star, s.shape));
      write_raster(stem + "_channel0.pgm",
                   raster_from_channel(ch, s.shape, -cfg.distance_cap - 3.0 * cfg.noise,
                                       cfg.distance_cap + 3.0 * cfg.noise));
    }
  }
  std::printf("wrote %zu samples (%dx%d, %zu channels) to %s\n", data.size(), cfg.shape.width,
              cfg.shape.height, cfg.channels(), out.c_str());
  return 0;
}

int cmd_train(const std::string& data_path, TrainConfig cfg, bool select_c, const std::string& out,
              const std::string& residual_csv, std::size_t residual_sample) {
  const auto data = dataset_from_json(read_json_file(data_path));
  if (select_c) {
    const auto cv = cross_validate(data, cfg);
    for (const auto& [c, v] : cv.validation_loss) std::printf("C=%-8g validation %s = %.6f\n", c, to_string(cfg.loss.kind).c_str(), v);
    cfg.C = cv.best_C;
  }
  const Model model = train(data, cfg);
  write_json_file(out, model);
  std::printf("trained with %s, C=%g: %d outer iterations, %zu planes, %s\n",
              to_string(cfg.loss.kind).c_str(), cfg.C, model.trace.outer_iterations,
              model.trace.plane_counts.empty() ? std::size_t{0} : model.trace.plane_counts.back(),
              model.trace.converged ? "converged" : "iteration cap reached");
  if (!residual_csv.empty()) {
    if (residual_sample >= data.size()) throw std::invalid_argument("--residual-sample out of range");
    const auto& s = data[residual_sample];
    const auto r = loss_augmented_inference(model.w, s.features, s.edges, s.y_star,
                                            cfg.loss.bind(s.shape), cfg.admm);
    std::ofstream csv(residual_csv);
    if (!csv) throw std::runtime_error("cannot create '" + residual_csv + "'");
    write_residual_csv(csv, r.residuals);
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& image,
                double lo, double hi, const std::string& out_dir) {
  const Model model = read_json_file(model_path).get<Model>();
  fs::create_directories(out_dir);
  if (!image.empty()) {
    const auto r = read_raster(image);
    const auto f = features_from_image(r, model.w.unary.size(), lo, hi);
    const auto y = predict(model, f, r.shape, EdgeSet::Grid(r.shape, Connectivity::kFour));
    const auto path = (fs::path(out_dir) / "prediction.pgm").string();
    write_raster(path, raster_from_labels(y, r.shape));
    std::printf("%s: %zu foreground pixels\n", path.c_str(), y.count_positive());
    return 0;
  }
  const auto data = dataset_from_json(read_json_file(data_path));
  Json labels = Json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto y = predict(model, data[i].features, data[i].shape, data[i].edges);
    write_raster((fs::path(out_dir) / ("prediction_" + std::to_string(i) + ".pgm")).string(),
                 raster_from_labels(y, data[i].shape));
    labels.push_back(y);
  }
  write_json_file((fs::path(out_dir) / "predictions.json").string(), {{"predictions", labels}});
  std::printf("wrote %zu predictions to %s\n", data.size(), out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, const std::vector<std::string>& names,
             double gamma, const std::string& out) {
  const Model model = read_json_file(model_path).get<Model>();
  const auto data = dataset_from_json(read_json_file(data_path));
  std::vector<LossConfig> losses;
  for (const auto& n : names) {
    LossConfig c;
    c.kind = loss_kind_from_string(n);
    c.gamma = gamma;
    losses.push_back(c);
  }
  const auto rows = evaluate_model(model, data, losses);
  print_table({to_string(model.loss.kind)}, {rows});
  if (!out.empty()) write_json_file(out, {{"model_loss", model.loss}, {"samples", data.size()}, {"table", rows}});
  return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, const std::string& out) {
  const auto result = run_experiment(cfg);
  if (!out.empty()) write_json_file(out, result);
  std::vector<std::string> names;
  for (const auto& l : cfg.train_losses) names.push_back(to_string(l.kind));
  std::printf("mean test loss over %zu splits (standard error across splits)\n", cfg.splits);
  print_table(names, result.table);
  return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out) {
  const auto result = run_bench(cfg);
  if (out.empty() || out == "-") {
    write_bench_csv(std::cout, result.rows);
  } else {
    std::ofstream csv(out);
    if (!csv) throw std::runtime_error("cannot create '" + out + "'");
    write_bench_csv(csv, result.rows);
  }
  for (const auto& note : result.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
  for (const auto& m : cfg.methods) {
    try {
      std::fprintf(stderr, "log-log slope %s: %.3f\n", m.c_str(), loglog_slope(result.rows, m));
    } catch (const std::invalid_argument&) {
    }
  }
  for (std::size_t n : cfg.sizes) {
    const auto* a = find_row(result.rows, "specialized", n);
    const auto* b = find_row(result.rows, "minnorm", n);
    if (a && b && a->median_ms > 0.0) std::fprintf(stderr, "n=%zu speedup %.1fx\n", n, b->median_ms / a->median_ms);
  }
  std::fprintf(stderr, "max optimal-value gap: %.3g\n", result.max_value_gap);
  return 0;
}

// Property table: supermodularity, biconvexity, and solver exactness
// against enumeration, per loss.
int cmd_verify(GridShape shape, std::uint64_t seed, int instances) {
  const std::size_t p = shape.pixels();
  if (p < 2 || p > 10) throw std::invalid_argument("verify: --grid must have 2..10 pixels");
  struct Case {
    std::string label;
    LossConfig config;
    bool expect_supermodular;
  };
  std::vector<Case> cases;
  auto add = [&](std::string label, LossKind kind, double gamma, bool expect) {
    LossConfig c;
    c.kind = kind;
    c.gamma = gamma;
    cases.push_back({std::move(label), c, expect});
  };
  add("hamming", LossKind::kHamming, 0.0, true);
  add("delta8(0.25)", LossKind::kDelta8, 0.25, true);
  add("delta8(0.5)", LossKind::kDelta8, 0.5, true);
  add("delta8(1)", LossKind::kDelta8, 1.0, true);
  add("square", LossKind::kSquare, 0.0, true);
  add("biconvex", LossKind::kBiconvex, 0.0, true);
  add("iou", LossKind::kIoU, 0.0, false);

  int failures = 0;
  auto report = [&](const std::string& loss, const std::string& property, bool ok, const std::string& detail) {
    failures += !ok;
    std::printf("%-13s %-28s %-4s %s\n", loss.c_str(), property.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (const auto& c : cases) {
    const auto loss = c.config.bind(shape);
    // Supermodularity over every nonempty strict ground truth.
    std::size_t violations = 0;
    for (std::uint64_t bits = 1; bits + 1 < (std::uint64_t{1} << p); ++bits) {
      const Labeling y_star = Labeling::FromMask(bits, p);
      violations += check_supermodular(as_set_function(loss, y_star), p).total;
    }
    const bool supermodular = violations == 0;
    report(c.label, c.expect_supermodular ? "supermodular" : "not supermodular",
           supermodular == c.expect_supermodular, std::to_string(violations) + " violated triples");

    if (c.config.kind == LossKind::kBiconvex) {
      std::size_t bad = 0;
      for (std::size_t pp = 1; pp <= 100; ++pp)
        for (std::size_t m = 0; m <= std::min<std::size_t>(pp, 50); ++m)
          bad += check_biconvex(BiconvexProfile(m), m, pp).total;
      report(c.label, "biconvex profile", bad == 0, std::to_string(bad) + " negative second differences");
    }
    if (loss.capability() == SolverCapability::kNone) continue;

    double worst = 0.0;
    for (int t = 0; t < instances; ++t) {
      Labeling y_star = Labeling::FromMask(1 + rng() % ((std::uint64_t{1} << p) - 2), p);
      std::vector<double> w(p);
      for (auto& v : w) v = normal(rng);
      const double got = solve_loss_augmented(loss, y_star, w).value;
      const auto f = as_set_function(loss, y_star);
      const SetFunctionOracle g(p, [&](std::span<const std::uint8_t> mask) {
        double s = f(mask);
        for (std::size_t j = 0; j < p; ++j)
          if (mask[j]) s += w[j];
        return s;
      });
      const double want = brute_force_set_maximum(g).value;
      worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max relative error %.2e", worst);
    report(c.label, "exact loss subproblem", worst <= 1e-9, buf);
  }
  std::printf("%s\n", failures == 0 ? "all checks passed" : "some checks failed");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured segmentation with supermodular losses"};
  app.require_subcommand(1);

  // gen
  SyntheticConfig gen_cfg;
  std::string grid = "24x24", structure = "polylines", gen_out = "dataset.json", raster_dir;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--grid", grid, "Grid size WxH")->capture_default_str();
  gen->add_option("--samples", gen_cfg.samples, "Number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--structure", structure, "Foreground shape family")->check(CLI::IsMember(kStructures))->capture_default_str();
  gen->add_option("--noise", gen_cfg.noise, "Feature noise sigma")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--noise-channels", gen_cfg.noise_channels, "Pure-noise feature channels")->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Dataset JSON path")->capture_default_str();
  gen->add_option("--raster-dir", raster_dir, "Also write label and channel rasters here");

  // train
  TrainConfig train_cfg;
  LossFlags train_loss;
  std::string train_data, train_out = "model.json", residual_csv;
  std::size_t residual_sample = 0;
  bool select_c = false;
  std::uint64_t train_seed = 0;
  auto* tr = app.add_subcommand("train", "Train a model on a dataset");
  tr->add_option("--data", train_data, "Dataset JSON")->required();
  train_loss.add(tr);
  tr->add_option("--c", train_cfg.C, "Regularization constant C")->check(CLI::PositiveNumber)->capture_default_str();
  tr->add_option("--rho", train_cfg.admm.rho, "ADMM penalty")->check(CLI::PositiveNumber)->capture_default_str();
  tr->add_option("--eps-stop", train_cfg.eps_stop, "Constraint violation slack")->check(CLI::PositiveNumber)->capture_default_str();
  tr->add_option("--max-iter", train_cfg.max_outer_iterations, "Outer iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  tr->add_option("--seed", train_seed, "Accepted for interface uniformity; training is deterministic");
  tr->add_flag("--select-c", select_c, "Choose C from the grid by cross-validation");
  tr->add_option("--out", train_out, "Model JSON path")->capture_default_str();
  tr->add_option("--residual-csv", residual_csv, "Write the ADMM residual trace at the final weights");
  tr->add_option("--residual-sample", residual_sample, "Sample index for --residual-csv")->capture_default_str();

  // predict
  std::string pred_model, pred_data, pred_image, pred_out = "predictions";
  double range_lo = -3.0, range_hi = 3.0;
  auto* pr = app.add_subcommand("predict", "Predict labelings with a trained model");
  pr->add_option("--model", pred_model, "Model JSON")->required();
  auto* pd = pr->add_option("--data", pred_data, "Dataset JSON");
  auto* pi = pr->add_option("--image", pred_image, "Single PGM feature image");
  pd->excludes(pi);
  pr->add_option("--range-lo", range_lo, "Feature value of byte 0 for --image")->capture_default_str();
  pr->add_option("--range-hi", range_hi, "Feature value of byte 255 for --image")->capture_default_str();
  pr->add_option("--out-dir", pred_out, "Output directory")->capture_default_str();

  // eval
  std::string eval_model, eval_data, eval_out;
  std::vector<std::string> eval_losses{"hamming", "delta8", "square", "biconvex", "iou"};
  double eval_gamma = 0.5;
  auto* ev = app.add_subcommand("eval", "Evaluate a model under several losses");
  ev->add_option("--model", eval_model, "Model JSON")->required();
  ev->add_option("--data", eval_data, "Dataset JSON")->required();
  ev->add_option("--losses", eval_losses, "Evaluation losses")->delimiter(',')->capture_default_str();
  ev->add_option("--gamma", eval_gamma, "Pairwise weight of the delta8 loss")->check(CLI::NonNegativeNumber)->capture_default_str();
  ev->add_option("--out", eval_out, "Table JSON path");

  // run-experiment
  ExperimentConfig exp_cfg;
  std::string exp_config_path, exp_out = "experiment.json", exp_grid, exp_structure;
  auto* ex = app.add_subcommand("run-experiment", "Cross-evaluate training losses over random splits");
  ex->add_option("--config", exp_config_path, "Experiment config JSON (flags override)");
  ex->add_option("--grid", exp_grid, "Grid size WxH");
  auto* ex_samples = ex->add_option("--samples", exp_cfg.data.samples, "Number of samples");
  ex->add_option("--structure", exp_structure, "Foreground shape family")->check(CLI::IsMember(kStructures));
  auto* ex_noise = ex->add_option("--noise", exp_cfg.data.noise, "Feature noise sigma")->check(CLI::NonNegativeNumber);
  auto* ex_splits = ex->add_option("--splits", exp_cfg.splits, "Number of random splits");
  auto* ex_c = ex->add_option("--c", exp_cfg.train.C, "Regularization constant C")->check(CLI::PositiveNumber);
  auto* ex_rho = ex->add_option("--rho", exp_cfg.train.admm.rho, "ADMM penalty")->check(CLI::PositiveNumber);
  double exp_gamma = 0.5;
  auto* ex_gamma = ex->add_option("--gamma", exp_gamma, "Pairwise weight of the delta8 loss")->check(CLI::NonNegativeNumber);
  std::uint64_t exp_seed = 0;
  auto* ex_seed = ex->add_option("--seed", exp_seed, "Seed for data and splits");
  bool exp_select_c = false;
  ex->add_flag("--select-c", exp_select_c, "Choose C per split by cross-validation");
  ex->add_option("--out", exp_out, "Result JSON path")->capture_default_str();

  // bench
  BenchConfig bench_cfg;
  std::string bench_out = "-";
  auto* be = app.add_subcommand("bench", "Time the square-loss subproblem: sorting solver vs min-norm point");
  be->add_option("--sizes", bench_cfg.sizes, "Problem sizes")->delimiter(',')->capture_default_str();
  be->add_option("--methods", bench_cfg.methods, "specialized, minnorm")->delimiter(',')->capture_default_str();
  be->add_option("--reps", bench_cfg.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber)->capture_default_str();
  be->add_option("--seed", bench_cfg.seed, "Instance seed")->capture_default_str();
  be->add_option("--out", bench_out, "CSV path ('-' for stdout)")->capture_default_str();

  // verify
  std::string verify_grid = "3x2";
  std::uint64_t verify_seed = 0;
  int verify_instances = 50;
  auto* ve = app.add_subcommand("verify", "Check loss properties and solver exactness by enumeration");
  ve->add_option("--grid", verify_grid, "Grid size WxH (2..10 pixels)")->capture_default_str();
  ve->add_option("--seed", verify_seed, "Random seed")->capture_default_str();
  ve->add_option("--instances", verify_instances, "Random subproblems per loss")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      gen_cfg.shape = parse_grid(grid);
      gen_cfg.structure = structure_from_string(structure);
      return cmd_gen(gen_cfg, gen_out, raster_dir);
    }
    if (tr->parsed()) {
      train_cfg.loss = train_loss.config();
      return cmd_train(train_data, train_cfg, select_c, train_out, residual_csv, residual_sample);
    }
    if (pr->parsed()) {
      if (pred_data.empty() && pred_image.empty()) throw std::invalid_argument("predict: give --data or --image");
      return cmd_predict(pred_model, pred_data, pred_image, range_lo, range_hi, pred_out);
    }
    if (ev->parsed()) return cmd_eval(eval_model, eval_data, eval_losses, eval_gamma, eval_out);
    if (ex->parsed()) {
      ExperimentConfig cfg = exp_config_path.empty() ? ExperimentConfig{}
                                                     : read_json_file(exp_config_path).get<ExperimentConfig>();
      if (!exp_grid.empty()) cfg.data.shape = parse_grid(exp_grid);
      if (!exp_structure.empty()) cfg.data.structure = structure_from_string(exp_structure);
      if (*ex_samples) cfg.data.samples = exp_cfg.data.samples;
      if (*ex_noise) cfg.data.noise = exp_cfg.data.noise;
      if (*ex_splits) cfg.splits = exp_cfg.splits;
      if (*ex_c) cfg.train.C = exp_cfg.train.C;
      if (*ex_rho) cfg.train.admm.rho = exp_cfg.train.admm.rho;
      if (*ex_gamma) {
        for (auto& l : cfg.train_losses) l.gamma = exp_gamma;
        for (auto& l : cfg.eval_losses) l.gamma = exp_gamma;
      }
      if (*ex_seed) {
        cfg.seed = exp_seed;
        cfg.data.seed = exp_seed;
      }
      if (exp_select_c) cfg.select_c = true;
      return cmd_experiment(cfg, exp_out);
    }
    if (be->parsed()) return cmd_bench(bench_cfg, bench_out);
    if (ve->parsed()) return cmd_verify(parse_grid(verify_grid), verify_seed, verify_instances);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
