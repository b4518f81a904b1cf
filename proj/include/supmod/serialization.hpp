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


// JSON encodings for datasets, models, configs and result tables.

#ifndef SUPMOD_SERIALIZATION_HPP_
#define SUPMOD_SERIALIZATION_HPP_

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "supmod/bench.hpp"
#include "supmod/experiment.hpp"
#include "supmod/ssvm.hpp"
#include "supmod/synthetic.hpp"

namespace supmod {

using Json = nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(Connectivity, {{Connectivity::kFour, "four"},
                                            {Connectivity::kEight, "eight"},
                                            {Connectivity::kCustom, "custom"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Structure, {{Structure::kPolylines, "polylines"},
                                         {Structure::kBars, "bars"},
                                         {Structure::kBlobs, "blobs"}})

inline void to_json(Json& j, LossKind k) { j = to_string(k); }
inline void from_json(const Json& j, LossKind& k) { k = loss_kind_from_string(j.get<std::string>()); }

inline void to_json(Json& j, const GridShape& s) { j = {{"width", s.width}, {"height", s.height}}; }
inline void from_json(const Json& j, GridShape& s) {
  s = GridShape(j.at("width").get<int>(), j.at("height").get<int>());
}

inline void to_json(Json& j, const Labeling& y) {
  j = Json::array();
  for (std::size_t i = 0; i < y.size(); ++i) j.push_back(static_cast<int>(y[i]));
}
inline void from_json(const Json& j, Labeling& y) {
  const auto v = j.get<std::vector<int>>();
  y = Labeling(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) y.set(i, v[i]);
}

inline void to_json(Json& j, const UnaryFeatures& f) {
  j = {{"rows", f.rows()}, {"cols", f.cols()}, {"data", f.data()}};
}
inline void from_json(const Json& j, UnaryFeatures& f) {
  f = UnaryFeatures(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                    j.at("data").get<std::vector<double>>());
}

inline void to_json(Json& j, const WeightVector& w) {
  j = {{"unary", w.unary}, {"pairwise", w.pairwise}};
}
inline void from_json(const Json& j, WeightVector& w) {
  w.unary = j.at("unary").get<std::vector<double>>();
  w.pairwise = j.at("pairwise").get<std::array<double, 3>>();
}

/// Grid edge sets are stored by connectivity; custom ones as explicit pairs.
inline Json edges_to_json(const EdgeSet& edges) {
  if (edges.connectivity() != Connectivity::kCustom) return edges.connectivity();
  Json pairs = Json::array();
  for (const auto& e : edges) pairs.push_back({e.first, e.second});
  return pairs;
}
inline EdgeSet edges_from_json(const Json& j, const GridShape& shape) {
  if (j.is_string()) {
    const auto c = j.get<Connectivity>();
    if (c == Connectivity::kCustom) throw std::invalid_argument("edges: 'custom' needs explicit pairs");
    return EdgeSet::Grid(shape, c);
  }
  std::vector<Edge> edges;
  for (const auto& e : j) edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
  return EdgeSet(shape.pixels(), std::move(edges));
}

inline void to_json(Json& j, const Sample& s) {
  j = {{"shape", s.shape}, {"edges", edges_to_json(s.edges)}, {"features", s.features}, {"y_star", s.y_star}};
}
inline void from_json(const Json& j, Sample& s) {
  s.shape = j.at("shape").get<GridShape>();
  s.edges = edges_from_json(j.at("edges"), s.shape);
  s.features = j.at("features").get<UnaryFeatures>();
  s.y_star = j.at("y_star").get<Labeling>();
  s.validate();
}

inline void to_json(Json& j, const LossConfig& c) {
  j = {{"kind", c.kind}, {"gamma", c.gamma}, {"loss_connectivity", c.loss_connectivity}};
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
}
inline void from_json(const Json& j, LossConfig& c) {
  c = LossConfig{};
  c.kind = j.at("kind").get<LossKind>();
  c.gamma = j.value("gamma", c.gamma);
  c.loss_connectivity = j.value("loss_connectivity", c.loss_connectivity);
  if (j.contains("alpha") && !j.at("alpha").is_null()) c.alpha = j.at("alpha").get<double>();
}

inline void to_json(Json& j, const ADMMParams& p) {
  j = {{"rho", p.rho}, {"eps_abs", p.eps_abs}, {"eps_rel", p.eps_rel}, {"max_iterations", p.max_iterations}};
}
inline void from_json(const Json& j, ADMMParams& p) {
  p = ADMMParams{};
  p.rho = j.value("rho", p.rho);
  p.eps_abs = j.value("eps_abs", p.eps_abs);
  p.eps_rel = j.value("eps_rel", p.eps_rel);
  p.max_iterations = j.value("max_iterations", p.max_iterations);
}

inline void to_json(Json& j, const TrainConfig& c) {
  j = {{"C", c.C},
       {"eps_stop", c.eps_stop},
       {"max_outer_iterations", c.max_outer_iterations},
       {"loss", c.loss},
       {"admm", c.admm},
       {"c_grid", c.c_grid},
       {"qp_gap", c.qp_gap},
       {"max_qp_sweeps", c.max_qp_sweeps}};
}
inline void from_json(const Json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.C = j.value("C", c.C);
  c.eps_stop = j.value("eps_stop", c.eps_stop);
  c.max_outer_iterations = j.value("max_outer_iterations", c.max_outer_iterations);
  if (j.contains("loss")) c.loss = j.at("loss").get<LossConfig>();
  if (j.contains("admm")) c.admm = j.at("admm").get<ADMMParams>();
  c.c_grid = j.value("c_grid", c.c_grid);
  c.qp_gap = j.value("qp_gap", c.qp_gap);
  c.max_qp_sweeps = j.value("max_qp_sweeps", c.max_qp_sweeps);
}

inline void to_json(Json& j, const TrainingTrace& t) {
  j = {{"dual_objective", t.dual_objective},
       {"plane_counts", t.plane_counts},
       {"added_planes", t.added_planes},
       {"outer_iterations", t.outer_iterations},
       {"converged", t.converged},
       {"final_max_excess", t.final_max_excess}};
}
inline void from_json(const Json& j, TrainingTrace& t) {
  t = TrainingTrace{};
  t.dual_objective = j.value("dual_objective", t.dual_objective);
  t.plane_counts = j.value("plane_counts", t.plane_counts);
  t.added_planes = j.value("added_planes", t.added_planes);
  t.outer_iterations = j.value("outer_iterations", 0);
  t.converged = j.value("converged", false);
  t.final_max_excess = j.value("final_max_excess", 0.0);
}

inline void to_json(Json& j, const Model& m) {
  j = {{"w", m.w}, {"C", m.C}, {"loss", m.loss}, {"trace", m.trace}};
}
inline void from_json(const Json& j, Model& m) {
  m = Model{};
  m.w = j.at("w").get<WeightVector>();
  if (!m.w.is_submodular()) throw std::invalid_argument("model: weights violate submodularity");
  m.C = j.value("C", m.C);
  if (j.contains("loss")) m.loss = j.at("loss").get<LossConfig>();
  if (j.contains("trace")) m.trace = j.at("trace").get<TrainingTrace>();
}

inline void to_json(Json& j, const SyntheticConfig& c) {
  j = {{"shape", c.shape},
       {"samples", c.samples},
       {"structure", c.structure},
       {"noise", c.noise},
       {"noise_channels", c.noise_channels},
       {"distance_cap", c.distance_cap},
       {"model_connectivity", c.model_connectivity},
       {"seed", c.seed}};
}
inline void from_json(const Json& j, SyntheticConfig& c) {
  c = SyntheticConfig{};
  if (j.contains("shape")) c.shape = j.at("shape").get<GridShape>();
  c.samples = j.value("samples", c.samples);
  c.structure = j.value("structure", c.structure);
  c.noise = j.value("noise", c.noise);
  c.noise_channels = j.value("noise_channels", c.noise_channels);
  c.distance_cap = j.value("distance_cap", c.distance_cap);
  c.model_connectivity = j.value("model_connectivity", c.model_connectivity);
  c.seed = j.value("seed", c.seed);
}

inline void to_json(Json& j, const ExperimentConfig& c) {
  j = {{"data", c.data},
       {"train_losses", c.train_losses},
       {"eval_losses", c.eval_losses},
       {"splits", c.splits},
       {"test_fraction", c.test_fraction},
       {"train", c.train},
       {"select_c", c.select_c},
       {"seed", c.seed}};
}
inline void from_json(const Json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  if (j.contains("data")) c.data = j.at("data").get<SyntheticConfig>();
  c.train_losses = j.value("train_losses", c.train_losses);
  c.eval_losses = j.value("eval_losses", c.eval_losses);
  c.splits = j.value("splits", c.splits);
  c.test_fraction = j.value("test_fraction", c.test_fraction);
  if (j.contains("train")) c.train = j.at("train").get<TrainConfig>();
  c.select_c = j.value("select_c", c.select_c);
  c.seed = j.value("seed", c.seed);
}

inline void to_json(Json& j, const LossSummary& s) {
  j = {{"loss", s.name}, {"mean", s.mean}, {"standard_error", s.standard_error}};
}
inline void from_json(const Json& j, LossSummary& s) {
  s.name = j.at("loss").get<std::string>();
  s.mean = j.at("mean").get<double>();
  s.standard_error = j.at("standard_error").get<double>();
}

inline void to_json(Json& j, const SplitResult& s) {
  j = {{"seed", s.seed}, {"train_indices", s.train_indices}, {"test_indices", s.test_indices},
       {"C", s.C},       {"table", s.table},                 {"train_ms", s.train_ms}};
}
inline void from_json(const Json& j, SplitResult& s) {
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
  s.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
  s.C = j.at("C").get<std::vector<double>>();
  s.table = j.at("table").get<std::vector<std::vector<LossSummary>>>();
  s.train_ms = j.value("train_ms", std::vector<double>{});
}

inline void to_json(Json& j, const ExperimentResult& r) {
  j = {{"config", r.config}, {"splits", r.splits}, {"table", r.table}};
}
inline void from_json(const Json& j, ExperimentResult& r) {
  r.config = j.at("config").get<ExperimentConfig>();
  r.splits = j.at("splits").get<std::vector<SplitResult>>();
  r.table = j.at("table").get<std::vector<std::vector<LossSummary>>>();
}

inline Json dataset_to_json(const std::vector<Sample>& samples) { return {{"samples", samples}}; }
inline std::vector<Sample> dataset_from_json(const Json& j) {
  return j.at("samples").get<std::vector<Sample>>();
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot create '" + path + "'");
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace supmod

#endif  // SUPMOD_SERIALIZATION_HPP_
