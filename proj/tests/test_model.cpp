/*
 * Copyright 2026 The M-GAM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <random>

#include "mgam/augment.hpp"
#include "mgam/error.hpp"
#include "mgam/eval.hpp"
#include "mgam/model.hpp"
#include "mgam/synth.hpp"

using namespace mgam;

namespace {

// Data with two missingness reasons on x0 and one on x2.
Dataset mixed_data(std::size_t n, std::uint64_t seed) {
  Dataset ds = gen_synthetic(n, 4, seed, "sparse_additive");
  std::mt19937_64 gen(seed + 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(gen);
    if (a < 0.15) ds.set_absent(i, 0, 1);
    else if (a < 0.25) ds.set_absent(i, 0, 2);
    if (u(gen) < 0.2) ds.set_absent(i, 2, 1);
  }
  ds.set_n_reasons(2);
  return ds;
}

// Column semantics written out by hand.
bool reason_hit(const Dataset& ds, std::size_t i, std::size_t j, Reason m,
                bool overall) {
  const Reason r = ds.reason(i, j);
  if (r == 0) return false;
  if (overall) return true;
  return r == m || (m == ds.overall_reason() && m != 0);
}

bool at_or_below(const Dataset& ds, const BinningSpec& b, std::size_t i,
                 std::size_t j, std::size_t k) {
  return ds.present(i, j) && ds.value(i, j) <= b.thresholds[j][k];
}

double hand_score(const Model& model, const Dataset& ds, std::size_t i) {
  double s = model.bias;
  for (const auto& t : model.terms) {
    const auto& m = t.meta;
    bool on = false;
    switch (m.kind) {
      case ColumnKind::kThreshold:
        on = at_or_below(ds, model.bins, i, m.j, m.k);
        break;
      case ColumnKind::kMissing:
        on = reason_hit(ds, i, m.j, m.m, false);
        break;
      case ColumnKind::kMissingOverall:
        on = reason_hit(ds, i, m.j, 0, true);
        break;
      case ColumnKind::kInteraction:
        on = reason_hit(ds, i, m.j, m.m, false) &&
             at_or_below(ds, model.bins, i, m.jp, m.k);
        break;
      case ColumnKind::kInteractionOverall:
        on = reason_hit(ds, i, m.j, 0, true) &&
             at_or_below(ds, model.bins, i, m.jp, m.k);
        break;
    }
    if (on) s += t.value;
  }
  return s;
}

// Every column of the full layout gets a random coefficient.
Model dense_model(const Dataset& ds, const AugmentConfig& cfg,
                  std::uint64_t seed) {
  Model model;
  model.bins = compute_binning(ds, cfg.n_quantiles);
  model.feature_names = ds.feature_names();
  model.n_reasons = ds.n_reasons();
  model.overall_reason = ds.overall_reason();
  model.lambda0 = 0.01;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  model.bias = nd(gen);
  for (const auto& meta : column_layout(model.bins, ds.n_reasons(), cfg)) {
    model.terms.push_back({meta, nd(gen)});
  }
  return model;
}

bool same_bits(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

TEST_CASE("scores follow the column definitions") {
  const auto ds = mixed_data(300, 1);
  AugmentConfig cfg;
  cfg.overall = true;
  const auto model = dense_model(ds, cfg, 2);
  const auto s = model.scores(ds);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    CHECK(s[i] == doctest::Approx(hand_score(model, ds, i)).epsilon(1e-12));
  }
}

TEST_CASE("JSON round trip is byte identical") {
  const auto ds = mixed_data(200, 3);
  AugmentConfig cfg;
  cfg.overall = true;
  const auto model = dense_model(ds, cfg, 4);
  const auto text = model.to_json();
  const auto back = Model::from_json(text);
  CHECK(back.to_json() == text);
  CHECK(back.scores(ds) == model.scores(ds));
  CHECK(text.find("\"label_rule\": \"score>=0->1\"") != std::string::npos);
}

TEST_CASE("shape functions reproduce scores exactly") {
  for (int overall = 0; overall < 2; ++overall) {
    const auto ds = mixed_data(500, 10 + overall);
    AugmentConfig cfg;
    cfg.overall = overall;
    const auto model =
        Model::from_json(dense_model(ds, cfg, 20 + overall).to_json());
    const auto shapes = ShapeSet::from_json(export_shapes(model).to_json());
    const auto s = model.scores(ds);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      REQUIRE(same_bits(shapes.evaluate(ds, i), s[i]));
    }
  }
}

TEST_CASE("fitted models reproduce through their shapes") {
  const auto ds = mixed_data(800, 5);
  PipelineConfig cfg;
  const std::vector<double> grid{0.05, 0.01, 0.002};
  for (const auto& model : fit_models(ds, grid, cfg)) {
    const auto shapes = export_shapes(model);
    const auto s = model.scores(ds);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      REQUIRE(same_bits(shapes.evaluate(ds, i), s[i]));
    }
  }
}

TEST_CASE("threshold-only models have no adjustments") {
  const auto ds = mixed_data(200, 6);
  AugmentConfig cfg;
  cfg.use_indicators = false;
  cfg.use_interactions = false;
  const auto shapes = export_shapes(dense_model(ds, cfg, 1));
  REQUIRE(shapes.shapes.size() == ds.d());
  for (const auto& sh : shapes.shapes) {
    CHECK(sh.adjustments.empty());
    CHECK(sh.missing.empty());
  }
}

TEST_CASE("step curves hold suffix sums") {
  const auto ds = mixed_data(200, 7);
  Model model;
  model.bins = compute_binning(ds, 4);
  model.feature_names = ds.feature_names();
  model.n_reasons = ds.n_reasons();
  const auto& t = model.bins.thresholds[1];
  REQUIRE(t.size() >= 3);
  model.terms.push_back({ColumnMeta::threshold(1, 0), 1.0});
  model.terms.push_back({ColumnMeta::threshold(1, 2), 10.0});
  const auto shapes = export_shapes(model);
  const auto& base = shapes.shapes[1].base;
  CHECK(base.at(t[0]) == 11.0);
  CHECK(base.at(t[1]) == 10.0);
  CHECK(base.at(t[2]) == 10.0);
  CHECK(base.at(t.back() + 1.0) == 0.0);
  CHECK(shapes.shapes[0].base.at(0.0) == 0.0);
}

TEST_CASE("adjustment and offset labels") {
  Dataset ds = mixed_data(100, 8);
  Model model;
  model.bins = compute_binning(ds, 3);
  model.feature_names = {"x0", "x1", "x2", "x3"};
  model.n_reasons = 2;
  model.terms.push_back({ColumnMeta::interaction(3, 1, 0, 1), 0.5});
  model.terms.push_back({ColumnMeta::interaction_overall(0, 1, 0), 0.25});
  model.terms.push_back({ColumnMeta::missing(0, 2), -1.0});
  model.bins.thresholds[3] = {0.0};
  const auto shapes = export_shapes(model);
  const auto& adj = shapes.shapes[1].adjustments;
  REQUIRE(adj.size() == 2);
  std::vector<std::string> labels{adj[0].label, adj[1].label};
  std::sort(labels.begin(), labels.end());
  CHECK(labels[0] == "when x0 missing (any reason)");
  CHECK(labels[1] == "when x3 missing (reason 1)");
  REQUIRE(shapes.shapes[0].missing.size() == 1);
  CHECK(shapes.shapes[0].missing[0].reason == 2);
  CHECK(shapes.shapes[0].missing[0].value == -1.0);
  const auto csv = shapes.to_csv();
  CHECK(csv.rfind("feature,name,curve,source,reason,threshold,value\n", 0) == 0);
  CHECK(csv.find("adjustment") != std::string::npos);
}

TEST_CASE("terms that do not fit the binning are rejected") {
  const auto ds = mixed_data(100, 9);
  Model model;
  model.bins = compute_binning(ds, 3);
  model.feature_names = ds.feature_names();
  model.terms.push_back({ColumnMeta::threshold(1, 50), 1.0});
  try {
    export_shapes(model);
    FAIL("expected a mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMismatch);
    CHECK(std::string(e.what()).find("THR_1_50") != std::string::npos);
  }
  model.terms = {{ColumnMeta::missing(9, 1), 1.0}};
  CHECK_THROWS_AS(export_shapes(model), Error);
}

TEST_CASE("bad model documents") {
  CHECK_THROWS_AS(Model::from_json("{"), Error);
  CHECK_THROWS_AS(Model::from_json(R"({"bias": 0})"), Error);
  const auto ds = mixed_data(50, 2);
  AugmentConfig cfg;
  auto model = dense_model(ds, cfg, 3);
  model.feature_names[0] = "renamed";
  CHECK_THROWS_AS(model.scores(ds), Error);
}
