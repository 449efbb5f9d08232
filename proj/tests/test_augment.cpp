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

#include <algorithm>
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/error.hpp"
#include "mgam/random.hpp"

using namespace mgam;

namespace {

Dataset column_of(const std::vector<double>& values) {
  Dataset ds({"x"}, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) ds.set_value(i, 0, values[i]);
  return ds;
}

// Independent reading of the quantile rule: level k/q picks sorted index
// floor(k (m - 1) / q); dedup; drop anything >= max.
std::vector<double> reference_thresholds(std::vector<double> v, int q) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  if (v.empty()) return out;
  for (int k = 1; k <= q; ++k) {
    const double t = v[static_cast<std::size_t>(k) * (v.size() - 1) /
                       static_cast<std::size_t>(q)];
    if (t < v.back() && (out.empty() || out.back() != t)) out.push_back(t);
  }
  return out;
}

AugmentConfig raw_config(bool indicators, bool interactions) {
  AugmentConfig cfg;
  cfg.use_indicators = indicators;
  cfg.use_interactions = interactions;
  cfg.dedup = false;
  return cfg;
}

// Random dataset with d features, c reasons and a given number of distinct
// values per feature.
Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d, Reason c) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  Dataset ds(names, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (c > 0 && rng.uniform() < 0.25) {
        ds.set_absent(i, j, static_cast<Reason>(1 + rng.below(c)));
      } else {
        ds.set_value(i, j, static_cast<double>(rng.below(12)));
      }
    }
    ds.set_label(i, static_cast<int>(rng.below(2)));
  }
  ds.set_n_reasons(c);
  return ds;
}

}  // namespace

TEST_CASE("quantile thresholds on 1..8") {
  const auto bins = compute_binning(column_of({8, 1, 7, 2, 6, 3, 5, 4}), 8);
  CHECK(bins.thresholds[0] == reference_thresholds({1, 2, 3, 4, 5, 6, 7, 8}, 8));
  CHECK(bins.thresholds[0] == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("two values give one threshold") {
  const auto bins = compute_binning(column_of({1, 2}), 8);
  CHECK(bins.thresholds[0] == std::vector<double>{1});
}

TEST_CASE("constant and fully missing features give no thresholds") {
  CHECK(compute_binning(column_of({5, 5, 5, 5}), 8).thresholds[0].empty());
  Dataset ds({"x"}, 2);
  ds.set_absent(0, 0, 1);
  ds.set_absent(1, 0, 1);
  ds.set_n_reasons(1);
  CHECK(compute_binning(ds, 8).thresholds[0].empty());
  CHECK_THROWS_AS(compute_binning(ds, 0), Error);
}

TEST_CASE("quantiles ignore absent cells and match the reference rule") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto ds = random_dataset(rng, 1 + rng.below(40), 1, 1);
    std::vector<double> present;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.present(i, 0)) present.push_back(ds.value(i, 0));
    }
    const int q = 1 + static_cast<int>(rng.below(10));
    CHECK(compute_binning(ds, q).thresholds[0] ==
          reference_thresholds(present, q));
  }
}

TEST_CASE("column count examples") {
  const std::size_t lens2[] = {2, 2};
  AugmentConfig full = raw_config(true, true);
  CHECK(column_count(2, lens2, 1, full) == 10);
  const std::size_t lens3[] = {8, 8, 8};
  CHECK(column_count(3, lens3, 2, raw_config(true, false)) == 30);
  CHECK(column_count(3, lens3, 2, raw_config(false, false)) == 24);
}

TEST_CASE("build_augmented matches column_count on a sweep") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng.below(4);
    const auto c = static_cast<Reason>(rng.below(3));
    const auto ds = random_dataset(rng, 30, d, c);
    const auto bins = compute_binning(ds, 1 + static_cast<int>(rng.below(8)));
    for (bool ind : {false, true}) {
      for (bool inter : {false, true}) {
        for (bool overall : {false, true}) {
          auto cfg = raw_config(ind, inter);
          cfg.overall = overall;
          const auto x = build_augmented(ds, bins, cfg);
          const auto lens = bins.lengths();
          CHECK(x.cols() == column_count(d, lens, c, cfg));
          CHECK(x.cols() == column_layout(bins, c, cfg).size());
        }
      }
    }
  }
}

TEST_CASE("emission order for a small layout") {
  BinningSpec bins{{{0.0, 1.0}, {5.0}}};
  const auto metas = column_layout(bins, 1, raw_config(true, true));
  std::vector<std::string> tokens;
  for (const auto& m : metas) tokens.push_back(m.token());
  CHECK(tokens == std::vector<std::string>{
                      "THR_0_0", "THR_0_1", "THR_1_0", "MI_0_1", "MI_1_1",
                      "INT_0_1_0_1", "INT_1_0_0_1", "INT_1_0_1_1"});
  auto cfg = raw_config(true, true);
  cfg.specific = false;
  cfg.overall = true;
  tokens.clear();
  for (const auto& m : column_layout(bins, 1, cfg)) tokens.push_back(m.token());
  CHECK(tokens == std::vector<std::string>{"THR_0_0", "THR_0_1", "THR_1_0",
                                           "MIO_0", "MIO_1", "INTO_0_1_0",
                                           "INTO_1_0_0", "INTO_1_0_1"});
}

TEST_CASE("column semantics brute force") {
  Rng rng(5);
  const auto ds = random_dataset(rng, 60, 3, 2);
  const auto bins = compute_binning(ds, 4);
  auto cfg = raw_config(true, true);
  cfg.overall = true;
  const auto x = build_augmented(ds, bins, cfg);
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto& m = x.meta(c);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      auto thr = [&](std::uint32_t f, std::uint32_t k) {
        return ds.present(i, f) && ds.value(i, f) <= bins.thresholds[f][k];
      };
      bool expect = false;
      switch (m.kind) {
        case ColumnKind::kThreshold: expect = thr(m.j, m.k); break;
        case ColumnKind::kMissing: expect = ds.reason(i, m.j) == m.m; break;
        case ColumnKind::kMissingOverall: expect = !ds.present(i, m.j); break;
        case ColumnKind::kInteraction:
          expect = ds.reason(i, m.j) == m.m && thr(m.jp, m.k);
          break;
        case ColumnKind::kInteractionOverall:
          expect = !ds.present(i, m.j) && thr(m.jp, m.k);
          break;
      }
      REQUIRE(x.at(i, c) == expect);
    }
  }
}

TEST_CASE("threshold bits form a suffix of ones for present values") {
  Rng rng(8);
  const auto ds = random_dataset(rng, 50, 2, 1);
  const auto bins = compute_binning(ds, 8);
  const auto x = build_augmented(ds, bins, raw_config(false, false));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      bool seen_one = false;
      for (std::size_t k = 0; k < bins.thresholds[j].size(); ++k, ++c) {
        const bool bit = x.at(i, c);
        if (seen_one) CHECK(bit);
        seen_one = seen_one || bit;
        if (!ds.present(i, j)) CHECK_FALSE(bit);
      }
    }
  }
}

TEST_CASE("interaction on the first threshold") {
  Dataset ds({"a", "b"}, 2);
  ds.set_absent(0, 0, 1);
  ds.set_value(0, 1, 1.0);
  ds.set_value(1, 0, 0.0);
  ds.set_value(1, 1, 2.0);
  ds.set_n_reasons(1);
  BinningSpec bins{{{0.5}, {1.0}}};
  const auto col = ColumnMeta::interaction(0, 1, 0, 1);
  CHECK(column_value(col, bins, ds, 0));
  CHECK_FALSE(column_value(col, bins, ds, 1));
}

TEST_CASE("no missingness: indicator columns are removed by dedup") {
  Rng rng(2);
  auto ds = random_dataset(rng, 40, 3, 0);
  ds.set_n_reasons(1);  // declared but unused reason
  const auto bins = compute_binning(ds, 4);
  AugmentConfig cfg;
  const auto x = build_augmented(ds, bins, cfg);
  for (const auto& m : x.metas()) CHECK(m.kind == ColumnKind::kThreshold);
  auto raw = cfg;
  raw.dedup = false;
  const auto full = build_augmented(ds, bins, raw);
  CHECK(full.cols() > x.cols());
  for (const auto& alias : x.aliases()) {
    CHECK(alias.removed.kind != ColumnKind::kThreshold);
    CHECK_FALSE(alias.representative.has_value());
  }
}

TEST_CASE("dedup keeps the earliest column and records aliases") {
  Dataset ds({"a", "b"}, 4);
  const double a[] = {1, 2, 3, 4};
  for (std::size_t i = 0; i < 4; ++i) {
    ds.set_value(i, 0, a[i]);
    ds.set_value(i, 1, a[i] * 10);
  }
  BinningSpec bins{{{2.0}, {20.0}}};
  AugmentConfig cfg;
  cfg.use_indicators = false;
  cfg.use_interactions = false;
  const auto x = build_augmented(ds, bins, cfg);
  REQUIRE(x.cols() == 1);
  CHECK(x.meta(0) == ColumnMeta::threshold(0, 0));
  REQUIRE(x.aliases().size() == 1);
  CHECK(x.aliases()[0].removed == ColumnMeta::threshold(1, 0));
  CHECK(x.aliases()[0].representative == std::optional<std::size_t>(0));
}

TEST_CASE("tokens round trip and csv dump") {
  for (const auto& m :
       {ColumnMeta::threshold(3, 1), ColumnMeta::missing(2, 4),
        ColumnMeta::missing_overall(0), ColumnMeta::interaction(1, 2, 3, 4),
        ColumnMeta::interaction_overall(5, 0, 7)}) {
    CHECK(ColumnMeta::from_token(m.token()) == m);
    CHECK(kind_from_name(kind_name(m.kind)) == m.kind);
  }
  CHECK_THROWS_AS(ColumnMeta::from_token("THR_1"), Error);
  CHECK_THROWS_AS(ColumnMeta::from_token("XYZ_1_2"), Error);
  const auto ds = column_of({1, 2, 3});
  const auto x = build_augmented(ds, compute_binning(ds, 2), AugmentConfig{});
  CHECK(x.to_csv() == "THR_0_0\n1\n1\n0\n");
}

TEST_CASE("config validation") {
  AugmentConfig cfg;
  cfg.specific = false;
  cfg.overall = false;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.use_indicators = false;
  cfg.use_interactions = false;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_quantiles = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("build_columns rejects columns the binning cannot place") {
  const auto ds = column_of({1, 2, 3});
  const auto bins = compute_binning(ds, 2);
  CHECK_THROWS_AS(build_columns(ds, bins, {ColumnMeta::threshold(0, 5)}),
                  Error);
  CHECK_THROWS_AS(build_columns(ds, bins, {ColumnMeta::threshold(1, 0)}),
                  Error);
}
