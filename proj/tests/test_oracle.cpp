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

#include <cmath>
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/error.hpp"
#include "mgam/oracle.hpp"
#include "mgam/random.hpp"
#include "mgam/solver.hpp"
#include "mgam/synth.hpp"

using namespace mgam;

namespace {

AugmentedMatrix matrix(std::size_t rows,
                       std::vector<std::vector<std::uint8_t>> cols) {
  std::vector<ColumnMeta> metas;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    metas.push_back(ColumnMeta::threshold(static_cast<std::uint32_t>(c), 0));
  }
  return AugmentedMatrix(rows, std::move(metas), std::move(cols));
}

AugmentedMatrix random_matrix(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<std::vector<std::uint8_t>> cols(p, std::vector<std::uint8_t>(n));
  for (auto& col : cols) {
    for (auto& b : col) b = rng.uniform() < 0.5;
  }
  return matrix(n, std::move(cols));
}

std::vector<int> noisy_labels(Rng& rng, const AugmentedMatrix& x) {
  std::vector<int> y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = (x.at(i, 0) ? 1.0 : -0.5) + (x.at(i, 1) ? -0.7 : 0.2);
    y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-2 * s));
  }
  return y;
}

}  // namespace

TEST_CASE("restricted optimum is stationary and the gradient is right") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_matrix(rng, 40, 4);
    const auto y = noisy_labels(rng, x);
    const std::vector<std::size_t> support{0, 2, 3};
    const auto fitres = oracle::fit_support(x, y, support);
    bool pinned = std::abs(fitres.model.bias) >= kCoefClamp;
    for (const auto& [c, v] : fitres.model.coef) {
      pinned = pinned || std::abs(v) >= kCoefClamp;
    }
    CHECK(fitres.projected_gradient < 1e-10);
    const auto g = oracle::loss_gradient(x, y, support, fitres.model);
    if (!pinned) {
      for (double v : g) CHECK(std::abs(v) < 1e-10);
    }

    // Central differences at a generic point.
    ModelParams m;
    m.bias = rng.normal() * 0.3;
    for (auto c : support) m.set(c, rng.normal() * 0.5);
    const auto ga = oracle::loss_gradient(x, y, support, m);
    const double h = 1e-6;
    for (std::size_t q = 0; q <= support.size(); ++q) {
      ModelParams plus = m, minus = m;
      if (q == 0) {
        plus.bias += h;
        minus.bias -= h;
      } else {
        plus.set(support[q - 1], m.get(support[q - 1]) + h);
        minus.set(support[q - 1], m.get(support[q - 1]) - h);
      }
      const double fd =
          (exp_loss(plus, x, y) - exp_loss(minus, x, y)) / (2 * h);
      CHECK(std::abs(fd - ga[q]) < 1e-5);
    }
  }
}

TEST_CASE("huge lambda gives the intercept") {
  const auto x = matrix(4, {{1, 0, 1, 0}});
  const auto r = oracle::exact_fit(x, std::vector<int>{1, 1, 1, 0}, 1e6, 2);
  CHECK(r.support.empty());
  CHECK(r.model.bias == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("dominating column is chosen") {
  // A splits the rows 3:1 / 1:3; B adds nothing once A is in.
  const std::vector<int> y{1, 1, 1, 1, 0, 0, 0, 0};
  const auto x = matrix(8, {{1, 1, 1, 0, 0, 0, 0, 1}, {0, 1, 0, 1, 0, 1, 0, 1}});
  // Enumerate the four supports by hand.
  double best = 1e300;
  std::vector<std::size_t> best_s;
  const double lambda = 0.05;
  for (const auto& s : std::vector<std::vector<std::size_t>>{
           {}, {0}, {1}, {0, 1}}) {
    const auto r = oracle::fit_support(x, y, s);
    const double obj = r.loss + lambda * static_cast<double>(s.size());
    if (obj < best - 1e-12) {
      best = obj;
      best_s = s;
    }
  }
  const auto r = oracle::exact_fit(x, y, lambda, 2);
  CHECK(r.support == best_s);
  CHECK(r.support == std::vector<std::size_t>{0});
  CHECK(r.objective == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("duplicate columns tie toward the smaller index") {
  const std::vector<int> y{1, 1, 1, 0, 0, 0};
  const std::vector<std::uint8_t> col{1, 1, 0, 0, 0, 1};
  const auto x = matrix(6, {col, col});
  const auto r = oracle::exact_fit(x, y, 0.01, 2);
  CHECK(r.support == std::vector<std::size_t>{0});
}

TEST_CASE("no parameter vector beats the oracle") {
  Rng rng(33);
  for (int trial = 0; trial < 8; ++trial) {
    const auto x = random_matrix(rng, 30, 6);
    const auto y = noisy_labels(rng, x);
    const double lambda = 0.02;
    const auto r = oracle::exact_fit(x, y, lambda, 3);
    CHECK(r.objective ==
          doctest::Approx(objective(r.model, x, y, lambda)).epsilon(1e-12));
    for (int s = 0; s < 300; ++s) {
      ModelParams m;
      m.bias = rng.normal();
      const std::size_t k = rng.below(4);
      for (std::size_t q = 0; q < k; ++q) {
        m.set(rng.below(x.cols()), rng.normal() * 2);
      }
      if (m.support_size() > 3) continue;
      CHECK(objective(m, x, y, lambda) >= r.objective - 1e-12);
    }
    // The heuristic solver never goes below the exact optimum.
    FitConfig cfg;
    cfg.lambda0 = lambda;
    cfg.max_support_size = 3;
    CHECK(fit(x, y, cfg).objective >= r.objective - 1e-8);
  }
}

TEST_CASE("limits are enforced") {
  Rng rng(1);
  const auto wide = random_matrix(rng, 10, 21);
  std::vector<int> y(10, 0);
  y[0] = 1;
  CHECK_THROWS_AS(oracle::exact_fit(wide, y, 0.1, 2), Error);
  const auto narrow = random_matrix(rng, 10, 5);
  CHECK_THROWS_AS(oracle::exact_fit(narrow, y, 0.1, 5), Error);
}

TEST_CASE("refit search escapes a coordinate-wise local optimum") {
  // Small MAR problem whose optimum pairs a clamped indicator with a large
  // bias shift; single-coordinate swaps cannot reach it.
  auto ds = gen_synthetic(26, 3, 1021, "sparse_additive");
  MarSpec spec;
  spec.target_feature = 0;
  spec.conditioning_feature = 1;
  spec.rate = 0.5;
  spec.seed = 1021;
  ds = inject_mar(ds, spec);
  AugmentConfig acfg;
  acfg.n_quantiles = 2;
  const auto x = build_augmented(ds, compute_binning(ds, 2), acfg);
  REQUIRE(x.cols() <= oracle::kMaxColumns);
  const double lambda0 = 0.05;
  const auto exact = oracle::exact_fit(x, ds.labels(), lambda0, 3);

  FitConfig cfg;
  cfg.lambda0 = lambda0;
  cfg.max_support_size = 3;
  cfg.refit_candidates = 0;
  const auto plain = fit(x, ds.labels(), cfg);
  cfg.refit_candidates = 8;
  const auto refit = fit(x, ds.labels(), cfg);
  CHECK(plain.objective > exact.objective * (1 + 1e-3));
  CHECK(refit.objective <= exact.objective * (1 + 1e-6));
  CHECK(refit.objective >= exact.objective - 1e-8);
  CHECK(refit.converged);
}
