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
#include <map>
#include <random>

#include "mgam/error.hpp"
#include "mgam/theory.hpp"

using namespace mgam;
using namespace mgam::theory;

namespace {

Rational q(std::int64_t n, std::int64_t d) { return make_rational(n, d); }

// Bayes accuracy of (M, X2) by plain double enumeration.
double dgp1_missing_accuracy(double k1, double k2) {
  std::map<std::pair<int, int>, std::pair<double, double>> cell;  // (m,x2)
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int e1 = 0; e1 < 2; ++e1)
        for (int e2 = 0; e2 < 2; ++e2) {
          const double p = 0.25 * (e1 ? k1 : 1 - k1) * (e2 ? k2 : 1 - k2);
          const int y = std::abs(x1 * x2 - e1);
          const int m = std::abs(y - e2);
          auto& c = cell[{m, x2}];
          (y ? c.second : c.first) += p;
        }
  double acc = 0;
  for (const auto& [k, v] : cell) acc += std::max(v.first, v.second);
  return acc;
}

ModelParams gam_of(double bias, const std::vector<double>& beta) {
  ModelParams p;
  p.bias = bias;
  for (std::size_t j = 0; j < beta.size(); ++j) p.set(j, beta[j]);
  return p;
}

}  // namespace

TEST_CASE("first construction at k1 = 1/4, k2 = 1/10") {
  const auto r = dgp1_exact({q(1, 4), q(1, 10)});
  CHECK(r.total_mass == Rational(1));
  CHECK(r.acc_imputed == q(3, 4));
  CHECK(r.acc_missing >= q(9, 10));
  CHECK(to_double(r.acc_missing) ==
        doctest::Approx(dgp1_missing_accuracy(0.25, 0.1)).epsilon(1e-14));
}

TEST_CASE("first construction over a grid") {
  for (int a = 1; a < 50; a += 3) {
    for (int b = 1; b < a; b += 2) {
      const Rational k1 = q(a, 100);
      const Rational k2 = q(b, 100);
      const auto r = dgp1_exact({k1, k2});
      CHECK(r.total_mass == Rational(1));
      CHECK(r.acc_imputed == Rational(1) - k1);
      CHECK(r.acc_missing >= Rational(1) - k2);
      CHECK(r.acc_missing > r.acc_imputed);
      CHECK(to_double(r.acc_missing) ==
            doctest::Approx(dgp1_missing_accuracy(a / 100.0, b / 100.0))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("first construction parameter validation") {
  CHECK_THROWS_AS(dgp1_exact({q(1, 10), q(1, 4)}), Error);
  CHECK_THROWS_AS(dgp1_exact({q(1, 2), q(1, 4)}), Error);
  CHECK_THROWS_AS(dgp1_exact({q(1, 4), q(0, 1)}), Error);
  CHECK_THROWS_AS(dgp1_exact({q(1, 4), q(1, 4)}), Error);
}

TEST_CASE("first construction agrees with simulation") {
  const double k1 = 0.25, k2 = 0.1;
  std::mt19937_64 gen(77);
  std::bernoulli_distribution half(0.5), e1d(k1), e2d(k2);
  const int n = 1000000;
  // Empirical Bayes rule fitted on the same draws; bias is O(1/n).
  std::map<std::pair<int, int>, std::pair<long, long>> cell;
  long imputed_right = 0;
  for (int i = 0; i < n; ++i) {
    const int x1 = half(gen), x2 = half(gen);
    const int y = std::abs(x1 * x2 - int(e1d(gen)));
    const int m = std::abs(y - int(e2d(gen)));
    if ((x1 * x2) == y) ++imputed_right;
    auto& c = cell[{m, x2}];
    (y ? c.second : c.first) += 1;
  }
  long missing_right = 0;
  for (const auto& [k, v] : cell) missing_right += std::max(v.first, v.second);
  const auto r = dgp1_exact({q(1, 4), q(1, 10)});
  const double sd_imp = std::sqrt(0.75 * 0.25 / n);
  const double p_miss = to_double(r.acc_missing);
  const double sd_miss = std::sqrt(p_miss * (1 - p_miss) / n);
  CHECK(std::abs(double(imputed_right) / n - 0.75) <= 4 * sd_imp);
  CHECK(std::abs(double(missing_right) / n - p_miss) <= 4 * sd_miss);
}

TEST_CASE("second construction exact values") {
  const auto r = dgp2_exact();
  CHECK(r.total_mass == Rational(1));
  CHECK(r.loss_delta == q(1, 528));
  CHECK(r.gain_delta == q(15, 2112));
  CHECK(r.net == q(11, 2112));
  CHECK(r.net == r.gain_delta - r.loss_delta);
  CHECK(r.acc_missing - r.acc_imputed == r.net);
  // P(Y=1 | Z=1, X3=0) by hand: (11/12)(1/11) / ((11/12)(1/11) + (1/12)(10/11)).
  const Rational num = q(11, 12) * q(1, 11);
  const Rational den = num + q(1, 12) * q(10, 11);
  CHECK(r.posterior_z1_x3_0 == num / den);
  CHECK(r.posterior_z1_x3_0 == q(11, 21));
  CHECK(r.acc_imputed == q(11, 12));
}

TEST_CASE("second construction agrees with simulation") {
  std::mt19937_64 gen(5);
  std::bernoulli_distribution half(0.5), e1d(1.0 / 12), e2d(0.25),
      e3d(1.0 / 11);
  const int n = 1000000;
  long loss = 0, gain = 0;
  for (int i = 0; i < n; ++i) {
    const int z = half(gen);
    const int y = std::abs(z - int(e1d(gen)));
    const int x3 = std::abs(y - int(e3d(gen)));
    const bool mixed = half(gen);
    const int e2 = e2d(gen);
    const int m = mixed ? std::abs(y - e2) : 0;
    const int wrong_imp = z != y;
    const int wrong_miss = (m ? x3 : z * x3) != y;
    if (m) loss += wrong_miss - wrong_imp;
    else gain += wrong_imp - wrong_miss;
  }
  const double sd = std::sqrt(0.05 / n);  // generous per-indicator variance
  CHECK(std::abs(double(loss) / n - 1.0 / 528) <= 4 * sd);
  CHECK(std::abs(double(gain) / n - 15.0 / 2112) <= 4 * sd);
}

TEST_CASE("constant imputer gives a plain indicator") {
  const auto imp = make_imputer(1, {0.0, 0.0, 0.0}, 0.5);
  const auto gam = gam_of(0.3, {1.0, 2.0, -1.0});
  const auto mgam = construct_mgam_from_imputer(gam, imp);
  CHECK(mgam.get(3) == 1.0);  // beta_b / 2
  CHECK(mgam.get(4) == 0.0);
  CHECK(mgam.get(5) == 0.0);
  CHECK(verify_equivalence(gam, imp, mgam, 3) <= 1e-12);
}

TEST_CASE("zero coefficient on the imputed feature adds nothing") {
  const auto imp = make_imputer(0, {0.0, 1.5, -0.5, 2.0}, 0.3);
  const auto gam = gam_of(-0.2, {0.0, 1.0, 1.0, 1.0});
  const auto mgam = construct_mgam_from_imputer(gam, imp);
  for (std::size_t c = 4; c < 4 + 1 + 3; ++c) CHECK(mgam.get(c) == 0.0);
  CHECK(verify_equivalence(gam, imp, mgam, 4) <= 1e-12);
}

TEST_CASE("imputer construction matches the expectation") {
  std::mt19937_64 gen(314);
  std::normal_distribution<double> nd(0.0, 1.5);
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 3 + t % 5;
    const std::size_t b = t % d;
    std::vector<double> c(d), beta(d);
    for (std::size_t j = 0; j < d; ++j) {
      c[j] = nd(gen);
      beta[j] = nd(gen);
    }
    const auto imp = make_imputer(b, c, ud(gen));
    const auto gam = gam_of(nd(gen), beta);
    const auto mgam = construct_mgam_from_imputer(gam, imp);
    CHECK(verify_equivalence(gam, imp, mgam, d) <= 1e-10);

    // Present rows are scored by the GAM columns alone.
    const auto layout = boolean_mgam_layout(d, b);
    std::vector<std::uint8_t> row(layout.size(), 0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      for (std::size_t j = 0; j < d; ++j) row[j] = (mask >> j) & 1U;
      CHECK(predict_score(mgam, layout, row) == predict_score(gam, layout, row));
    }

    auto broken = mgam;
    broken.set(d, mgam.get(d) + 0.01);
    CHECK(verify_equivalence(gam, imp, broken, d) >= 0.01 - 1e-12);
  }
}

TEST_CASE("imputer validation") {
  ImputerSpec degenerate;
  degenerate.b = 0;
  degenerate.coef = {0.0, 1.0};
  degenerate.score_min = degenerate.score_max = 0.0;
  CHECK_THROWS_AS(degenerate.validate(), Error);
  CHECK_THROWS_AS(make_imputer(0, {0.0, 1.0}, 0.0), Error);
  CHECK_THROWS_AS(make_imputer(0, {0.0, 1.0}, 1.0), Error);
  CHECK_THROWS_AS(make_imputer(2, {0.0, 1.0}, 0.5), Error);
  CHECK_THROWS_AS(boolean_mgam_layout(2, 2), Error);

  const std::size_t d = kMaxEnumerationFeatures + 1;
  const auto imp = make_imputer(0, std::vector<double>(d, 1.0), 0.5);
  const auto gam = gam_of(0.0, std::vector<double>(d, 0.1));
  try {
    verify_equivalence(gam, imp, gam, d);
    FAIL("expected a limit error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kLimit);
  }
  ModelParams outside;
  outside.set(d + 3, 1.0);
  CHECK_THROWS_AS(construct_mgam_from_imputer(outside, imp), Error);
}

TEST_CASE("report passes and shows exact fractions") {
  const auto report = run_theory_checks(2024, 20);
  CHECK(report.all_passed());
  const auto text = report.to_text();
  CHECK(text.find("1/528") != std::string::npos);
  CHECK(text.find("15/2112") != std::string::npos);
  CHECK(text.find("11/2112") != std::string::npos);
}
