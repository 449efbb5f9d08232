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

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/solver.hpp"

// Exact checks of the missingness-as-a-value constructions, and the
// constructor that turns an affine imputer plus a boolean GAM into an
// equivalent missingness-aware GAM.
namespace mgam::theory {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

Rational make_rational(std::int64_t num, std::int64_t den);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

// Y = |X1 X2 - e1|, M = |Y - e2| marks X1 missing, X1, X2 ~ Bern(1/2),
// e1 ~ Bern(k1), e2 ~ Bern(k2), 0 < k2 < k1 < 1/2.
struct Dgp1Params {
  Rational k1;
  Rational k2;

  void validate() const;
};

struct Dgp1Result {
  Rational acc_imputed;  // Bayes rule on perfectly imputed (X1, X2)
  Rational acc_missing;  // Bayes rule on (M, X2)
  Rational total_mass;   // sum of the enumerated joint; exactly 1
};

Dgp1Result dgp1_exact(const Dgp1Params& params);

// Second construction: Z = X1 X2 ~ Bern(1/2), Y = |Z - e1| with
// e1 ~ Bern(1/12), X3 = |Y - e3| with e3 ~ Bern(1/11), and M = |Y - e2|
// (e2 ~ Bern(1/4)) with probability 1/2, else 0. Compares predicting Z with
// predicting X3 when M = 1 and Z X3 when M = 0.
struct Dgp2Result {
  Rational loss_delta;  // extra errors on M = 1 rows
  Rational gain_delta;  // net errors fixed on M = 0 rows
  Rational net;         // gain_delta - loss_delta
  Rational acc_imputed;
  Rational acc_missing;
  // P(Y = 1 | Z = 1, X3 = 0); the imputed Bayes rule still follows Z.
  Rational posterior_z1_x3_0;
  Rational total_mass;
};

Dgp2Result dgp2_exact();

// Boolean-feature GAM g(x) = bias + sum_j beta_j x_j, with x_b sometimes
// missing. Column layout of the matching M-GAM:
//   [0, D)            x_j (x_b reads 0 when missing)
//   D                 1[x_b missing]
//   D + 1 + q         1[x_b missing and x_{other[q]} = 1], other = j != b
std::vector<ColumnMeta> boolean_mgam_layout(std::size_t d, std::size_t b);

// P(x_b = 1 | x_-b) = a (s - s_min) / (s_max - s_min) + offset, with
// s = sum_{j != b} C_j x_j. `coef` has one entry per feature; coef[b] is
// ignored (treated as 0).
struct ImputerSpec {
  std::size_t b = 0;
  std::vector<double> coef;
  double a = 0.5;
  double offset = 0.5;
  double score_min = 0.0;
  double score_max = 0.0;

  void validate() const;
  // P(x_b = 1 | x) for a boolean input (x_b ignored).
  double probability(const std::vector<std::uint8_t>& x) const;
};

// Fills score_min / score_max as the extremes of s over {0,1}^(d-1).
ImputerSpec make_imputer(std::size_t b, std::vector<double> coef, double a);

// `gam` has coefficients on columns [0, d) of boolean_mgam_layout.
ModelParams construct_mgam_from_imputer(const ModelParams& gam,
                                        const ImputerSpec& imp);

// Max |mgam score - expected GAM score| over every boolean input, both with
// x_b present (compared with g(x)) and missing (compared with the
// imputation expectation). d is the number of boolean features.
double verify_equivalence(const ModelParams& gam, const ImputerSpec& imp,
                          const ModelParams& mgam, std::size_t d);

inline constexpr std::size_t kMaxEnumerationFeatures = 16;

// Outcome of one named check in the theory report.
struct Claim {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct TheoryReport {
  std::vector<Claim> claims;
  bool all_passed() const;
  std::string to_text() const;
};

// Runs every exact check (grid sweep of the first construction, the second
// construction, and randomized imputer equivalence).
TheoryReport run_theory_checks(std::uint64_t seed = 2024,
                               std::size_t imputer_trials = 100);

}  // namespace mgam::theory
