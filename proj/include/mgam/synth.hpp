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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgam/dataset.hpp"

namespace mgam {

// Outcome-dependent MAR injection: X1 (target) goes missing with
// probability r when (X2 >= Q_X2(q) and Y = 1) or (X2 < Q_X2(q) and Y = 0),
// and never otherwise.
struct MarSpec {
  std::size_t target_feature = 0;
  std::size_t conditioning_feature = 1;
  double rate = 0.0;
  double quantile_level = 0.6;
  std::uint64_t seed = 0;

  void validate(std::size_t d) const;
};

MarSpec parse_mar_spec_json(const std::string& text, const Dataset& ds);

// Q_X2(q) over present values, same lower rule as the binning code.
double mar_cutoff(const Dataset& ds, const MarSpec& spec);

// True when row i sits in a table cell whose injection probability is r.
bool mar_eligible(const Dataset& ds, const MarSpec& spec, double cutoff,
                  std::size_t i);

// Newly missing cells get reason c + 1. Rows with X2 absent count as
// X2 < Q. Cells already absent are left alone. When nothing is injected the
// input is returned unchanged (c is not bumped).
Dataset inject_mar(const Dataset& ds, const MarSpec& spec);

std::vector<std::string> synthetic_generators();

// Deterministic synthetic data. Generators:
//   "null"                   x ~ N(0,1), score 0, y ~ Bernoulli(1/2)
//   "sparse_additive"        x ~ N(0,1), step-function score on the first
//                            three features, y ~ Bernoulli(sigmoid(2 score))
//   "sparse_additive_clean"  same score, y = 1[score > 0]
//   "uniform_additive"       x ~ U(0,1), step score on the first three
//                            features, y ~ Bernoulli(sigmoid(2 score))
// Generator parameters are recorded in Dataset::metadata.
Dataset gen_synthetic(std::size_t n, std::size_t d, std::uint64_t seed,
                      const std::string& dgp);

// The true score used by the additive generators, for tests.
double synthetic_true_score(const std::string& dgp,
                            const std::vector<double>& x);

}  // namespace mgam
