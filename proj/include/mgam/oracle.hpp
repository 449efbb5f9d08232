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
#include <span>
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/solver.hpp"

// Brute-force minimizer of the l0-penalized exponential loss, for test-scale
// instances only.
namespace mgam::oracle {

inline constexpr std::size_t kMaxColumns = 20;
inline constexpr std::size_t kMaxSupport = 4;

struct RestrictedFit {
  ModelParams model;  // coefficients on the requested support (zeros kept out)
  double loss = 0.0;  // average exponential loss
  // Projected gradient max-norm at the returned point (0 at the optimum).
  double projected_gradient = 0.0;
  int iterations = 0;
};

// Minimizes the exponential loss over (bias, coefficients on `support`)
// within the +-kCoefClamp box using projected Newton steps with step
// halving, followed by exact coordinate polishing.
RestrictedFit fit_support(const AugmentedMatrix& x, std::span<const int> labels,
                          std::span<const std::size_t> support);

// Gradient of the average exponential loss with respect to
// (bias, coef[support[0]], coef[support[1]], ...).
std::vector<double> loss_gradient(const AugmentedMatrix& x,
                                  std::span<const int> labels,
                                  std::span<const std::size_t> support,
                                  const ModelParams& m);

struct ExactResult {
  ModelParams model;
  std::vector<std::size_t> support;
  double objective = 0.0;
};

// Enumerates every support of size <= max_support. Ties go to the smaller
// support, then the lexicographically smaller one.
ExactResult exact_fit(const AugmentedMatrix& x, std::span<const int> labels,
                      double lambda0, std::size_t max_support);

}  // namespace mgam::oracle
