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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgam/augment.hpp"

namespace mgam {

// Every coefficient, and the bias, lives in [-kCoefClamp, kCoefClamp].
// exp(15) keeps all weights well inside double range.
inline constexpr double kCoefClamp = 15.0;

// Bias plus sparse coefficients over the columns of an AugmentedMatrix.
struct ModelParams {
  double bias = 0.0;
  // column index -> nonzero coefficient
  std::map<std::size_t, double> coef;
  double lambda0 = 0.0;

  std::size_t support_size() const { return coef.size(); }
  // Stores v, or erases the entry when v == 0.
  void set(std::size_t column, double v);
  double get(std::size_t column) const;

  bool operator==(const ModelParams&) const = default;
};

struct FitConfig {
  double lambda0 = 0.0;
  std::size_t max_support_size = 100;
  int max_sweeps = 1000;
  // Relative objective improvement below which a sweep counts as converged.
  double tol = 1e-9;
  bool swap_search = true;
  // Once cheap swaps stop helping, this many screened out-of-support
  // columns are tried as additions, pair additions and swaps, each scored
  // by a joint refit of (bias, support). 0 turns the refit search off.
  std::size_t refit_candidates = 8;

  void validate() const;
};

struct FitResult {
  ModelParams model;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  // Objective after every sweep (coordinate, full, or swap pass).
  std::vector<double> trace;
  // Empty unless the fit is degenerate (e.g. a single label class).
  std::string warning;
};

// Label rule y in {0,1} -> +1 / -1.
std::vector<std::int8_t> label_signs(std::span<const int> labels);

double objective(const ModelParams& m, const AugmentedMatrix& x,
                 std::span<const int> labels, double lambda0);

// Average exponential loss only.
double exp_loss(const ModelParams& m, const AugmentedMatrix& x,
                std::span<const int> labels);

// Exact minimizer of the exponential loss along one boolean column, given
// per-row weights that exclude the column's own contribution:
// 1/2 ln(W+ / W-), clamped to +-kCoefClamp when a side is empty.
double optimal_coef(std::span<const std::uint8_t> column,
                    std::span<const double> sample_weights,
                    std::span<const int> labels);

// Same rule from precomputed class sums.
double optimal_step(double w_pos, double w_neg);

// Cyclic coordinate descent with exact l0 entry/removal tests and a
// first-improvement swap pass. `warm_start` seeds the coefficients.
FitResult fit(const AugmentedMatrix& x, std::span<const int> labels,
              const FitConfig& cfg,
              const ModelParams* warm_start = nullptr);

// Fits each lambda in order (descending), warm-starting from the previous
// solution.
std::vector<FitResult> fit_path(const AugmentedMatrix& x,
                                std::span<const int> labels,
                                std::span<const double> lambdas,
                                const FitConfig& cfg);

// The lambda grid searched by default.
std::vector<double> default_lambda_grid();

// gamma^T x + gamma0 summed in the canonical grouped order (see score.hpp).
double predict_score(const ModelParams& m, const AugmentedMatrix& x,
                     std::size_t row);
double predict_score(const ModelParams& m, std::span<const ColumnMeta> metas,
                     std::span<const std::uint8_t> row);

// score > 0 -> 1; ties at exactly 0 go to 1 as well.
inline int predict_label(double score) { return score >= 0.0 ? 1 : 0; }

}  // namespace mgam
