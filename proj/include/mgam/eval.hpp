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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/dataset.hpp"
#include "mgam/model.hpp"
#include "mgam/solver.hpp"

namespace mgam {

enum class Metric { kAccuracy, kAuc };

std::string_view metric_name(Metric metric);
Metric metric_from_name(std::string_view name);

// Fraction of rows where predict_label(score) == label.
double accuracy(std::span<const double> scores, std::span<const int> labels);

// Mann-Whitney statistic with midranks for ties.
double auc(std::span<const double> scores, std::span<const int> labels);

double compute_metric(Metric metric, std::span<const double> scores,
                      std::span<const int> labels);

// Nonzero coefficients; the bias is never counted.
std::size_t sparsity(const ModelParams& m);

// Fold id per row. Each class is shuffled on its own and dealt round-robin,
// so every fold receives both classes. Throws when a class has fewer than k
// rows.
std::vector<std::size_t> stratified_folds(std::span<const int> labels,
                                          std::size_t k, std::uint64_t seed);

struct PipelineConfig {
  AugmentConfig augment;
  FitConfig fit;
};

// Bins and augments `train`, then fits each lambda (any order; fitted in
// descending order with warm starts). Models come back in input order.
std::vector<Model> fit_models(const Dataset& train,
                              std::span<const double> lambdas,
                              const PipelineConfig& cfg);

Model fit_model(const Dataset& train, double lambda0,
                const PipelineConfig& cfg);

struct CvRow {
  double lambda0 = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double mean_support = 0.0;
  std::vector<double> fold_metric;
};

struct CvReport {
  Metric metric = Metric::kAccuracy;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::vector<CvRow> rows;  // same order as the requested grid
  std::size_t best_index = 0;
  double best_lambda = 0.0;

  std::string to_json() const;
  std::string to_text() const;
};

// Stratified k-fold CV. Binning is recomputed on each fold's training part.
CvReport cross_validate(const Dataset& ds, std::span<const double> lambdas,
                        std::size_t k, Metric metric,
                        const PipelineConfig& cfg, std::uint64_t seed);

}  // namespace mgam
