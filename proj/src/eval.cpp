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

#include "mgam/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>

#include "json.hpp"
#include "mgam/error.hpp"
#include "mgam/random.hpp"

namespace mgam {

std::string_view metric_name(Metric metric) {
  return metric == Metric::kAuc ? "auc" : "accuracy";
}

Metric metric_from_name(std::string_view name) {
  if (name == "accuracy") return Metric::kAccuracy;
  if (name == "auc") return Metric::kAuc;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown metric '" + std::string(name) +
                  "' (expected accuracy or auc)");
}

namespace {

void check_lengths(std::span<const double> scores,
                   std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kMismatch, "scores and labels differ in length");
  }
  if (scores.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "metric of an empty sample");
  }
}

}  // namespace

double accuracy(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (predict_label(scores[i]) == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Sum of midranks (1-based, doubled to stay integral) over positives.
  std::uint64_t rank_sum2 = 0;
  std::uint64_t n_pos = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const std::uint64_t mid2 = lo + 1 + hi;  // 2 * average of lo+1 .. hi
    for (std::size_t q = lo; q < hi; ++q) {
      if (labels[order[q]] == 1) {
        rank_sum2 += mid2;
        ++n_pos;
      }
    }
    lo = hi;
  }
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "auc needs both classes in the labels");
  }
  // U = R - n_pos (n_pos + 1) / 2, counted in halves.
  const std::uint64_t u2 = rank_sum2 - n_pos * (n_pos + 1);
  return static_cast<double>(u2) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double compute_metric(Metric metric, std::span<const double> scores,
                      std::span<const int> labels) {
  return metric == Metric::kAuc ? auc(scores, labels)
                                : accuracy(scores, labels);
}

std::size_t sparsity(const ModelParams& m) {
  return static_cast<std::size_t>(
      std::count_if(m.coef.begin(), m.coef.end(),
                    [](const auto& kv) { return kv.second != 0.0; }));
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels,
                                          std::size_t k, std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorKind::kInvalidArgument, "need at least 2 folds");
  }
  std::vector<std::size_t> fold(labels.size(), 0);
  Rng rng(seed);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) rows.push_back(i);
    }
    if (rows.size() < k) {
      throw Error(ErrorKind::kInvalidArgument,
                  "class " + std::to_string(cls) + " has " +
                      std::to_string(rows.size()) +
                      " rows, too few to stratify into " + std::to_string(k) +
                      " folds");
    }
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t p = 0; p < rows.size(); ++p) fold[rows[p]] = p % k;
  }
  return fold;
}

std::vector<Model> fit_models(const Dataset& train,
                              std::span<const double> lambdas,
                              const PipelineConfig& cfg) {
  if (lambdas.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "lambda grid is empty");
  }
  std::vector<double> grid(lambdas.begin(), lambdas.end());
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const BinningSpec bins = compute_binning(train, cfg.augment.n_quantiles);
  const AugmentedMatrix x = build_augmented(train, bins, cfg.augment);
  const auto path = fit_path(x, train.labels(), grid, cfg.fit);

  std::vector<Model> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const auto it = std::find(grid.begin(), grid.end(), lambda);
    const auto& res = path[static_cast<std::size_t>(it - grid.begin())];
    out.push_back(Model::from_params(res.model, x, bins, train));
  }
  return out;
}

Model fit_model(const Dataset& train, double lambda0,
                const PipelineConfig& cfg) {
  const double grid[] = {lambda0};
  return std::move(fit_models(train, grid, cfg).front());
}

CvReport cross_validate(const Dataset& ds, std::span<const double> lambdas,
                        std::size_t k, Metric metric,
                        const PipelineConfig& cfg, std::uint64_t seed) {
  if (lambdas.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "lambda grid is empty");
  }
  cfg.augment.validate();
  cfg.fit.validate();
  const auto fold = stratified_folds(ds.labels(), k, seed);

  // metric[f][l], support[f][l]
  std::vector<std::vector<double>> scores(k), supports(k);
  std::vector<std::exception_ptr> errors(k);
  const auto n_folds = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t fi = 0; fi < n_folds; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    try {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < ds.n(); ++i) {
        (fold[i] == f ? test_rows : train_rows).push_back(i);
      }
      const Dataset train = ds.subset(train_rows);
      const Dataset test = ds.subset(test_rows);
      const auto models = fit_models(train, lambdas, cfg);
      for (const auto& model : models) {
        const auto s = model.scores(test);
        scores[f].push_back(compute_metric(metric, s, test.labels()));
        supports[f].push_back(static_cast<double>(model.sparsity()));
      }
    } catch (...) {
      errors[f] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CvReport report;
  report.metric = metric;
  report.folds = k;
  report.seed = seed;
  const double kd = static_cast<double>(k);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    CvRow row;
    row.lambda0 = lambdas[l];
    double sum = 0.0, support = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
      row.fold_metric.push_back(scores[f][l]);
      sum += scores[f][l];
      support += supports[f][l];
    }
    row.mean = sum / kd;
    row.mean_support = support / kd;
    double ss = 0.0;
    for (double v : row.fold_metric) ss += (v - row.mean) * (v - row.mean);
    row.std_error = std::sqrt(ss / (kd - 1.0)) / std::sqrt(kd);
    report.rows.push_back(std::move(row));
  }
  for (std::size_t l = 1; l < report.rows.size(); ++l) {
    const auto& best = report.rows[report.best_index];
    const auto& row = report.rows[l];
    if (row.mean > best.mean ||
        (row.mean == best.mean && row.lambda0 > best.lambda0)) {
      report.best_index = l;
    }
  }
  report.best_lambda = report.rows[report.best_index].lambda0;
  return report;
}

std::string CvReport::to_json() const {
  nlohmann::ordered_json j;
  j["metric"] = metric_name(metric);
  j["folds"] = folds;
  j["seed"] = seed;
  j["support_counts"] = "nonzero coefficients, bias excluded";
  auto rows_json = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"lambda0", r.lambda0},
                         {"mean", r.mean},
                         {"std_error", r.std_error},
                         {"mean_support", r.mean_support},
                         {"folds", r.fold_metric}});
  }
  j["rows"] = std::move(rows_json);
  j["best_lambda"] = best_lambda;
  return j.dump(2) + "\n";
}

std::string CvReport::to_text() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%12s  %10s  %10s  %12s\n", "lambda0",
                std::string(metric_name(metric)).c_str(), "std_error",
                "mean_support");
  out += line;
  for (std::size_t l = 0; l < rows.size(); ++l) {
    const auto& r = rows[l];
    std::snprintf(line, sizeof line, "%12.6g  %10.6f  %10.6f  %12.2f%s\n",
                  r.lambda0, r.mean, r.std_error, r.mean_support,
                  l == best_index ? "  *" : "");
    out += line;
  }
  std::snprintf(line, sizeof line, "best_lambda %.6g (%zu folds, seed %llu)\n",
                best_lambda, folds, static_cast<unsigned long long>(seed));
  out += line;
  return out;
}

}  // namespace mgam
