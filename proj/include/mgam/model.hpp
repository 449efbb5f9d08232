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
#include <string>
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/dataset.hpp"
#include "mgam/solver.hpp"

namespace mgam {

// A fitted model detached from its training matrix: every nonzero
// coefficient carries the identity of its column, so the model can score
// any dataset with the same features.
struct Model {
  struct Term {
    ColumnMeta meta;
    double value = 0.0;
  };

  double bias = 0.0;
  double lambda0 = 0.0;
  std::vector<Term> terms;
  BinningSpec bins;
  std::vector<std::string> feature_names;
  Reason n_reasons = 0;
  Reason overall_reason = 0;

  static Model from_params(const ModelParams& params,
                           const AugmentedMatrix& x, const BinningSpec& bins,
                           const Dataset& train);

  std::size_t sparsity() const { return terms.size(); }
  std::vector<ColumnMeta> metas() const;
  // Params over the compact layout metas() (column q = terms[q]).
  ModelParams params() const;

  std::vector<double> scores(const Dataset& ds) const;

  // Field order: bias, lambda0, coefficients, binning, label_rule.
  std::string to_json() const;
  static Model from_json(const std::string& text);
};

// Plot-ready step function. values[k] applies for t_{k-1} < x <= t_k;
// x above the last threshold maps to 0.
struct StepCurve {
  std::vector<double> thresholds;
  std::vector<double> values;

  double at(double x) const;
};

// Contribution added to a feature's shape when another feature is missing.
struct ShapeAdjustment {
  std::uint32_t source_feature = 0;
  bool overall = false;  // any missingness of the source feature
  Reason reason = 0;     // 0 when overall
  std::string label;
  StepCurve curve;
};

struct MissingOffset {
  bool overall = false;
  Reason reason = 0;
  double value = 0.0;
};

struct ShapeFunction {
  std::uint32_t feature = 0;
  std::string name;
  StepCurve base;
  std::vector<ShapeAdjustment> adjustments;
  std::vector<MissingOffset> missing;
};

struct ShapeSet {
  double bias = 0.0;
  std::vector<ShapeFunction> shapes;

  // Sum of the applicable shape pieces plus bias for row i. Bit-identical to
  // Model::scores for the same row.
  double evaluate(const Dataset& ds, std::size_t i) const;

  std::string to_json() const;
  static ShapeSet from_json(const std::string& text);
  // Long format: feature,name,curve,source,reason,threshold,value
  std::string to_csv() const;
};

// Groups the model's terms by the feature whose shape they modify. One
// shape per feature, including features with no terms. Throws kMismatch
// naming the first term that `bins` cannot place.
ShapeSet export_shapes(const Model& model, const BinningSpec& bins);
inline ShapeSet export_shapes(const Model& model) {
  return export_shapes(model, model.bins);
}

}  // namespace mgam
