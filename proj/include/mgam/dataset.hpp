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
#include <string>
#include <utility>
#include <vector>

namespace mgam {

// Reason code 0 means the cell is present; 1..c are missingness reasons.
using Reason = std::uint16_t;

// Tabular data with per-cell missingness reasons. Row-major storage; a cell
// is ABSENT exactly when its reason is nonzero, in which case its value slot
// holds NaN and must not be read.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::size_t rows);

  std::size_t n() const { return labels_.size(); }
  std::size_t d() const { return feature_names_.size(); }

  bool present(std::size_t i, std::size_t j) const {
    return reasons_[i * d() + j] == 0;
  }
  double value(std::size_t i, std::size_t j) const {
    return values_[i * d() + j];
  }
  Reason reason(std::size_t i, std::size_t j) const {
    return reasons_[i * d() + j];
  }
  int label(std::size_t i) const { return labels_[i]; }

  void set_value(std::size_t i, std::size_t j, double v);
  void set_absent(std::size_t i, std::size_t j, Reason reason);
  void set_label(std::size_t i, int y);

  // Number of distinct reason codes in use (codes run 1..c).
  Reason n_reasons() const { return n_reasons_; }
  void set_n_reasons(Reason c) { n_reasons_ = c; }

  // Code of the reason that matches any missingness, or 0 when none was
  // requested. When nonzero it is always n_reasons() at load time.
  Reason overall_reason() const { return overall_reason_; }
  void set_overall_reason(Reason code) { overall_reason_ = code; }

  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<int>& labels() const { return labels_; }

  std::optional<std::size_t> feature_index(const std::string& name) const;

  // Copy of the rows named by `rows`, in that order.
  Dataset subset(const std::vector<std::size_t>& rows) const;

  // Free-form provenance (generator name, parameters, ...).
  std::map<std::string, std::string> metadata;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> values_;
  std::vector<Reason> reasons_;
  std::vector<int> labels_;
  Reason n_reasons_ = 0;
  Reason overall_reason_ = 0;
};

// Missingness encoding for CSV input.
struct EncodingMap {
  // Cells whose text equals this token are missing with `na_reason`.
  // Empty cells are always missing with `na_reason`.
  std::optional<std::string> na_token;
  // Reason for empty / NA-token cells. 0 means "one past the largest
  // declared sentinel code".
  Reason na_reason = 0;
  bool add_overall_reason = false;
  // column name -> (sentinel text -> reason code)
  std::map<std::string, std::map<std::string, Reason>> columns;

  Reason resolved_na_reason() const;
};

EncodingMap parse_encoding_json(const std::string& text);
EncodingMap load_encoding_json(const std::string& path);
std::string encoding_to_json(const EncodingMap& enc);

Dataset parse_csv(const std::string& text, const std::string& label_column,
                  const EncodingMap& encoding);
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const EncodingMap& encoding);

// Writes features then the label column. Absent cells are rendered with the
// first sentinel mapped to their reason in `encoding`, an empty cell for the
// NA reason, or "NA_<m>" otherwise (see extend_encoding).
std::string format_csv(const Dataset& ds, const std::string& label_column,
                       const EncodingMap& encoding);
void write_csv(const Dataset& ds, const std::string& path,
               const std::string& label_column, const EncodingMap& encoding);

// Returns `encoding` plus "NA_<m>" sentinels for every (column, reason) pair
// in `ds` that the encoding cannot otherwise express, so that
// format_csv / parse_csv round-trip the dataset.
EncodingMap extend_encoding(const Dataset& ds, const EncodingMap& encoding);

// Seeded shuffle split; test size is round(n * test_fraction).
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed);

// Index form of split(), returned as (train rows, test rows).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double test_fraction, std::uint64_t seed);

// Mean of present values per feature (0 for fully missing features).
std::vector<double> feature_means(const Dataset& ds);

// Replaces every absent cell by the given per-feature value; the result has
// no missingness and c = 0.
Dataset impute_constant(const Dataset& ds, const std::vector<double>& fill);

std::string format_double(double v);

}  // namespace mgam
