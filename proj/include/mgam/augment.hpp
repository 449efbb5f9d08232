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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgam/dataset.hpp"

namespace mgam {

// Per-feature ascending threshold lists.
struct BinningSpec {
  std::vector<std::vector<double>> thresholds;

  std::size_t d() const { return thresholds.size(); }
  std::vector<std::size_t> lengths() const;
  bool operator==(const BinningSpec&) const = default;
};

enum class ColumnKind : std::uint8_t {
  kThreshold,           // 1[x_j <= t_{j,k}]
  kMissing,             // 1[mcat(x_j) = m]
  kMissingOverall,      // 1[mcat(x_j) != 0]
  kInteraction,         // 1[mcat(x_j) = m and x_jp <= t_{jp,k}]
  kInteractionOverall,  // 1[mcat(x_j) != 0 and x_jp <= t_{jp,k}]
};

// Identity of one augmented column. Feature and threshold indices are
// 0-based; reason codes are 1-based. Fields that do not apply to the kind
// are zero.
struct ColumnMeta {
  ColumnKind kind = ColumnKind::kThreshold;
  std::uint32_t j = 0;
  std::uint32_t jp = 0;
  std::uint32_t k = 0;
  Reason m = 0;

  static ColumnMeta threshold(std::uint32_t j, std::uint32_t k) {
    return {ColumnKind::kThreshold, j, 0, k, 0};
  }
  static ColumnMeta missing(std::uint32_t j, Reason m) {
    return {ColumnKind::kMissing, j, 0, 0, m};
  }
  static ColumnMeta missing_overall(std::uint32_t j) {
    return {ColumnKind::kMissingOverall, j, 0, 0, 0};
  }
  static ColumnMeta interaction(std::uint32_t j, std::uint32_t jp,
                                std::uint32_t k, Reason m) {
    return {ColumnKind::kInteraction, j, jp, k, m};
  }
  static ColumnMeta interaction_overall(std::uint32_t j, std::uint32_t jp,
                                        std::uint32_t k) {
    return {ColumnKind::kInteractionOverall, j, jp, k, 0};
  }

  // Feature whose shape function this column belongs to: j for threshold
  // and indicator columns, jp for interactions.
  std::uint32_t target() const;
  bool has_threshold() const;
  // Feature index that carries the threshold (j or jp).
  std::uint32_t threshold_feature() const;

  // CSV header token, e.g. THR_0_3, MI_2_1, MIO_2, INT_2_0_3_1, INTO_2_0_3.
  std::string token() const;
  static ColumnMeta from_token(const std::string& token);

  bool operator==(const ColumnMeta&) const = default;
};

std::string_view kind_name(ColumnKind kind);
ColumnKind kind_from_name(std::string_view name);

struct AugmentConfig {
  int n_quantiles = 8;
  bool use_indicators = true;
  bool use_interactions = true;
  bool specific = true;
  bool overall = false;
  bool dedup = true;

  void validate() const;
};

// A column dropped by dedup. `representative` indexes the kept column it
// duplicates; nullopt means it was constant on the training rows.
struct ColumnAlias {
  ColumnMeta removed;
  std::optional<std::size_t> representative;
};

// Boolean design matrix, stored column-wise both as dense 0/1 bytes and as
// ascending lists of active rows.
class AugmentedMatrix {
 public:
  AugmentedMatrix() = default;
  AugmentedMatrix(std::size_t rows, std::vector<ColumnMeta> meta,
                  std::vector<std::vector<std::uint8_t>> bits);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return meta_.size(); }

  const ColumnMeta& meta(std::size_t c) const { return meta_[c]; }
  const std::vector<ColumnMeta>& metas() const { return meta_; }
  std::span<const std::uint8_t> column(std::size_t c) const {
    return bits_[c];
  }
  std::span<const std::uint32_t> active(std::size_t c) const {
    return active_[c];
  }
  std::uint8_t at(std::size_t i, std::size_t c) const { return bits_[c][i]; }
  std::vector<std::uint8_t> row(std::size_t i) const;

  const std::vector<ColumnAlias>& aliases() const { return aliases_; }

  // Drops duplicate and constant columns, keeping the earliest occurrence.
  void dedup();

  std::optional<std::size_t> find(const ColumnMeta& meta) const;

  // CSV with one header token per column and 0/1 cells.
  std::string to_csv() const;

 private:
  std::size_t rows_ = 0;
  std::vector<ColumnMeta> meta_;
  std::vector<std::vector<std::uint8_t>> bits_;
  std::vector<std::vector<std::uint32_t>> active_;
  std::vector<ColumnAlias> aliases_;
};

// Empirical quantile of sorted values using the lower rule: the element at
// index floor(num * (m - 1) / den) for level num/den.
double lower_quantile(std::span<const double> sorted, std::size_t num,
                      std::size_t den);

BinningSpec compute_binning(const Dataset& train, int n_quantiles);

// Value of one augmented column for row i of `ds`.
bool column_value(const ColumnMeta& meta, const BinningSpec& bins,
                  const Dataset& ds, std::size_t i);

// Column metadata in emission order, before dedup.
std::vector<ColumnMeta> column_layout(const BinningSpec& bins, Reason c,
                                      const AugmentConfig& cfg);

std::size_t column_count(std::size_t d, std::span<const std::size_t> lens,
                         std::size_t c, const AugmentConfig& cfg);

AugmentedMatrix build_augmented(const Dataset& ds, const BinningSpec& bins,
                                const AugmentConfig& cfg);

// Evaluates an explicit column list (e.g. a trained model's terms) on `ds`.
AugmentedMatrix build_columns(const Dataset& ds, const BinningSpec& bins,
                              std::vector<ColumnMeta> metas);

}  // namespace mgam
