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

#include "mgam/augment.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "mgam/error.hpp"
#include "mgam/kernels.hpp"

namespace mgam {

std::vector<std::size_t> BinningSpec::lengths() const {
  std::vector<std::size_t> lens;
  lens.reserve(thresholds.size());
  for (const auto& t : thresholds) lens.push_back(t.size());
  return lens;
}

// ---------------------------------------------------------------------------
// ColumnMeta

std::uint32_t ColumnMeta::target() const {
  switch (kind) {
    case ColumnKind::kInteraction:
    case ColumnKind::kInteractionOverall:
      return jp;
    default:
      return j;
  }
}

bool ColumnMeta::has_threshold() const {
  return kind == ColumnKind::kThreshold || kind == ColumnKind::kInteraction ||
         kind == ColumnKind::kInteractionOverall;
}

std::uint32_t ColumnMeta::threshold_feature() const {
  return kind == ColumnKind::kThreshold ? j : jp;
}

std::string_view kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kThreshold: return "threshold";
    case ColumnKind::kMissing: return "missing";
    case ColumnKind::kMissingOverall: return "missing_overall";
    case ColumnKind::kInteraction: return "interaction";
    case ColumnKind::kInteractionOverall: return "interaction_overall";
  }
  return "?";
}

ColumnKind kind_from_name(std::string_view name) {
  for (auto kind : {ColumnKind::kThreshold, ColumnKind::kMissing,
                    ColumnKind::kMissingOverall, ColumnKind::kInteraction,
                    ColumnKind::kInteractionOverall}) {
    if (kind_name(kind) == name) return kind;
  }
  throw Error(ErrorKind::kParse,
              "unknown column kind '" + std::string(name) + "'");
}

std::string ColumnMeta::token() const {
  const auto s = [](auto v) { return std::to_string(v); };
  switch (kind) {
    case ColumnKind::kThreshold:
      return "THR_" + s(j) + "_" + s(k);
    case ColumnKind::kMissing:
      return "MI_" + s(j) + "_" + s(m);
    case ColumnKind::kMissingOverall:
      return "MIO_" + s(j);
    case ColumnKind::kInteraction:
      return "INT_" + s(j) + "_" + s(jp) + "_" + s(k) + "_" + s(m);
    case ColumnKind::kInteractionOverall:
      return "INTO_" + s(j) + "_" + s(jp) + "_" + s(k);
  }
  return {};
}

ColumnMeta ColumnMeta::from_token(const std::string& token) {
  std::vector<std::uint32_t> nums;
  std::string_view rest(token);
  const auto us = rest.find('_');
  if (us == std::string_view::npos) {
    throw Error(ErrorKind::kParse, "bad column token '" + token + "'");
  }
  const std::string_view prefix = rest.substr(0, us);
  rest.remove_prefix(us + 1);
  while (!rest.empty()) {
    const auto next = rest.find('_');
    const auto part = rest.substr(0, next);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw Error(ErrorKind::kParse, "bad column token '" + token + "'");
    }
    nums.push_back(v);
    if (next == std::string_view::npos) break;
    rest.remove_prefix(next + 1);
  }
  auto need = [&](std::size_t count) {
    if (nums.size() != count) {
      throw Error(ErrorKind::kParse, "bad column token '" + token + "'");
    }
  };
  if (prefix == "THR") {
    need(2);
    return threshold(nums[0], nums[1]);
  }
  if (prefix == "MI") {
    need(2);
    return missing(nums[0], static_cast<Reason>(nums[1]));
  }
  if (prefix == "MIO") {
    need(1);
    return missing_overall(nums[0]);
  }
  if (prefix == "INT") {
    need(4);
    return interaction(nums[0], nums[1], nums[2],
                       static_cast<Reason>(nums[3]));
  }
  if (prefix == "INTO") {
    need(3);
    return interaction_overall(nums[0], nums[1], nums[2]);
  }
  throw Error(ErrorKind::kParse, "bad column token '" + token + "'");
}

void AugmentConfig::validate() const {
  if (n_quantiles < 1) {
    throw Error(ErrorKind::kInvalidArgument, "n_quantiles must be >= 1");
  }
  if ((use_indicators || use_interactions) && !specific && !overall) {
    throw Error(ErrorKind::kInvalidArgument,
                "indicators/interactions need specific or overall encoding");
  }
}

// ---------------------------------------------------------------------------
// AugmentedMatrix

AugmentedMatrix::AugmentedMatrix(std::size_t rows,
                                 std::vector<ColumnMeta> meta,
                                 std::vector<std::vector<std::uint8_t>> bits)
    : rows_(rows), meta_(std::move(meta)), bits_(std::move(bits)) {
  if (bits_.size() != meta_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "column metadata/bit mismatch");
  }
  active_.resize(bits_.size());
  for (std::size_t c = 0; c < bits_.size(); ++c) {
    if (bits_[c].size() != rows_) {
      throw Error(ErrorKind::kInvalidArgument, "column length mismatch");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (bits_[c][i]) active_[c].push_back(static_cast<std::uint32_t>(i));
    }
  }
}

std::vector<std::uint8_t> AugmentedMatrix::row(std::size_t i) const {
  std::vector<std::uint8_t> r(cols());
  for (std::size_t c = 0; c < cols(); ++c) r[c] = bits_[c][i];
  return r;
}

std::optional<std::size_t> AugmentedMatrix::find(const ColumnMeta& m) const {
  auto it = std::find(meta_.begin(), meta_.end(), m);
  if (it == meta_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - meta_.begin());
}

void AugmentedMatrix::dedup() {
  std::vector<ColumnMeta> meta;
  std::vector<std::vector<std::uint8_t>> bits;
  std::vector<std::vector<std::uint32_t>> active;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t c = 0; c < meta_.size(); ++c) {
    const auto& col = bits_[c];
    const std::size_t ones = active_[c].size();
    if (ones == 0 || ones == rows_) {
      aliases_.push_back({meta_[c], std::nullopt});
      continue;
    }
    std::string key(col.begin(), col.end());
    auto [it, inserted] = seen.try_emplace(std::move(key), meta.size());
    if (!inserted) {
      aliases_.push_back({meta_[c], it->second});
      continue;
    }
    meta.push_back(meta_[c]);
    bits.push_back(std::move(bits_[c]));
    active.push_back(std::move(active_[c]));
  }
  meta_ = std::move(meta);
  bits_ = std::move(bits);
  active_ = std::move(active);
}

std::string AugmentedMatrix::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < cols(); ++c) {
    if (c) out += ',';
    out += meta_[c].token();
  }
  out += '\n';
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (c) out += ',';
      out += bits_[c][i] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binning

double lower_quantile(std::span<const double> sorted, std::size_t num,
                      std::size_t den) {
  if (sorted.empty() || den == 0 || num > den) {
    throw Error(ErrorKind::kInvalidArgument, "bad quantile request");
  }
  const std::size_t idx = num * (sorted.size() - 1) / den;
  return sorted[idx];
}

BinningSpec compute_binning(const Dataset& train, int n_quantiles) {
  if (n_quantiles < 1) {
    throw Error(ErrorKind::kInvalidArgument, "n_quantiles must be >= 1");
  }
  BinningSpec bins;
  bins.thresholds.resize(train.d());
  std::vector<double> present;
  for (std::size_t j = 0; j < train.d(); ++j) {
    present.clear();
    for (std::size_t i = 0; i < train.n(); ++i) {
      if (train.present(i, j)) present.push_back(train.value(i, j));
    }
    if (present.empty()) continue;
    std::sort(present.begin(), present.end());
    const double top = present.back();
    auto& t = bins.thresholds[j];
    const auto q = static_cast<std::size_t>(n_quantiles);
    for (std::size_t k = 1; k <= q; ++k) {
      const double v = lower_quantile(present, k, q);
      if (v >= top) continue;  // all-ones column on the training rows
      if (t.empty() || v > t.back()) t.push_back(v);
    }
  }
  return bins;
}

namespace {

bool below_threshold(const BinningSpec& bins, const Dataset& ds,
                     std::size_t i, std::uint32_t feature, std::uint32_t k) {
  return ds.present(i, feature) &&
         ds.value(i, feature) <= bins.thresholds[feature][k];
}

bool reason_matches(const Dataset& ds, std::size_t i, std::uint32_t feature,
                    Reason m) {
  const Reason r = ds.reason(i, feature);
  if (r == 0) return false;
  return r == m || (m == ds.overall_reason() && m != 0);
}

}  // namespace

bool column_value(const ColumnMeta& meta, const BinningSpec& bins,
                  const Dataset& ds, std::size_t i) {
  switch (meta.kind) {
    case ColumnKind::kThreshold:
      return below_threshold(bins, ds, i, meta.j, meta.k);
    case ColumnKind::kMissing:
      return reason_matches(ds, i, meta.j, meta.m);
    case ColumnKind::kMissingOverall:
      return !ds.present(i, meta.j);
    case ColumnKind::kInteraction:
      return reason_matches(ds, i, meta.j, meta.m) &&
             below_threshold(bins, ds, i, meta.jp, meta.k);
    case ColumnKind::kInteractionOverall:
      return !ds.present(i, meta.j) &&
             below_threshold(bins, ds, i, meta.jp, meta.k);
  }
  return false;
}

std::vector<ColumnMeta> column_layout(const BinningSpec& bins, Reason c,
                                      const AugmentConfig& cfg) {
  cfg.validate();
  const auto d = static_cast<std::uint32_t>(bins.d());
  const auto len = [&](std::uint32_t j) {
    return static_cast<std::uint32_t>(bins.thresholds[j].size());
  };
  std::vector<ColumnMeta> out;
  for (std::uint32_t j = 0; j < d; ++j) {
    for (std::uint32_t k = 0; k < len(j); ++k) {
      out.push_back(ColumnMeta::threshold(j, k));
    }
  }
  if (cfg.use_indicators && cfg.specific) {
    for (std::uint32_t j = 0; j < d; ++j) {
      for (Reason m = 1; m <= c; ++m) out.push_back(ColumnMeta::missing(j, m));
    }
  }
  if (cfg.use_indicators && cfg.overall) {
    for (std::uint32_t j = 0; j < d; ++j) {
      out.push_back(ColumnMeta::missing_overall(j));
    }
  }
  if (cfg.use_interactions && cfg.specific) {
    for (std::uint32_t j = 0; j < d; ++j) {
      for (std::uint32_t jp = 0; jp < d; ++jp) {
        if (jp == j) continue;
        for (std::uint32_t k = 0; k < len(jp); ++k) {
          for (Reason m = 1; m <= c; ++m) {
            out.push_back(ColumnMeta::interaction(j, jp, k, m));
          }
        }
      }
    }
  }
  if (cfg.use_interactions && cfg.overall) {
    for (std::uint32_t j = 0; j < d; ++j) {
      for (std::uint32_t jp = 0; jp < d; ++jp) {
        if (jp == j) continue;
        for (std::uint32_t k = 0; k < len(jp); ++k) {
          out.push_back(ColumnMeta::interaction_overall(j, jp, k));
        }
      }
    }
  }
  return out;
}

std::size_t column_count(std::size_t d, std::span<const std::size_t> lens,
                         std::size_t c, const AugmentConfig& cfg) {
  if (lens.size() != d) {
    throw Error(ErrorKind::kInvalidArgument, "lens must have d entries");
  }
  std::size_t total_len = 0;
  for (auto l : lens) total_len += l;
  // Sum over j of the thresholds on every other feature.
  const std::size_t cross = d == 0 ? 0 : (d - 1) * total_len;
  std::size_t count = total_len;
  if (cfg.use_indicators) {
    if (cfg.specific) count += c * d;
    if (cfg.overall) count += d;
  }
  if (cfg.use_interactions) {
    if (cfg.specific) count += c * cross;
    if (cfg.overall) count += cross;
  }
  return count;
}

AugmentedMatrix build_columns(const Dataset& ds, const BinningSpec& bins,
                              std::vector<ColumnMeta> metas) {
  if (bins.d() != ds.d()) {
    throw Error(ErrorKind::kMismatch, "binning has " +
                                          std::to_string(bins.d()) +
                                          " features, data has " +
                                          std::to_string(ds.d()));
  }
  for (const auto& m : metas) {
    const bool bad_feature =
        m.j >= ds.d() || (m.has_threshold() && m.threshold_feature() >= ds.d());
    if (bad_feature ||
        (m.has_threshold() &&
         m.k >= bins.thresholds[m.threshold_feature()].size())) {
      throw Error(ErrorKind::kMismatch,
                  "column " + m.token() + " does not fit the binning");
    }
  }
  std::vector<std::vector<std::uint8_t>> bits;
  kernels::parallel::fill_columns(ds, bins, metas, bits);
  return AugmentedMatrix(ds.n(), std::move(metas), std::move(bits));
}

AugmentedMatrix build_augmented(const Dataset& ds, const BinningSpec& bins,
                                const AugmentConfig& cfg) {
  auto x = build_columns(ds, bins, column_layout(bins, ds.n_reasons(), cfg));
  if (cfg.dedup) x.dedup();
  return x;
}

}  // namespace mgam
