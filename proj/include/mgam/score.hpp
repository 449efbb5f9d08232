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
#include <utility>
#include <vector>

#include "mgam/augment.hpp"

namespace mgam {

// Fixed summation order for a model's score. Terms are grouped by the
// feature whose shape function they belong to (ascending); inside a group
// the threshold steps come first, then each adjustment curve, then the
// missing offsets. Step parts are summed from the highest threshold down, so
// for any present value the partial sum equals the cumulative step value an
// exported shape function stores. Evaluating shapes and evaluating this plan
// therefore give bit-identical scores.
class ScorePlan {
 public:
  struct Term {
    std::size_t column;
    double value;
  };
  // One step curve or one offset; its terms are summed into a fresh
  // accumulator that is then added to the group total.
  struct Part {
    std::vector<Term> terms;
  };
  struct Group {
    std::uint32_t feature;
    std::vector<Part> parts;
  };

  ScorePlan() = default;
  // `coefs` are (column, value) pairs; `metas[column]` describes the column.
  ScorePlan(std::span<const ColumnMeta> metas,
            std::span<const std::pair<std::size_t, double>> coefs);

  const std::vector<Group>& groups() const { return groups_; }

  template <typename ActiveFn>
  double evaluate(double bias, ActiveFn&& active) const {
    double total = bias;
    for (const auto& group : groups_) {
      double g = 0.0;
      for (const auto& part : group.parts) {
        double p = 0.0;
        for (const auto& t : part.terms) {
          if (active(t.column)) p += t.value;
        }
        g += p;
      }
      total += g;
    }
    return total;
  }

 private:
  std::vector<Group> groups_;
};

// Ordering key of a part within its group: (section, missing feature,
// overall flag, reason). Section 0 = threshold steps, 1 = adjustments,
// 2 = missing offsets. Shared by ScorePlan and the shape exporter.
struct PartKey {
  int section;
  std::uint32_t source;
  int overall;
  std::uint32_t reason;

  auto operator<=>(const PartKey&) const = default;
};

PartKey part_key(const ColumnMeta& meta);

}  // namespace mgam
