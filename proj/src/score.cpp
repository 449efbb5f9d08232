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

#include "mgam/score.hpp"

#include <algorithm>
#include <map>

namespace mgam {

PartKey part_key(const ColumnMeta& meta) {
  switch (meta.kind) {
    case ColumnKind::kThreshold:
      return {0, 0, 0, 0};
    case ColumnKind::kInteraction:
      return {1, meta.j, 0, meta.m};
    case ColumnKind::kInteractionOverall:
      return {1, meta.j, 1, 0};
    case ColumnKind::kMissing:
      return {2, 0, 0, meta.m};
    case ColumnKind::kMissingOverall:
      return {2, 0, 1, 0};
  }
  return {};
}

ScorePlan::ScorePlan(std::span<const ColumnMeta> metas,
                     std::span<const std::pair<std::size_t, double>> coefs) {
  // feature -> part key -> terms
  std::map<std::uint32_t, std::map<PartKey, std::vector<Term>>> grouped;
  for (const auto& [column, value] : coefs) {
    const ColumnMeta& meta = metas[column];
    grouped[meta.target()][part_key(meta)].push_back({column, value});
  }
  for (auto& [feature, parts] : grouped) {
    Group group{feature, {}};
    for (auto& [key, terms] : parts) {
      // Highest threshold first; offsets have a single term per key.
      std::stable_sort(terms.begin(), terms.end(),
                       [&](const Term& a, const Term& b) {
                         return metas[a.column].k > metas[b.column].k;
                       });
      group.parts.push_back({std::move(terms)});
    }
    groups_.push_back(std::move(group));
  }
}

}  // namespace mgam
