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

#include <omp.h>

#include "mgam/kernels.hpp"

namespace mgam::kernels::parallel {

namespace {

// Below this much work the fork/join costs more than it saves.
constexpr std::size_t kMinParallelWork = 1 << 15;

}  // namespace

void class_sums(const AugmentedMatrix& x, std::span<const std::size_t> columns,
                std::span<const double> weights,
                std::span<const std::int8_t> signs, std::span<ClassSums> out) {
  const auto count = static_cast<std::ptrdiff_t>(columns.size());
  const bool go_parallel =
      columns.size() * x.rows() / 4 >= kMinParallelWork && !omp_in_parallel();
#pragma omp parallel for schedule(dynamic, 16) if (go_parallel)
  for (std::ptrdiff_t q = 0; q < count; ++q) {
    out[q] = column_class_sums(x.active(columns[q]), weights, signs);
  }
}

void fill_columns(const Dataset& ds, const BinningSpec& bins,
                  std::span<const ColumnMeta> metas,
                  std::vector<std::vector<std::uint8_t>>& out) {
  out.assign(metas.size(), std::vector<std::uint8_t>(ds.n(), 0));
  const auto count = static_cast<std::ptrdiff_t>(metas.size());
  const bool go_parallel =
      metas.size() * ds.n() >= kMinParallelWork && !omp_in_parallel();
#pragma omp parallel for schedule(static) if (go_parallel)
  for (std::ptrdiff_t c = 0; c < count; ++c) {
    auto& col = out[c];
    for (std::size_t i = 0; i < ds.n(); ++i) {
      col[i] = column_value(metas[c], bins, ds, i) ? 1 : 0;
    }
  }
}

}  // namespace mgam::kernels::parallel
