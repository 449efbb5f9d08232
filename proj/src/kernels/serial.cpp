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

#include "mgam/kernels.hpp"

namespace mgam::kernels::serial {

void class_sums(const AugmentedMatrix& x, std::span<const std::size_t> columns,
                std::span<const double> weights,
                std::span<const std::int8_t> signs, std::span<ClassSums> out) {
  for (std::size_t q = 0; q < columns.size(); ++q) {
    out[q] = column_class_sums(x.active(columns[q]), weights, signs);
  }
}

void fill_columns(const Dataset& ds, const BinningSpec& bins,
                  std::span<const ColumnMeta> metas,
                  std::vector<std::vector<std::uint8_t>>& out) {
  out.assign(metas.size(), std::vector<std::uint8_t>(ds.n(), 0));
  for (std::size_t c = 0; c < metas.size(); ++c) {
    for (std::size_t i = 0; i < ds.n(); ++i) {
      out[c][i] = column_value(metas[c], bins, ds, i) ? 1 : 0;
    }
  }
}

}  // namespace mgam::kernels::serial
