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
#include <vector>

#include "mgam/augment.hpp"
#include "mgam/dataset.hpp"

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version; both reduce every column in ascending row order, so their
// outputs are bit-identical and either can back the deterministic solver.
namespace mgam::kernels {

// Weighted label mass of one boolean column: sums of w_i over active rows
// with label +1 and -1 respectively.
struct ClassSums {
  double pos = 0.0;
  double neg = 0.0;
};

namespace serial {

void class_sums(const AugmentedMatrix& x, std::span<const std::size_t> columns,
                std::span<const double> weights,
                std::span<const std::int8_t> signs, std::span<ClassSums> out);

void fill_columns(const Dataset& ds, const BinningSpec& bins,
                  std::span<const ColumnMeta> metas,
                  std::vector<std::vector<std::uint8_t>>& out);

}  // namespace serial

namespace parallel {

void class_sums(const AugmentedMatrix& x, std::span<const std::size_t> columns,
                std::span<const double> weights,
                std::span<const std::int8_t> signs, std::span<ClassSums> out);

void fill_columns(const Dataset& ds, const BinningSpec& bins,
                  std::span<const ColumnMeta> metas,
                  std::vector<std::vector<std::uint8_t>>& out);

}  // namespace parallel

// Sum of one column's active rows, serial over rows.
inline ClassSums column_class_sums(std::span<const std::uint32_t> active,
                                   std::span<const double> weights,
                                   std::span<const std::int8_t> signs) {
  ClassSums s;
  for (std::uint32_t i : active) {
    if (signs[i] > 0) {
      s.pos += weights[i];
    } else {
      s.neg += weights[i];
    }
  }
  return s;
}

}  // namespace mgam::kernels
