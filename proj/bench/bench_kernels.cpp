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

// Serial vs OpenMP kernels on a MAR-injected synthetic matrix.
//   ./bench_kernels --benchmark_filter=ClassSums

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <numeric>

#include "mgam/augment.hpp"
#include "mgam/kernels.hpp"
#include "mgam/solver.hpp"
#include "mgam/synth.hpp"

namespace {

using namespace mgam;

struct Fixture {
  Dataset ds;
  BinningSpec bins;
  AugmentedMatrix x;
  std::vector<ColumnMeta> metas;
  std::vector<std::size_t> columns;
  std::vector<double> weights;
  std::vector<std::int8_t> signs;
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Fixture f;
  f.ds = gen_synthetic(n, 12, 7, "sparse_additive");
  MarSpec spec;
  spec.target_feature = 0;
  spec.conditioning_feature = 1;
  spec.rate = 0.5;
  spec.seed = 7;
  f.ds = inject_mar(f.ds, spec);
  f.bins = compute_binning(f.ds, 8);
  AugmentConfig cfg;
  cfg.dedup = false;
  f.metas = column_layout(f.bins, f.ds.n_reasons(), cfg);
  f.x = build_augmented(f.ds, f.bins, cfg);
  f.columns.resize(f.x.cols());
  std::iota(f.columns.begin(), f.columns.end(), std::size_t{0});
  f.signs = label_signs(f.ds.labels());
  f.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.weights[i] = std::exp(0.001 * double(i % 97));
  return cache.emplace(n, std::move(f)).first->second;
}

template <bool Parallel>
void BM_ClassSums(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<kernels::ClassSums> out(f.columns.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::parallel::class_sums(f.x, f.columns, f.weights, f.signs, out);
    } else {
      kernels::serial::class_sums(f.x, f.columns, f.weights, f.signs, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.columns.size()));
}

template <bool Parallel>
void BM_FillColumns(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<std::vector<std::uint8_t>> out;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::parallel::fill_columns(f.ds, f.bins, f.metas, out);
    } else {
      kernels::serial::fill_columns(f.ds, f.bins, f.metas, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.metas.size()));
}

}  // namespace

BENCHMARK(BM_ClassSums<false>)->Name("ClassSums/serial")->Arg(5000)->Arg(50000);
BENCHMARK(BM_ClassSums<true>)->Name("ClassSums/parallel")->Arg(5000)->Arg(50000);
BENCHMARK(BM_FillColumns<false>)->Name("FillColumns/serial")->Arg(5000)->Arg(50000);
BENCHMARK(BM_FillColumns<true>)->Name("FillColumns/parallel")->Arg(5000)->Arg(50000);

BENCHMARK_MAIN();
