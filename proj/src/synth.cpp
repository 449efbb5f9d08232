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

#include "mgam/synth.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "mgam/augment.hpp"
#include "mgam/error.hpp"
#include "mgam/random.hpp"

namespace mgam {

void MarSpec::validate(std::size_t d) const {
  if (target_feature >= d || conditioning_feature >= d) {
    throw Error(ErrorKind::kInvalidArgument, "MAR feature index out of range");
  }
  if (target_feature == conditioning_feature) {
    throw Error(ErrorKind::kInvalidArgument,
                "MAR target and conditioning features must differ");
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "MAR rate must lie in [0, 1]");
  }
  if (!(quantile_level >= 0.0 && quantile_level <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "MAR quantile level must lie in [0, 1]");
  }
}

MarSpec parse_mar_spec_json(const std::string& text, const Dataset& ds) {
  MarSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    auto feature = [&](const char* key) -> std::size_t {
      const auto& v = j.at(key);
      if (v.is_string()) {
        auto idx = ds.feature_index(v.get<std::string>());
        if (!idx) {
          throw Error(ErrorKind::kParse, "MAR spec: unknown feature '" +
                                             v.get<std::string>() + "'");
        }
        return *idx;
      }
      return v.get<std::size_t>();
    };
    spec.target_feature = feature("target_feature");
    spec.conditioning_feature = feature("conditioning_feature");
    spec.rate = j.at("rate").get<double>();
    spec.quantile_level = j.value("quantile_level", 0.6);
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("MAR spec: ") + e.what());
  }
  spec.validate(ds.d());
  return spec;
}

double mar_cutoff(const Dataset& ds, const MarSpec& spec) {
  std::vector<double> present;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (ds.present(i, spec.conditioning_feature)) {
      present.push_back(ds.value(i, spec.conditioning_feature));
    }
  }
  if (present.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "MAR conditioning feature is entirely missing");
  }
  std::sort(present.begin(), present.end());
  // Same lower rule as compute_binning; the epsilon keeps q * (m - 1) from
  // landing just under an integer through rounding.
  const double pos =
      spec.quantile_level * static_cast<double>(present.size() - 1);
  const auto idx = static_cast<std::size_t>(std::floor(pos + 1e-9));
  return present[std::min(idx, present.size() - 1)];
}

bool mar_eligible(const Dataset& ds, const MarSpec& spec, double cutoff,
                  std::size_t i) {
  const std::size_t j2 = spec.conditioning_feature;
  const bool high = ds.present(i, j2) && ds.value(i, j2) >= cutoff;
  return high ? ds.label(i) == 1 : ds.label(i) == 0;
}

Dataset inject_mar(const Dataset& ds, const MarSpec& spec) {
  spec.validate(ds.d());
  const double cutoff = mar_cutoff(ds, spec);
  Dataset out = ds;
  const auto code = static_cast<Reason>(ds.n_reasons() + 1);
  Rng rng(spec.seed);
  bool injected = false;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    // One draw per row keeps the stream aligned with row order.
    const double u = rng.uniform();
    if (!ds.present(i, spec.target_feature)) continue;
    if (mar_eligible(ds, spec, cutoff, i) && u < spec.rate) {
      out.set_absent(i, spec.target_feature, code);
      injected = true;
    }
  }
  if (injected) out.set_n_reasons(code);
  return out;
}

namespace {

struct StepTerm {
  std::size_t feature;
  double cut;
  double weight;
};

std::vector<StepTerm> step_terms(const std::string& dgp) {
  if (dgp == "sparse_additive" || dgp == "sparse_additive_clean") {
    return {{0, 0.0, 2.0}, {1, 0.5, -1.5}, {2, -0.5, 1.0}};
  }
  if (dgp == "uniform_additive") {
    return {{0, 0.5, 2.0}, {1, 0.7, -1.5}, {2, 0.3, 1.0}};
  }
  return {};
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

std::vector<std::string> synthetic_generators() {
  return {"null", "sparse_additive", "sparse_additive_clean",
          "uniform_additive"};
}

double synthetic_true_score(const std::string& dgp,
                            const std::vector<double>& x) {
  double score = 0.0;
  for (const auto& t : step_terms(dgp)) {
    if (t.feature >= x.size()) continue;
    // Centered so that a balanced step contributes +-weight/2.
    score += t.weight * ((x[t.feature] <= t.cut ? 1.0 : 0.0) - 0.5);
  }
  return score;
}

Dataset gen_synthetic(std::size_t n, std::size_t d, std::uint64_t seed,
                      const std::string& dgp) {
  const auto names = synthetic_generators();
  if (std::find(names.begin(), names.end(), dgp) == names.end()) {
    throw Error(ErrorKind::kInvalidArgument,
                "unknown synthetic generator '" + dgp + "'");
  }
  if (n < 1 || d < 2) {
    throw Error(ErrorKind::kInvalidArgument, "gen_synthetic needs n>=1, d>=2");
  }
  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < d; ++j) {
    feature_names.push_back("x" + std::to_string(j));
  }
  Dataset ds(feature_names, n);
  Rng rng(seed);
  const bool uniform = dgp == "uniform_additive";
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = uniform ? rng.uniform() : rng.normal();
      ds.set_value(i, j, row[j]);
    }
    const double score = synthetic_true_score(dgp, row);
    const double u = rng.uniform();
    int y = 0;
    if (dgp == "sparse_additive_clean") {
      y = score > 0.0 ? 1 : 0;
    } else {
      y = u < sigmoid(2.0 * score) ? 1 : 0;
    }
    ds.set_label(i, y);
  }

  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& t : step_terms(dgp)) {
    if (t.feature >= d) continue;
    terms.push_back({{"feature", t.feature}, {"cut", t.cut},
                     {"weight", t.weight}});
  }
  ds.metadata["generator"] = dgp;
  ds.metadata["n"] = std::to_string(n);
  ds.metadata["d"] = std::to_string(d);
  ds.metadata["seed"] = std::to_string(seed);
  ds.metadata["features"] = uniform ? "uniform(0,1)" : "normal(0,1)";
  ds.metadata["link"] = dgp == "sparse_additive_clean"
                            ? "y = 1[score > 0]"
                            : "y ~ Bernoulli(sigmoid(2 * score))";
  ds.metadata["score_terms"] = terms.dump();
  return ds;
}

}  // namespace mgam
