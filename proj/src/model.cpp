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

#include "mgam/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "mgam/error.hpp"
#include "mgam/score.hpp"

namespace mgam {

using ojson = nlohmann::ordered_json;

Model Model::from_params(const ModelParams& params, const AugmentedMatrix& x,
                         const BinningSpec& bins, const Dataset& train) {
  Model m;
  m.bias = params.bias;
  m.lambda0 = params.lambda0;
  for (const auto& [c, v] : params.coef) {
    if (c >= x.cols()) {
      throw Error(ErrorKind::kMismatch, "coefficient index out of range");
    }
    m.terms.push_back({x.meta(c), v});
  }
  m.bins = bins;
  m.feature_names = train.feature_names();
  m.n_reasons = train.n_reasons();
  m.overall_reason = train.overall_reason();
  return m;
}

std::vector<ColumnMeta> Model::metas() const {
  std::vector<ColumnMeta> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.meta);
  return out;
}

ModelParams Model::params() const {
  ModelParams p;
  p.bias = bias;
  p.lambda0 = lambda0;
  for (std::size_t q = 0; q < terms.size(); ++q) p.set(q, terms[q].value);
  return p;
}

std::vector<double> Model::scores(const Dataset& ds) const {
  if (ds.feature_names() != feature_names) {
    throw Error(ErrorKind::kMismatch,
                "dataset features do not match the model's features");
  }
  const auto x = build_columns(ds, bins, metas());
  std::vector<std::pair<std::size_t, double>> coefs;
  for (std::size_t q = 0; q < terms.size(); ++q) {
    coefs.push_back({q, terms[q].value});
  }
  const ScorePlan plan(x.metas(), coefs);
  std::vector<double> out(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out[i] = plan.evaluate(bias, [&](std::size_t c) { return x.at(i, c); });
  }
  return out;
}

namespace {

ojson nullable(bool has, std::uint32_t v) {
  return has ? ojson(v) : ojson(nullptr);
}

}  // namespace

std::string Model::to_json() const {
  ojson j;
  j["bias"] = bias;
  j["lambda0"] = lambda0;
  ojson coefs = ojson::array();
  for (const auto& t : terms) {
    const auto& m = t.meta;
    const bool interaction = m.kind == ColumnKind::kInteraction ||
                             m.kind == ColumnKind::kInteractionOverall;
    const bool specific =
        m.kind == ColumnKind::kMissing || m.kind == ColumnKind::kInteraction;
    ojson c;
    c["kind"] = kind_name(m.kind);
    c["j"] = m.j;
    c["jp"] = nullable(interaction, m.jp);
    c["k"] = nullable(m.has_threshold(), m.k);
    c["m"] = nullable(specific, m.m);
    if (m.has_threshold() && m.threshold_feature() < bins.d() &&
        m.k < bins.thresholds[m.threshold_feature()].size()) {
      c["threshold"] = bins.thresholds[m.threshold_feature()][m.k];
    } else {
      c["threshold"] = nullptr;
    }
    c["value"] = t.value;
    coefs.push_back(std::move(c));
  }
  j["coefficients"] = std::move(coefs);
  ojson binning;
  binning["feature_names"] = feature_names;
  binning["thresholds"] = bins.thresholds;
  binning["n_reasons"] = n_reasons;
  binning["overall_reason"] = overall_reason;
  j["binning"] = std::move(binning);
  j["label_rule"] = "score>=0->1";
  return j.dump(2) + "\n";
}

Model Model::from_json(const std::string& text) {
  Model m;
  try {
    const auto j = ojson::parse(text);
    m.bias = j.at("bias").get<double>();
    m.lambda0 = j.at("lambda0").get<double>();
    const auto& b = j.at("binning");
    m.feature_names = b.at("feature_names").get<std::vector<std::string>>();
    m.bins.thresholds =
        b.at("thresholds").get<std::vector<std::vector<double>>>();
    m.n_reasons = b.at("n_reasons").get<Reason>();
    m.overall_reason = b.at("overall_reason").get<Reason>();
    if (m.bins.d() != m.feature_names.size()) {
      throw Error(ErrorKind::kParse,
                  "model json: thresholds/feature_names length mismatch");
    }
    for (const auto& c : j.at("coefficients")) {
      ColumnMeta meta;
      meta.kind = kind_from_name(c.at("kind").get<std::string>());
      meta.j = c.at("j").get<std::uint32_t>();
      auto opt = [&](const char* key) -> std::uint32_t {
        const auto& v = c.at(key);
        return v.is_null() ? 0 : v.get<std::uint32_t>();
      };
      meta.jp = opt("jp");
      meta.k = opt("k");
      meta.m = static_cast<Reason>(opt("m"));
      m.terms.push_back({meta, c.at("value").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("model json: ") + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Shapes

double StepCurve::at(double x) const {
  auto it = std::lower_bound(thresholds.begin(), thresholds.end(), x);
  if (it == thresholds.end()) return 0.0;
  return values[static_cast<std::size_t>(it - thresholds.begin())];
}

namespace {

// Suffix sums from the highest threshold down; matches ScorePlan's order.
StepCurve make_curve(const std::vector<double>& thresholds,
                     const std::map<std::uint32_t, double>& steps) {
  StepCurve curve;
  curve.thresholds = thresholds;
  curve.values.assign(thresholds.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = thresholds.size(); k-- > 0;) {
    auto it = steps.find(static_cast<std::uint32_t>(k));
    if (it != steps.end()) acc += it->second;
    curve.values[k] = acc;
  }
  return curve;
}

bool matches(const Dataset& ds, std::size_t i, std::uint32_t feature,
             bool overall, Reason reason) {
  const Reason r = ds.reason(i, feature);
  if (r == 0) return false;
  if (overall) return true;
  return r == reason || (reason == ds.overall_reason() && reason != 0);
}

std::string feature_label(const std::vector<std::string>& names,
                          std::uint32_t j) {
  return j < names.size() ? names[j] : "feature " + std::to_string(j);
}

}  // namespace

ShapeSet export_shapes(const Model& model, const BinningSpec& bins) {
  const std::size_t d = bins.d();
  for (const auto& t : model.terms) {
    const auto& m = t.meta;
    const bool bad =
        m.j >= d ||
        (m.has_threshold() && (m.threshold_feature() >= d ||
                               m.k >= bins.thresholds[m.threshold_feature()]
                                          .size()));
    if (bad) {
      throw Error(ErrorKind::kMismatch,
                  "coefficient " + m.token() + " has no place in the binning");
    }
  }

  // feature -> part key -> (k -> value) for curves, or value for offsets.
  struct PartData {
    ColumnMeta representative;
    std::map<std::uint32_t, double> steps;
    double offset = 0.0;
  };
  std::vector<std::map<PartKey, PartData>> parts(d);
  for (const auto& t : model.terms) {
    auto& slot = parts[t.meta.target()][part_key(t.meta)];
    slot.representative = t.meta;
    if (t.meta.has_threshold()) {
      slot.steps[t.meta.k] = t.value;
    } else {
      slot.offset = t.value;
    }
  }

  ShapeSet set;
  set.bias = model.bias;
  for (std::uint32_t j = 0; j < d; ++j) {
    ShapeFunction shape;
    shape.feature = j;
    shape.name = feature_label(model.feature_names, j);
    shape.base = make_curve(bins.thresholds[j], {});
    for (const auto& [key, data] : parts[j]) {
      const auto& meta = data.representative;
      switch (meta.kind) {
        case ColumnKind::kThreshold:
          shape.base = make_curve(bins.thresholds[j], data.steps);
          break;
        case ColumnKind::kInteraction:
        case ColumnKind::kInteractionOverall: {
          ShapeAdjustment adj;
          adj.source_feature = meta.j;
          adj.overall = meta.kind == ColumnKind::kInteractionOverall;
          adj.reason = adj.overall ? 0 : meta.m;
          adj.label = "when " + feature_label(model.feature_names, meta.j) +
                      " missing (" +
                      (adj.overall ? std::string("any reason")
                                   : "reason " + std::to_string(meta.m)) +
                      ")";
          adj.curve = make_curve(bins.thresholds[j], data.steps);
          shape.adjustments.push_back(std::move(adj));
          break;
        }
        case ColumnKind::kMissing:
        case ColumnKind::kMissingOverall: {
          MissingOffset off;
          off.overall = meta.kind == ColumnKind::kMissingOverall;
          off.reason = off.overall ? 0 : meta.m;
          off.value = data.offset;
          shape.missing.push_back(off);
          break;
        }
      }
    }
    set.shapes.push_back(std::move(shape));
  }
  return set;
}

double ShapeSet::evaluate(const Dataset& ds, std::size_t i) const {
  double total = bias;
  for (const auto& shape : shapes) {
    const std::uint32_t j = shape.feature;
    double g = 0.0;
    if (ds.present(i, j)) {
      const double x = ds.value(i, j);
      g += shape.base.at(x);
      for (const auto& adj : shape.adjustments) {
        if (matches(ds, i, adj.source_feature, adj.overall, adj.reason)) {
          g += adj.curve.at(x);
        }
      }
    } else {
      for (const auto& off : shape.missing) {
        if (matches(ds, i, j, off.overall, off.reason)) g += off.value;
      }
    }
    total += g;
  }
  return total;
}

namespace {

ojson curve_json(const StepCurve& c) {
  ojson steps = ojson::array();
  for (std::size_t k = 0; k < c.thresholds.size(); ++k) {
    steps.push_back({{"threshold", c.thresholds[k]}, {"value", c.values[k]}});
  }
  return steps;
}

StepCurve curve_from_json(const ojson& steps) {
  StepCurve c;
  for (const auto& s : steps) {
    c.thresholds.push_back(s.at("threshold").get<double>());
    c.values.push_back(s.at("value").get<double>());
  }
  return c;
}

}  // namespace

std::string ShapeSet::to_json() const {
  ojson j;
  j["bias"] = bias;
  j["note"] = "step value applies for x <= threshold down to the previous "
              "threshold; 0 above the last threshold";
  ojson arr = ojson::array();
  for (const auto& s : shapes) {
    ojson sj;
    sj["feature"] = s.feature;
    sj["name"] = s.name;
    sj["steps"] = curve_json(s.base);
    ojson missing = ojson::array();
    for (const auto& m : s.missing) {
      missing.push_back({{"reason", m.overall ? ojson("any") : ojson(m.reason)},
                         {"value", m.value}});
    }
    sj["missing"] = std::move(missing);
    ojson adjs = ojson::array();
    for (const auto& a : s.adjustments) {
      adjs.push_back(
          {{"source_feature", a.source_feature},
           {"reason", a.overall ? ojson("any") : ojson(a.reason)},
           {"label", a.label},
           {"steps", curve_json(a.curve)}});
    }
    sj["adjustments"] = std::move(adjs);
    arr.push_back(std::move(sj));
  }
  j["shapes"] = std::move(arr);
  return j.dump(2) + "\n";
}

ShapeSet ShapeSet::from_json(const std::string& text) {
  ShapeSet set;
  try {
    const auto j = ojson::parse(text);
    set.bias = j.at("bias").get<double>();
    auto reason_of = [](const ojson& r, bool& overall) -> Reason {
      overall = r.is_string();
      return overall ? 0 : r.get<Reason>();
    };
    for (const auto& sj : j.at("shapes")) {
      ShapeFunction s;
      s.feature = sj.at("feature").get<std::uint32_t>();
      s.name = sj.at("name").get<std::string>();
      s.base = curve_from_json(sj.at("steps"));
      for (const auto& mj : sj.at("missing")) {
        MissingOffset m;
        m.reason = reason_of(mj.at("reason"), m.overall);
        m.value = mj.at("value").get<double>();
        s.missing.push_back(m);
      }
      for (const auto& aj : sj.at("adjustments")) {
        ShapeAdjustment a;
        a.source_feature = aj.at("source_feature").get<std::uint32_t>();
        a.reason = reason_of(aj.at("reason"), a.overall);
        a.label = aj.at("label").get<std::string>();
        a.curve = curve_from_json(aj.at("steps"));
        s.adjustments.push_back(std::move(a));
      }
      set.shapes.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("shape json: ") + e.what());
  }
  return set;
}

std::string ShapeSet::to_csv() const {
  std::string out = "feature,name,curve,source,reason,threshold,value\n";
  const auto row = [&](const ShapeFunction& s, const std::string& curve,
                       const std::string& source, const std::string& reason,
                       const std::string& threshold, double value) {
    out += std::to_string(s.feature) + "," + s.name + "," + curve + "," +
           source + "," + reason + "," + threshold + "," +
           format_double(value) + "\n";
  };
  for (const auto& s : shapes) {
    for (std::size_t k = 0; k < s.base.thresholds.size(); ++k) {
      row(s, "base", "", "", format_double(s.base.thresholds[k]),
          s.base.values[k]);
    }
    for (const auto& m : s.missing) {
      row(s, "missing", "",
          m.overall ? "any" : std::to_string(m.reason), "", m.value);
    }
    for (const auto& a : s.adjustments) {
      for (std::size_t k = 0; k < a.curve.thresholds.size(); ++k) {
        row(s, "adjustment", std::to_string(a.source_feature),
            a.overall ? "any" : std::to_string(a.reason),
            format_double(a.curve.thresholds[k]), a.curve.values[k]);
      }
    }
  }
  return out;
}

}  // namespace mgam
