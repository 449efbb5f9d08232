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

#include "mgam/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "mgam/error.hpp"
#include "mgam/random.hpp"

namespace mgam::theory {

Rational make_rational(std::int64_t num, std::int64_t den) {
  return Rational(BigInt(num), BigInt(den));
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << "/" << r.denominator();
  return os.str();
}

double to_double(const Rational& r) {
  return r.numerator().convert_to<double>() /
         r.denominator().convert_to<double>();
}

void Dgp1Params::validate() const {
  const Rational zero(0);
  const Rational half = make_rational(1, 2);
  if (!(zero < k2 && k2 < k1 && k1 < half)) {
    throw Error(ErrorKind::kInvalidArgument,
                "DGP1 requires 0 < k2 < k1 < 1/2 (got k1=" + to_string(k1) +
                    ", k2=" + to_string(k2) + ")");
  }
}

namespace {

Rational bern(const Rational& p, int outcome) {
  return outcome ? p : Rational(1) - p;
}

// Accuracy of the Bayes rule for Y given a discrete feature key, from the
// joint mass P(key, y). Ties predict 1.
template <typename Key>
Rational bayes_accuracy(const std::map<std::pair<Key, int>, Rational>& joint) {
  std::map<Key, std::pair<Rational, Rational>> by_key;  // (P(y=0), P(y=1))
  for (const auto& [ky, p] : joint) {
    auto& slot = by_key[ky.first];
    (ky.second ? slot.second : slot.first) += p;
  }
  Rational acc(0);
  for (const auto& [key, masses] : by_key) {
    acc += masses.second >= masses.first ? masses.second : masses.first;
  }
  return acc;
}

}  // namespace

Dgp1Result dgp1_exact(const Dgp1Params& params) {
  params.validate();
  const Rational half = make_rational(1, 2);
  std::map<std::pair<std::pair<int, int>, int>, Rational> imputed;
  std::map<std::pair<std::pair<int, int>, int>, Rational> with_missing;
  Dgp1Result out;
  for (int x1 = 0; x1 <= 1; ++x1) {
    for (int x2 = 0; x2 <= 1; ++x2) {
      for (int e1 = 0; e1 <= 1; ++e1) {
        for (int e2 = 0; e2 <= 1; ++e2) {
          const Rational p =
              half * half * bern(params.k1, e1) * bern(params.k2, e2);
          const int y = std::abs(x1 * x2 - e1);
          const int m = std::abs(y - e2);
          imputed[{{x1, x2}, y}] += p;
          with_missing[{{m, x2}, y}] += p;
          out.total_mass += p;
        }
      }
    }
  }
  out.acc_imputed = bayes_accuracy(imputed);
  out.acc_missing = bayes_accuracy(with_missing);
  return out;
}

Dgp2Result dgp2_exact() {
  const Rational half = make_rational(1, 2);
  const Rational p_e1 = make_rational(1, 12);
  const Rational p_e2 = make_rational(1, 4);
  const Rational p_e3 = make_rational(1, 11);
  Dgp2Result out;
  std::map<std::pair<std::pair<int, int>, int>, Rational> imputed;
  Rational z1_x3_0_y1(0);
  Rational z1_x3_0(0);
  for (int z = 0; z <= 1; ++z) {
    for (int e1 = 0; e1 <= 1; ++e1) {
      for (int e3 = 0; e3 <= 1; ++e3) {
        for (int mixed = 0; mixed <= 1; ++mixed) {
          for (int e2 = 0; e2 <= 1; ++e2) {
            const Rational p = half * bern(p_e1, e1) * bern(p_e3, e3) * half *
                               bern(p_e2, e2);
            const int y = std::abs(z - e1);
            const int x3 = std::abs(y - e3);
            const int m = mixed ? std::abs(y - e2) : 0;
            const int rule_imputed = z;
            const int rule_missing = m ? x3 : z * x3;
            const bool right_imp = rule_imputed == y;
            const bool right_miss = rule_missing == y;
            out.total_mass += p;
            if (right_imp) out.acc_imputed += p;
            if (right_miss) out.acc_missing += p;
            if (m == 1) {
              out.loss_delta += p * Rational(int(!right_miss) - int(!right_imp));
            } else {
              if (!right_imp && right_miss) out.gain_delta += p;
              if (right_imp && !right_miss) out.gain_delta -= p;
            }
            imputed[{{z, x3}, y}] += p;
            if (z == 1 && x3 == 0) {
              z1_x3_0 += p;
              if (y == 1) z1_x3_0_y1 += p;
            }
          }
        }
      }
    }
  }
  out.net = out.gain_delta - out.loss_delta;
  out.posterior_z1_x3_0 = z1_x3_0_y1 / z1_x3_0;
  // The Bayes rule on (Z, X3) must coincide with predicting Z.
  if (bayes_accuracy(imputed) != out.acc_imputed) {
    throw Error(ErrorKind::kInvalidArgument,
                "imputed Bayes rule does not follow Z");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Affine imputer -> M-GAM

std::vector<ColumnMeta> boolean_mgam_layout(std::size_t d, std::size_t b) {
  if (b >= d) {
    throw Error(ErrorKind::kInvalidArgument, "b must index a feature");
  }
  std::vector<ColumnMeta> metas;
  for (std::size_t j = 0; j < d; ++j) {
    metas.push_back(ColumnMeta::threshold(static_cast<std::uint32_t>(j), 0));
  }
  metas.push_back(ColumnMeta::missing(static_cast<std::uint32_t>(b), 1));
  for (std::size_t j = 0; j < d; ++j) {
    if (j == b) continue;
    metas.push_back(ColumnMeta::interaction(static_cast<std::uint32_t>(b),
                                            static_cast<std::uint32_t>(j), 0,
                                            1));
  }
  return metas;
}

namespace {

bool all_zero_except(const std::vector<double>& coef, std::size_t b) {
  for (std::size_t j = 0; j < coef.size(); ++j) {
    if (j != b && coef[j] != 0.0) return false;
  }
  return true;
}

}  // namespace

void ImputerSpec::validate() const {
  if (b >= coef.size()) {
    throw Error(ErrorKind::kInvalidArgument, "imputer: b out of range");
  }
  if (!(a > 0.0) || !(offset > 0.0) || std::abs(a + offset - 1.0) > 1e-12) {
    throw Error(ErrorKind::kInvalidArgument,
                "imputer needs a > 0, d > 0, a + d = 1");
  }
  if (score_max < score_min) {
    throw Error(ErrorKind::kInvalidArgument,
                "imputer score_max below score_min");
  }
  if (score_max == score_min && !all_zero_except(coef, b)) {
    throw Error(ErrorKind::kInvalidArgument,
                "imputer normalization is degenerate (score_max == score_min)");
  }
}

double ImputerSpec::probability(const std::vector<std::uint8_t>& x) const {
  if (score_max == score_min) return offset;
  double s = 0.0;
  for (std::size_t j = 0; j < coef.size(); ++j) {
    if (j != b && x[j]) s += coef[j];
  }
  return a * (s - score_min) / (score_max - score_min) + offset;
}

ImputerSpec make_imputer(std::size_t b, std::vector<double> coef, double a) {
  ImputerSpec imp;
  imp.b = b;
  imp.a = a;
  imp.offset = 1.0 - a;
  for (std::size_t j = 0; j < coef.size(); ++j) {
    if (j == b) continue;
    imp.score_min += std::min(coef[j], 0.0);
    imp.score_max += std::max(coef[j], 0.0);
  }
  imp.coef = std::move(coef);
  if (b < imp.coef.size()) imp.coef[b] = 0.0;
  imp.validate();
  return imp;
}

ModelParams construct_mgam_from_imputer(const ModelParams& gam,
                                        const ImputerSpec& imp) {
  imp.validate();
  const std::size_t d = imp.coef.size();
  for (const auto& [c, v] : gam.coef) {
    (void)v;
    if (c >= d) {
      throw Error(ErrorKind::kMismatch,
                  "GAM coefficient outside the boolean feature columns");
    }
  }
  ModelParams out = gam;
  const double beta_b = gam.get(imp.b);
  const bool constant = imp.score_max == imp.score_min;
  const double range = imp.score_max - imp.score_min;
  const double indicator =
      constant ? beta_b * imp.offset
               : beta_b * imp.offset - beta_b * imp.a * imp.score_min / range;
  out.set(d, indicator);
  std::size_t column = d + 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (j == imp.b) continue;
    const double alpha =
        constant ? 0.0 : imp.coef[j] * beta_b * imp.a / range;
    out.set(column++, alpha);
  }
  return out;
}

double verify_equivalence(const ModelParams& gam, const ImputerSpec& imp,
                          const ModelParams& mgam, std::size_t d) {
  if (d > kMaxEnumerationFeatures) {
    throw Error(ErrorKind::kLimit, "verify_equivalence enumerates at most 2^" +
                                       std::to_string(kMaxEnumerationFeatures) +
                                       " inputs");
  }
  if (imp.coef.size() != d) {
    throw Error(ErrorKind::kMismatch, "imputer width differs from d");
  }
  const auto layout = boolean_mgam_layout(d, imp.b);
  std::vector<std::uint8_t> row(layout.size(), 0);
  std::vector<std::uint8_t> x(d, 0);

  auto gam_score = [&](const std::vector<std::uint8_t>& bits) {
    std::fill(row.begin(), row.end(), 0);
    std::copy(bits.begin(), bits.end(), row.begin());
    return predict_score(gam, layout, row);
  };

  double worst = 0.0;
  const std::size_t total = std::size_t{1} << d;
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (std::size_t j = 0; j < d; ++j) x[j] = (mask >> j) & 1U;

    // x_b observed: both models read the same columns.
    const double g = gam_score(x);
    std::fill(row.begin(), row.end(), 0);
    std::copy(x.begin(), x.end(), row.begin());
    worst = std::max(worst, std::abs(predict_score(mgam, layout, row) - g));

    if (x[imp.b]) continue;  // the missing case depends only on x_-b
    auto hi = x;
    hi[imp.b] = 1;
    const double p = imp.probability(x);
    const double expected = p * gam_score(hi) + (1.0 - p) * gam_score(x);
    std::fill(row.begin(), row.end(), 0);
    std::copy(x.begin(), x.end(), row.begin());
    row[d] = 1;
    std::size_t column = d + 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (j == imp.b) continue;
      row[column++] = x[j];
    }
    worst = std::max(worst,
                     std::abs(predict_score(mgam, layout, row) - expected));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Report

bool TheoryReport::all_passed() const {
  return std::all_of(claims.begin(), claims.end(),
                     [](const Claim& c) { return c.passed; });
}

std::string TheoryReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : claims) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail
       << "\n";
  }
  os << (all_passed() ? "all claims hold" : "some claims FAILED") << "\n";
  return os.str();
}

namespace {

std::string show(const Rational& r) {
  std::ostringstream os;
  os << to_string(r) << " (" << to_double(r) << ")";
  return os.str();
}

// Shows r against an unreduced target fraction, e.g. "15/2112 = 5/704 (...)".
std::string show_as(const Rational& r, std::int64_t num, std::int64_t den) {
  if (r != make_rational(num, den)) return show(r);
  return std::to_string(num) + "/" + std::to_string(den) + " = " + show(r);
}

}  // namespace

TheoryReport run_theory_checks(std::uint64_t seed,
                               std::size_t imputer_trials) {
  TheoryReport report;

  {
    // k1 in {0.05, ..., 0.45}, k2 in {0.01, ..., k1 - 0.01}.
    std::size_t cases = 0;
    std::size_t bad = 0;
    std::string first_bad;
    Rational smallest_gap(1);
    for (int a = 1; a <= 9; ++a) {
      const Rational k1 = make_rational(a, 20);
      for (int b = 1; b < 5 * a; ++b) {
        const Rational k2 = make_rational(b, 100);
        const auto r = dgp1_exact({k1, k2});
        ++cases;
        const bool ok = r.total_mass == Rational(1) && r.acc_imputed == Rational(1) - k1 &&
                        r.acc_missing > r.acc_imputed &&
                        r.acc_missing >= Rational(1) - k2;
        smallest_gap = std::min(smallest_gap, r.acc_missing - r.acc_imputed);
        if (!ok && bad++ == 0) {
          first_bad = "k1=" + to_string(k1) + " k2=" + to_string(k2);
        }
      }
    }
    report.claims.push_back(
        {"dgp1 grid: acc(imputed) = 1 - k1 and acc(missing) > acc(imputed)",
         bad == 0,
         std::to_string(cases) + " (k1,k2) pairs, " + std::to_string(bad) +
             " failures" + (bad ? " first at " + first_bad : "") +
             ", smallest advantage " + show(smallest_gap)});
  }
  {
    const auto r =
        dgp1_exact({make_rational(1, 4), make_rational(1, 10)});
    report.claims.push_back(
        {"dgp1 k1=1/4 k2=1/10",
         r.acc_imputed == make_rational(3, 4) &&
             r.acc_missing >= make_rational(9, 10),
         "acc(imputed) = " + show(r.acc_imputed) +
             ", acc(missing) = " + show(r.acc_missing)});
  }
  {
    const auto r = dgp2_exact();
    report.claims.push_back({"dgp2 loss on M=1 rows = 1/528",
                             r.loss_delta == make_rational(1, 528),
                             show(r.loss_delta)});
    report.claims.push_back({"dgp2 gain on M=0 rows = 15/2112",
                             r.gain_delta == make_rational(15, 2112),
                             show_as(r.gain_delta, 15, 2112)});
    report.claims.push_back(
        {"dgp2 net improvement = 11/2112 > 0",
         r.net == make_rational(11, 2112) && r.net > Rational(0) &&
             r.net == r.acc_missing - r.acc_imputed,
         show_as(r.net, 11, 2112) + ", acc(imputed) = " + show(r.acc_imputed) +
             ", acc(missing) = " + show(r.acc_missing)});
    report.claims.push_back(
        {"dgp2 P(Y=1 | Z=1, X3=0) = 11/21",
         r.posterior_z1_x3_0 == make_rational(11, 21),
         show(r.posterior_z1_x3_0)});
    report.claims.push_back({"dgp2 joint mass = 1", r.total_mass == Rational(1),
                             show(r.total_mass)});
  }
  {
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t t = 0; t < imputer_trials; ++t) {
      const std::size_t d = 2 + rng.below(7);  // 2..8
      const std::size_t b = rng.below(d);
      ModelParams gam;
      gam.bias = rng.normal();
      for (std::size_t j = 0; j < d; ++j) gam.set(j, rng.normal());
      std::vector<double> coef(d);
      for (auto& c : coef) c = rng.normal();
      const double a = 0.05 + 0.9 * rng.uniform();
      const auto imp = make_imputer(b, coef, a);
      const auto mgam = construct_mgam_from_imputer(gam, imp);
      worst = std::max(worst, verify_equivalence(gam, imp, mgam, d));
    }
    std::ostringstream os;
    os << imputer_trials << " random GAM/imputer pairs, max deviation "
       << worst;
    report.claims.push_back({"affine imputer recovered by M-GAM (<= 1e-10)",
                             worst <= 1e-10, os.str()});
  }
  return report;
}

}  // namespace mgam::theory
