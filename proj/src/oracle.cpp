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

#include "mgam/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mgam/error.hpp"

namespace mgam::oracle {

namespace {

// Dense restricted design: column 0 is the bias.
struct Problem {
  std::size_t n = 0;
  std::size_t k = 0;
  Eigen::MatrixXd z;  // n x k, entries 0/1
  Eigen::VectorXd s;  // +-1

  Problem(const AugmentedMatrix& x, std::span<const int> labels,
          std::span<const std::size_t> support)
      : n(x.rows()), k(support.size() + 1), z(x.rows(), support.size() + 1),
        s(x.rows()) {
    for (std::size_t i = 0; i < n; ++i) {
      z(i, 0) = 1.0;
      for (std::size_t q = 0; q < support.size(); ++q) {
        z(i, q + 1) = x.at(i, support[q]);
      }
      s(i) = labels[i] == 1 ? 1.0 : -1.0;
    }
  }

  Eigen::VectorXd weights(const Eigen::VectorXd& v) const {
    Eigen::VectorXd margin = (z * v).cwiseProduct(s);
    return (-margin).array().exp().matrix();
  }

  double loss(const Eigen::VectorXd& v) const {
    return weights(v).sum() / static_cast<double>(n);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
    return -(z.transpose() * w.cwiseProduct(s)) / static_cast<double>(n);
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& w) const {
    return z.transpose() * w.asDiagonal() * z / static_cast<double>(n);
  }
};

bool at_lower(double v) { return v <= -kCoefClamp; }
bool at_upper(double v) { return v >= kCoefClamp; }

double projected_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& g) {
  double norm = 0.0;
  for (Eigen::Index l = 0; l < v.size(); ++l) {
    double pg = g(l);
    if (at_lower(v(l))) pg = std::min(pg, 0.0);
    if (at_upper(v(l))) pg = std::max(pg, 0.0);
    norm = std::max(norm, std::abs(pg));
  }
  return norm;
}

Eigen::VectorXd project(Eigen::VectorXd v) {
  return v.cwiseMax(-kCoefClamp).cwiseMin(kCoefClamp);
}

// Exact minimization along coordinate l (a 0/1 column, or the bias).
void coordinate_step(const Problem& p, Eigen::VectorXd& v, Eigen::Index l) {
  const Eigen::VectorXd w = p.weights(v);
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    if (p.z(i, l) == 0.0) continue;
    const double wi = w(i) * std::exp(p.s(i) * v(l));
    if (p.s(i) > 0) {
      pos += wi;
    } else {
      neg += wi;
    }
  }
  v(l) = optimal_step(pos, neg);
}

constexpr double kGradTol = 1e-12;
constexpr int kMaxNewton = 200;

}  // namespace

std::vector<double> loss_gradient(const AugmentedMatrix& x,
                                  std::span<const int> labels,
                                  std::span<const std::size_t> support,
                                  const ModelParams& m) {
  Problem p(x, labels, support);
  Eigen::VectorXd v(p.k);
  v(0) = m.bias;
  for (std::size_t q = 0; q < support.size(); ++q) v(q + 1) = m.get(support[q]);
  const Eigen::VectorXd g = p.gradient(p.weights(v));
  return {g.data(), g.data() + g.size()};
}

RestrictedFit fit_support(const AugmentedMatrix& x, std::span<const int> labels,
                          std::span<const std::size_t> support) {
  Problem p(x, labels, support);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p.k);
  RestrictedFit out;

  auto newton = [&](int budget) {
    for (int it = 0; it < budget; ++it, ++out.iterations) {
      const Eigen::VectorXd w = p.weights(v);
      const double f = w.sum() / static_cast<double>(p.n);
      const Eigen::VectorXd g = p.gradient(w);
      if (projected_norm(v, g) < kGradTol) return;
      const Eigen::MatrixXd h = p.hessian(w);

      // Variables pinned at a bound with the gradient pointing outward stay
      // fixed; Newton runs on the rest.
      std::vector<Eigen::Index> free;
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(p.k);
      for (Eigen::Index l = 0; l < v.size(); ++l) {
        const bool pinned = (at_lower(v(l)) && g(l) > 0.0) ||
                            (at_upper(v(l)) && g(l) < 0.0);
        if (!pinned) free.push_back(l);
      }
      if (free.empty()) return;
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hf(nf, nf);
      Eigen::VectorXd gf(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        gf(a) = g(free[a]);
        for (Eigen::Index b = 0; b < nf; ++b) hf(a, b) = h(free[a], free[b]);
      }
      // Duplicate or empty columns make the Hessian singular.
      const double ridge = 1e-14 * std::max(1.0, hf.diagonal().maxCoeff());
      hf.diagonal().array() += ridge;
      const Eigen::VectorXd step = hf.ldlt().solve(-gf);
      for (Eigen::Index a = 0; a < nf; ++a) dir(free[a]) = step(a);

      double alpha = 1.0;
      bool moved = false;
      for (int halving = 0; halving < 60; ++halving, alpha *= 0.5) {
        const Eigen::VectorXd cand = project(v + alpha * dir);
        const double fc = p.loss(cand);
        if (fc < f) {
          v = cand;
          moved = true;
          break;
        }
      }
      if (!moved) return;
    }
  };

  newton(kMaxNewton);
  // Polish with exact coordinate moves, then let Newton finish.
  for (int round = 0; round < 50; ++round) {
    for (Eigen::Index l = 0; l < v.size(); ++l) coordinate_step(p, v, l);
  }
  newton(kMaxNewton);

  const Eigen::VectorXd w = p.weights(v);
  out.loss = w.sum() / static_cast<double>(p.n);
  out.projected_gradient = projected_norm(v, p.gradient(w));
  out.model.bias = v(0);
  for (std::size_t q = 0; q < support.size(); ++q) {
    out.model.set(support[q], v(q + 1));
  }
  return out;
}

ExactResult exact_fit(const AugmentedMatrix& x, std::span<const int> labels,
                      double lambda0, std::size_t max_support) {
  if (x.cols() > kMaxColumns || max_support > kMaxSupport) {
    throw Error(ErrorKind::kLimit,
                "exact_fit is limited to " + std::to_string(kMaxColumns) +
                    " columns and support " + std::to_string(kMaxSupport) +
                    "; use the coordinate-descent solver instead");
  }
  if (labels.size() != x.rows() || x.rows() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "exact_fit: bad input sizes");
  }
  ExactResult best;
  bool have = false;
  const std::size_t p = x.cols();
  std::vector<std::size_t> combo;
  for (std::size_t size = 0; size <= std::min(max_support, p); ++size) {
    combo.resize(size);
    for (std::size_t q = 0; q < size; ++q) combo[q] = q;
    while (true) {
      const auto r = fit_support(x, labels, combo);
      const double obj = r.loss + lambda0 * static_cast<double>(size);
      if (!have || obj < best.objective) {
        best.model = r.model;
        best.model.lambda0 = lambda0;
        best.support = combo;
        best.objective = obj;
        have = true;
      }
      // Next combination in lexicographic order.
      std::size_t q = size;
      while (q > 0 && combo[q - 1] == p - size + (q - 1)) --q;
      if (q == 0) break;
      ++combo[q - 1];
      for (std::size_t t = q; t < size; ++t) combo[t] = combo[t - 1] + 1;
    }
  }
  return best;
}

}  // namespace mgam::oracle
