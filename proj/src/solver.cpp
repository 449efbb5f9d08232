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

#include "mgam/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "mgam/error.hpp"
#include "mgam/kernels.hpp"
#include "mgam/score.hpp"

namespace mgam {

void ModelParams::set(std::size_t column, double v) {
  if (v == 0.0) {
    coef.erase(column);
  } else {
    coef[column] = v;
  }
}

double ModelParams::get(std::size_t column) const {
  auto it = coef.find(column);
  return it == coef.end() ? 0.0 : it->second;
}

void FitConfig::validate() const {
  if (!(lambda0 >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "lambda0 must be >= 0");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tol must be > 0");
  if (max_sweeps < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max_sweeps must be >= 1");
  }
}

std::vector<std::int8_t> label_signs(std::span<const int> labels) {
  std::vector<std::int8_t> s(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s[i] = labels[i] == 1 ? 1 : -1;
  }
  return s;
}

double optimal_step(double w_pos, double w_neg) {
  if (w_pos == 0.0 && w_neg == 0.0) return 0.0;
  if (w_neg == 0.0) return kCoefClamp;
  if (w_pos == 0.0) return -kCoefClamp;
  return std::clamp(0.5 * std::log(w_pos / w_neg), -kCoefClamp, kCoefClamp);
}

double optimal_coef(std::span<const std::uint8_t> column,
                    std::span<const double> sample_weights,
                    std::span<const int> labels) {
  if (column.size() != sample_weights.size() ||
      column.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidArgument, "optimal_coef: size mismatch");
  }
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!column[i]) continue;
    if (labels[i] == 1) {
      pos += sample_weights[i];
    } else {
      neg += sample_weights[i];
    }
  }
  return optimal_step(pos, neg);
}

namespace {

void check_inputs(const AugmentedMatrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                "label count does not match matrix rows");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw Error(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    }
  }
}

std::vector<double> raw_scores(const ModelParams& m,
                               const AugmentedMatrix& x) {
  std::vector<double> f(x.rows(), m.bias);
  for (const auto& [c, v] : m.coef) {
    if (c >= x.cols()) {
      throw Error(ErrorKind::kMismatch, "coefficient index out of range");
    }
    for (std::uint32_t i : x.active(c)) f[i] += v;
  }
  return f;
}

double ordered_sum(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s;
}

// Mutable optimization state for one fit.
class CoordinateState {
 public:
  CoordinateState(const AugmentedMatrix& x, std::span<const int> labels,
                  const FitConfig& cfg)
      : x_(x),
        cfg_(cfg),
        n_(static_cast<double>(x.rows())),
        signs_(label_signs(labels)),
        score_(x.rows(), 0.0),
        weight_(x.rows(), 1.0),
        coef_(x.cols(), 0.0),
        in_support_(x.cols(), false) {}

  void load(const ModelParams& start) {
    bias_ = std::clamp(start.bias, -kCoefClamp, kCoefClamp);
    std::vector<std::pair<double, std::size_t>> entries;
    for (const auto& [c, v] : start.coef) {
      if (c < x_.cols() && v != 0.0) entries.push_back({std::abs(v), c});
    }
    if (entries.size() > cfg_.max_support_size) {
      std::stable_sort(entries.begin(), entries.end(),
                       [](const auto& a, const auto& b) {
                         return a.first > b.first;
                       });
      entries.resize(cfg_.max_support_size);
    }
    for (const auto& e : entries) {
      const std::size_t c = e.second;
      coef_[c] = std::clamp(start.get(c), -kCoefClamp, kCoefClamp);
      in_support_[c] = true;
      ++support_;
    }
    std::fill(score_.begin(), score_.end(), bias_);
    for (std::size_t c = 0; c < coef_.size(); ++c) {
      if (!in_support_[c]) continue;
      for (std::uint32_t i : x_.active(c)) score_[i] += coef_[c];
    }
    for (std::size_t i = 0; i < score_.size(); ++i) {
      weight_[i] = std::exp(-signs_[i] * score_[i]);
    }
  }

  void reset(const ModelParams& start) {
    std::fill(coef_.begin(), coef_.end(), 0.0);
    std::fill(in_support_.begin(), in_support_.end(), false);
    support_ = 0;
    load(start);
  }

  double objective() const {
    return ordered_sum(weight_) / n_ +
           cfg_.lambda0 * static_cast<double>(support_);
  }

  // Closed-form intercept update; returns |change|.
  double update_bias() {
    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t i = 0; i < weight_.size(); ++i) {
      if (signs_[i] > 0) {
        pos += weight_[i];
      } else {
        neg += weight_[i];
      }
    }
    const double target =
        std::clamp(bias_ + optimal_step(pos, neg), -kCoefClamp, kCoefClamp);
    const double delta = target - bias_;
    if (delta == 0.0) return 0.0;
    bias_ = target;
    for (std::size_t i = 0; i < score_.size(); ++i) {
      score_[i] += delta;
      weight_[i] = std::exp(-signs_[i] * score_[i]);
    }
    return std::abs(delta);
  }

  // Exact coordinate move on column c with the l0 entry/removal rule.
  // `sums` are the class sums of the current weights over c's rows. Returns
  // |change| of the coefficient.
  double coordinate(std::size_t c, kernels::ClassSums sums) {
    const double old = coef_[c];
    const double pos = sums.pos * std::exp(old);
    const double neg = sums.neg * std::exp(-old);
    const double step = optimal_step(pos, neg);
    const double loss_at_zero = pos + neg;
    const double loss_at_step = pos * std::exp(-step) + neg * std::exp(step);
    const double gain = (loss_at_zero - loss_at_step) / n_;
    double target = 0.0;
    if (in_support_[c]) {
      target = gain > cfg_.lambda0 ? step : 0.0;
    } else if (support_ < cfg_.max_support_size && gain > cfg_.lambda0) {
      target = step;
    }
    if (target == old) return 0.0;
    assign(c, target);
    return std::abs(target - old);
  }

  kernels::ClassSums sums(std::size_t c) const {
    return kernels::column_class_sums(x_.active(c), weight_, signs_);
  }

  // Re-optimizes every in-support coordinate, then the bias.
  double support_sweep() {
    double change = 0.0;
    for (std::size_t c = 0; c < coef_.size(); ++c) {
      if (in_support_[c]) change = std::max(change, coordinate(c, sums(c)));
    }
    return std::max(change, update_bias());
  }

  // Visits every column in order. Consecutive out-of-support columns are
  // scored in one parallel batch; after an entry the rest of the batch is
  // rescored, so the result equals a purely sequential scan.
  double full_sweep(bool& support_changed) {
    double change = 0.0;
    support_changed = false;
    const std::size_t p = coef_.size();
    std::vector<std::size_t> block;
    std::vector<kernels::ClassSums> block_sums;
    std::size_t c = 0;
    while (c < p) {
      if (in_support_[c]) {
        const double delta = coordinate(c, sums(c));
        if (!in_support_[c]) support_changed = true;
        change = std::max(change, delta);
        ++c;
        continue;
      }
      std::size_t end = c;
      while (end < p && !in_support_[end]) ++end;
      if (support_ >= cfg_.max_support_size) {
        c = end;
        continue;
      }
      block.resize(end - c);
      std::iota(block.begin(), block.end(), c);
      block_sums.resize(block.size());
      kernels::parallel::class_sums(x_, block, weight_, signs_, block_sums);
      std::size_t next = end;
      for (std::size_t q = 0; q < block.size(); ++q) {
        const double delta = coordinate(block[q], block_sums[q]);
        if (delta != 0.0) {
          support_changed = true;
          change = std::max(change, delta);
          next = block[q] + 1;
          break;
        }
      }
      c = next;
    }
    return std::max(change, update_bias());
  }

  // First-improvement pairwise swap in (in-support x out-of-support)
  // lexicographic order. Returns true when a swap was applied.
  bool swap_pass() {
    const double total = ordered_sum(weight_);
    std::vector<std::size_t> outside;
    for (std::size_t c = 0; c < coef_.size(); ++c) {
      if (!in_support_[c]) outside.push_back(c);
    }
    if (outside.empty()) return false;
    std::vector<double> w_removed;
    std::vector<kernels::ClassSums> out_sums(outside.size());
    for (std::size_t r = 0; r < coef_.size(); ++r) {
      if (!in_support_[r]) continue;
      w_removed = weight_;
      for (std::uint32_t i : x_.active(r)) {
        w_removed[i] = std::exp(-signs_[i] * (score_[i] - coef_[r]));
      }
      const double base = ordered_sum(w_removed);
      kernels::parallel::class_sums(x_, outside, w_removed, signs_, out_sums);
      for (std::size_t q = 0; q < outside.size(); ++q) {
        const auto s = out_sums[q];
        const double step = optimal_step(s.pos, s.neg);
        if (step == 0.0) continue;
        const double candidate = base - (s.pos + s.neg) +
                                 s.pos * std::exp(-step) +
                                 s.neg * std::exp(step);
        if (candidate < total * (1.0 - kSwapRelGain)) {
          assign(r, 0.0);
          const std::size_t c = outside[q];
          // Re-derive the step from the live weights so the move is exact.
          const auto live = sums(c);
          assign(c, optimal_step(live.pos, live.neg));
          update_bias();
          return true;
        }
      }
    }
    return false;
  }

  // Best-improvement search over moves that change the support, each scored
  // after a joint Newton refit. Candidates entering the support are screened
  // by their single-coordinate gain; swaps by their cheap swap score.
  // Returns true when a move was applied.
  bool refit_pass() {
    const std::size_t budget = cfg_.refit_candidates;
    if (budget == 0) return false;
    std::vector<std::size_t> inside;
    std::vector<std::size_t> outside;
    for (std::size_t c = 0; c < coef_.size(); ++c) {
      (in_support_[c] ? inside : outside).push_back(c);
    }

    // Screening scores: loss after the best single step, lower is better.
    const double total = ordered_sum(weight_);
    std::vector<kernels::ClassSums> out_sums(outside.size());
    kernels::parallel::class_sums(x_, outside, weight_, signs_, out_sums);
    std::vector<std::pair<double, std::size_t>> adds;
    for (std::size_t q = 0; q < outside.size(); ++q) {
      adds.push_back({step_loss(total, out_sums[q]), outside[q]});
    }
    std::stable_sort(adds.begin(), adds.end());
    if (adds.size() > budget) adds.resize(budget);

    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> swaps;
    std::vector<double> w_removed;
    for (std::size_t r : inside) {
      w_removed = weight_;
      for (std::uint32_t i : x_.active(r)) {
        w_removed[i] = std::exp(-signs_[i] * (score_[i] - coef_[r]));
      }
      const double base = ordered_sum(w_removed);
      kernels::parallel::class_sums(x_, outside, w_removed, signs_, out_sums);
      for (std::size_t q = 0; q < outside.size(); ++q) {
        swaps.push_back({step_loss(base, out_sums[q]), {r, outside[q]}});
      }
    }
    std::stable_sort(swaps.begin(), swaps.end());
    if (swaps.size() > 2 * budget) swaps.resize(2 * budget);

    std::vector<std::vector<std::size_t>> drops;
    std::vector<std::vector<std::size_t>> enters;
    for (std::size_t r : inside) {
      drops.push_back({r});
      enters.push_back({});
    }
    const std::size_t room = cfg_.max_support_size - support_;
    if (room >= 1) {
      for (const auto& a : adds) {
        drops.push_back({});
        enters.push_back({a.second});
      }
    }
    if (room >= 2) {
      const std::size_t k = std::min<std::size_t>(adds.size(), budget / 2 + 1);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          drops.push_back({});
          enters.push_back({adds[a].second, adds[b].second});
        }
      }
    }
    for (const auto& sw : swaps) {
      drops.push_back({sw.second.first});
      enters.push_back({sw.second.second});
    }

    // Short refits rank the moves; the best few get a full refit.
    auto trial_for = [&](std::size_t m, int steps) {
      CoordinateState trial = *this;
      for (std::size_t r : drops[m]) trial.assign(r, 0.0);
      for (std::size_t c : enters[m]) {
        const auto live = trial.sums(c);
        trial.assign(c, optimal_step(live.pos, live.neg));
      }
      trial.update_bias();
      trial.newton_polish(steps);
      return trial;
    };
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t m = 0; m < drops.size(); ++m) {
      ranked.push_back({trial_for(m, kScreenSteps).objective(), m});
    }
    std::stable_sort(ranked.begin(), ranked.end());
    if (ranked.size() > kRefitFinalists) ranked.resize(kRefitFinalists);

    const double current = objective();
    double best = current * (1.0 - kSwapRelGain);
    std::optional<ModelParams> winner;
    for (const auto& r : ranked) {
      const auto trial = trial_for(r.second, kRefitSteps);
      const double obj = trial.objective();
      if (obj < best) {
        best = obj;
        winner = trial.params();
      }
    }
    if (!winner) return false;
    reset(*winner);
    return true;
  }

  // Projected Newton steps on (bias, support) inside the coefficient box,
  // with step halving until the objective drops. Cyclic coordinate descent
  // crawls when support columns are nested or correlated; a few of these
  // steps finish the job. Returns the largest coefficient change.
  double newton_polish(int max_iter) {
    std::vector<std::size_t> support;
    for (std::size_t c = 0; c < coef_.size(); ++c) {
      if (in_support_[c]) support.push_back(c);
    }
    const std::size_t k = support.size() + 1;
    // Row -> positions (1-based, 0 is the bias) of its active support columns.
    std::vector<std::vector<std::uint32_t>> row_vars(x_.rows());
    for (std::size_t q = 0; q < support.size(); ++q) {
      for (std::uint32_t i : x_.active(support[q])) {
        row_vars[i].push_back(static_cast<std::uint32_t>(q + 1));
      }
    }
    auto value = [&](std::size_t v) {
      return v == 0 ? bias_ : coef_[support[v - 1]];
    };
    auto set_value = [&](std::size_t v, double target) {
      if (v == 0) {
        set_bias(target);
      } else {
        assign(support[v - 1], target);
      }
    };

    double moved = 0.0;
    std::vector<double> start(k);
    std::vector<double> delta(k);
    for (int iter = 0; iter < max_iter; ++iter) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      Eigen::MatrixXd h =
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                static_cast<Eigen::Index>(k));
      for (std::size_t i = 0; i < x_.rows(); ++i) {
        const double w = weight_[i];
        const double gw = -signs_[i] * w;
        g(0) += gw;
        h(0, 0) += w;
        for (std::uint32_t a : row_vars[i]) {
          g(a) += gw;
          h(0, a) += w;
          for (std::uint32_t b : row_vars[i]) {
            if (b >= a) h(a, b) += w;
          }
        }
      }
      g /= n_;
      h /= n_;
      h = h.selfadjointView<Eigen::Upper>();

      std::vector<Eigen::Index> free;
      double pg = 0.0;
      for (std::size_t v = 0; v < k; ++v) {
        const double x = value(v);
        const auto e = static_cast<Eigen::Index>(v);
        const bool pinned = (x >= kCoefClamp && g(e) < 0.0) ||
                            (x <= -kCoefClamp && g(e) > 0.0);
        if (pinned) continue;
        free.push_back(e);
        pg = std::max(pg, std::abs(g(e)));
      }
      if (free.empty() || pg < 1e-14) break;

      const auto f = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hf(f, f);
      Eigen::VectorXd gf(f);
      for (Eigen::Index a = 0; a < f; ++a) {
        gf(a) = g(free[a]);
        for (Eigen::Index b = 0; b < f; ++b) hf(a, b) = h(free[a], free[b]);
      }
      const double ridge = 1e-12 * std::max(1e-300, hf.diagonal().maxCoeff());
      hf.diagonal().array() += ridge;
      const Eigen::VectorXd dir = hf.ldlt().solve(-gf);
      if (!dir.allFinite()) break;
      // No predicted decrease worth a line search.
      if (-gf.dot(dir) <= 1e-15 * ordered_sum(weight_) / n_) break;
      const double dir_norm = dir.cwiseAbs().maxCoeff();

      for (std::size_t v = 0; v < k; ++v) start[v] = value(v);
      const double before = ordered_sum(weight_);
      // Trial losses are computed from the row deltas; only the accepted
      // step is written into the state.
      bool improved = false;
      double t = 1.0;
      for (int halving = 0; halving < 40 && t * dir_norm > 1e-12;
           ++halving, t *= 0.5) {
        std::fill(delta.begin(), delta.end(), 0.0);
        for (Eigen::Index a = 0; a < f; ++a) {
          const auto v = static_cast<std::size_t>(free[a]);
          delta[v] = std::clamp(start[v] + t * dir(a), -kCoefClamp,
                                kCoefClamp) -
                     start[v];
        }
        double trial = 0.0;
        for (std::size_t i = 0; i < x_.rows(); ++i) {
          double d = delta[0];
          for (std::uint32_t a : row_vars[i]) d += delta[a];
          trial += d == 0.0 ? weight_[i] : std::exp(-signs_[i] * (score_[i] + d));
        }
        if (trial < before) {
          improved = true;
          break;
        }
      }
      if (!improved) break;
      for (std::size_t v = 0; v < k; ++v) {
        if (delta[v] != 0.0) set_value(v, start[v] + delta[v]);
      }
      for (std::size_t v = 0; v < k; ++v) {
        moved = std::max(moved, std::abs(value(v) - start[v]));
      }
      // Rounding-level progress only from here on.
      if (before - ordered_sum(weight_) <= 1e-13 * before) break;
    }
    return moved;
  }

  ModelParams params() const {
    ModelParams m;
    m.bias = bias_;
    m.lambda0 = cfg_.lambda0;
    for (std::size_t c = 0; c < coef_.size(); ++c) {
      if (in_support_[c] && coef_[c] != 0.0) m.coef[c] = coef_[c];
    }
    return m;
  }

 private:
  static constexpr double kSwapRelGain = 1e-12;
  static constexpr int kRefitSteps = 30;
  static constexpr int kScreenSteps = 2;
  static constexpr std::size_t kRefitFinalists = 4;

  // Unnormalized loss after the best step on a column with class sums s,
  // from a base total.
  static double step_loss(double base, kernels::ClassSums s) {
    const double step = optimal_step(s.pos, s.neg);
    return base - (s.pos + s.neg) + s.pos * std::exp(-step) +
           s.neg * std::exp(step);
  }

  void set_bias(double value) {
    const double delta = value - bias_;
    if (delta == 0.0) return;
    bias_ = value;
    for (std::size_t i = 0; i < score_.size(); ++i) {
      score_[i] += delta;
      weight_[i] = std::exp(-signs_[i] * score_[i]);
    }
  }

  void assign(std::size_t c, double value) {
    const double delta = value - coef_[c];
    if (delta == 0.0) return;
    const bool was_in = in_support_[c];
    coef_[c] = value;
    in_support_[c] = value != 0.0;
    if (was_in && !in_support_[c]) --support_;
    if (!was_in && in_support_[c]) ++support_;
    for (std::uint32_t i : x_.active(c)) {
      score_[i] += delta;
      weight_[i] = std::exp(-signs_[i] * score_[i]);
    }
  }

  const AugmentedMatrix& x_;
  const FitConfig& cfg_;
  double n_;
  std::vector<std::int8_t> signs_;
  std::vector<double> score_;
  std::vector<double> weight_;
  std::vector<double> coef_;
  std::vector<bool> in_support_;
  std::size_t support_ = 0;
  double bias_ = 0.0;
};

// Coefficient movement allowed in a converged sweep.
constexpr double kCoefTol = 1e-9;
// A support that has not settled after this many coordinate sweeps gets
// Newton steps.
constexpr int kNewtonEvery = 3;
constexpr int kNewtonSteps = 8;
constexpr double kFixedPointTol = 1e-7;

}  // namespace

double exp_loss(const ModelParams& m, const AugmentedMatrix& x,
                std::span<const int> labels) {
  check_inputs(x, labels);
  if (x.rows() == 0) return 0.0;
  const auto f = raw_scores(m, x);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double margin = labels[i] == 1 ? f[i] : -f[i];
    sum += std::exp(-margin);
  }
  return sum / static_cast<double>(x.rows());
}

double objective(const ModelParams& m, const AugmentedMatrix& x,
                 std::span<const int> labels, double lambda0) {
  return exp_loss(m, x, labels) +
         lambda0 * static_cast<double>(m.support_size());
}

FitResult fit(const AugmentedMatrix& x, std::span<const int> labels,
              const FitConfig& cfg, const ModelParams* warm_start) {
  cfg.validate();
  check_inputs(x, labels);
  if (x.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "empty data");

  FitResult result;
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<long>(labels.size())) {
    result.model.bias = positives == 0 ? -kCoefClamp : kCoefClamp;
    result.model.lambda0 = cfg.lambda0;
    result.objective = objective(result.model, x, labels, cfg.lambda0);
    result.converged = true;
    result.trace.push_back(result.objective);
    result.warning = "single label class; intercept-only model";
    return result;
  }

  CoordinateState state(x, labels, cfg);
  state.load(warm_start ? *warm_start : ModelParams{});
  state.update_bias();
  double obj = state.objective();
  result.trace.push_back(obj);

  const auto converged = [&](double before, double after, double change) {
    return before - after <= cfg.tol * std::abs(before) && change <= kCoefTol;
  };

  int sweeps = 0;
  bool done = false;
  while (!done && sweeps < cfg.max_sweeps) {
    // Settle the current support.
    bool settled = false;
    int phase_sweeps = 0;
    while (sweeps < cfg.max_sweeps) {
      const double before = obj;
      double change = state.support_sweep();
      if (++phase_sweeps % kNewtonEvery == 0) {
        change = std::max(change, state.newton_polish(kNewtonSteps));
      }
      obj = state.objective();
      result.trace.push_back(obj);
      ++sweeps;
      if (converged(before, obj, change)) {
        settled = true;
        break;
      }
    }
    if (!settled || sweeps >= cfg.max_sweeps) break;

    const double before = obj;
    bool support_changed = false;
    const double change = state.full_sweep(support_changed);
    obj = state.objective();
    result.trace.push_back(obj);
    ++sweeps;
    if (support_changed || !converged(before, obj, change)) continue;

    if (!cfg.swap_search) {
      done = true;
      break;
    }
    if (sweeps >= cfg.max_sweeps) break;
    bool moved = state.swap_pass();
    if (!moved) moved = state.refit_pass();
    obj = state.objective();
    result.trace.push_back(obj);
    ++sweeps;
    if (!moved) done = true;
  }

  result.model = state.params();
  result.objective = objective(result.model, x, labels, cfg.lambda0);
  if (warm_start && done) {
    // A warm start the fit merely re-polished is returned unchanged, so a
    // local optimum is an exact fixed point of fit().
    ModelParams start = *warm_start;
    start.lambda0 = cfg.lambda0;
    bool same = start.bias == std::clamp(start.bias, -kCoefClamp, kCoefClamp) &&
                std::abs(start.bias - result.model.bias) <= kFixedPointTol &&
                start.coef.size() == result.model.coef.size();
    for (const auto& [c, v] : result.model.coef) {
      if (!same) break;
      const auto it = start.coef.find(c);
      same = it != start.coef.end() && std::abs(it->second) <= kCoefClamp &&
             std::abs(it->second - v) <= kFixedPointTol;
    }
    if (same) {
      const double start_obj = objective(start, x, labels, cfg.lambda0);
      if (start_obj <= result.objective + cfg.tol * std::abs(start_obj)) {
        result.model = start;
        result.objective = start_obj;
      }
    }
  }
  result.sweeps = sweeps;
  result.converged = done;
  return result;
}

std::vector<FitResult> fit_path(const AugmentedMatrix& x,
                                std::span<const int> labels,
                                std::span<const double> lambdas,
                                const FitConfig& cfg) {
  if (lambdas.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "lambda grid is empty");
  }
  if (!std::is_sorted(lambdas.begin(), lambdas.end(), std::greater<>())) {
    throw Error(ErrorKind::kInvalidArgument,
                "lambda grid must be sorted in descending order");
  }
  std::vector<FitResult> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    FitConfig step_cfg = cfg;
    step_cfg.lambda0 = lambda;
    const ModelParams* start = path.empty() ? nullptr : &path.back().model;
    path.push_back(fit(x, labels, step_cfg, start));
  }
  return path;
}

std::vector<double> default_lambda_grid() {
  return {20, 10, 5, 2, 1, 0.5, 0.4, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
}

double predict_score(const ModelParams& m, std::span<const ColumnMeta> metas,
                     std::span<const std::uint8_t> row) {
  if (row.size() != metas.size()) {
    throw Error(ErrorKind::kMismatch, "row width does not match the layout");
  }
  std::vector<std::pair<std::size_t, double>> coefs(m.coef.begin(),
                                                    m.coef.end());
  for (const auto& [c, v] : coefs) {
    (void)v;
    if (c >= metas.size()) {
      throw Error(ErrorKind::kMismatch, "coefficient index out of range");
    }
  }
  ScorePlan plan(metas, coefs);
  return plan.evaluate(m.bias, [&](std::size_t c) { return row[c] != 0; });
}

double predict_score(const ModelParams& m, const AugmentedMatrix& x,
                     std::size_t row) {
  return predict_score(m, x.metas(), x.row(row));
}

}  // namespace mgam
