/**
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "otafl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "otafl/rng.hpp"

namespace otafl {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Objective in the variables s_k = sqrt(p_k / P_k) in [0, 1] and x = 1/sqrt(eta) > 0.
class Objective {
 public:
  Objective(const AggregationProfile& profile, const GradientStats& stats, const NoiseSpec& noise)
      : caps_(profile.capabilities),
        weights_(misalignment_weights(stats)),
        noise_total_(noise.total()),
        k_(static_cast<double>(profile.size())) {}

  double operator()(const std::vector<double>& s, double x) const {
    ++evaluations_;
    double individual = 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double g = s[k] * caps_[k] * x;
      individual += (g - 1.0) * (g - 1.0);
      sum += g;
    }
    return weights_.individual * individual + weights_.composite * (sum - k_) * (sum - k_) +
           noise_total_ * x * x;
  }

  // Value on aggregation levels directly.
  double on_levels(const std::vector<double>& g, double x) const {
    ++evaluations_;
    double individual = 0.0;
    double sum = 0.0;
    for (double v : g) {
      individual += (v - 1.0) * (v - 1.0);
      sum += v;
    }
    return weights_.individual * individual + weights_.composite * (sum - k_) * (sum - k_) +
           noise_total_ * x * x;
  }

  // Upper end of the search interval for x: beyond it the noise term alone
  // exceeds the objective at zero signal.
  double x_upper() const {
    const std::size_t n = caps_.size();
    double min_pos = std::numeric_limits<double>::infinity();
    for (double c : caps_) {
      if (c > 0.0) min_pos = std::min(min_pos, c);
    }
    if (noise_total_ == 0.0) return 2.0 * k_ / min_pos;
    const double zero_signal = weights_.individual * static_cast<double>(n) +
                               weights_.composite * k_ * k_;
    return 1.01 * std::sqrt(zero_signal / noise_total_);
  }

  const std::vector<double>& caps() const { return caps_; }
  const MisalignmentWeights& weights() const { return weights_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  std::vector<double> caps_;
  MisalignmentWeights weights_;
  double noise_total_;
  double k_;
  mutable std::size_t evaluations_ = 0;
};

template <typename F>
double golden_section(F&& f, double lo, double hi, std::size_t iterations) {
  double a = lo;
  double b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (std::size_t i = 0; i < iterations; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  // Endpoints can be optimal on a box constraint.
  double best = 0.5 * (a + b);
  double fbest = f(best);
  for (double cand : {lo, hi, c, d}) {
    const double fv = f(cand);
    if (fv < fbest) {
      fbest = fv;
      best = cand;
    }
  }
  return best;
}

struct Point {
  std::vector<double> s;
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

struct TaskOutcome {
  Point point;
  std::size_t evaluations = 0;
  bool exhausted = false;
};

// Projected cyclic coordinate descent with a golden-section search per coordinate.
TaskOutcome coordinate_descent(const Objective& base, Point start, const OracleOptions& opt,
                               std::size_t budget) {
  Objective f = base;
  const double x_hi = f.x_upper();
  const double x_lo = 1e-9 * x_hi;
  Point cur = std::move(start);
  cur.value = f(cur.s, cur.x);
  TaskOutcome out;
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double before = cur.value;
    for (std::size_t k = 0; k < cur.s.size(); ++k) {
      std::vector<double> trial = cur.s;
      cur.s[k] = golden_section(
          [&](double v) {
            trial[k] = v;
            return f(trial, cur.x);
          },
          0.0, 1.0, opt.golden_iterations);
    }
    cur.x = golden_section([&](double v) { return f(cur.s, v); }, x_lo, x_hi,
                           opt.golden_iterations);
    cur.value = f(cur.s, cur.x);
    if (f.evaluations() > budget) {
      out.exhausted = true;
      break;
    }
    if (before - cur.value <= 1e-15 * std::abs(before)) break;
  }
  out.point = std::move(cur);
  out.evaluations = f.evaluations();
  return out;
}

// Exact inner minimization over levels in the box [0, C_k x] by coordinate
// descent; the outer problem in x is convex, searched by golden section.
TaskOutcome nested_level_search(const Objective& base, const OracleOptions& opt,
                                std::size_t budget) {
  Objective f = base;
  const auto& caps = f.caps();
  const MisalignmentWeights w = f.weights();
  const double k = static_cast<double>(caps.size());
  const double x_hi = f.x_upper();
  const double x_lo = 1e-9 * x_hi;
  std::vector<double> g(caps.size(), 0.0);
  bool exhausted = false;

  auto inner = [&](double x) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k2 = 0; k2 < g.size(); ++k2) g[k2] = std::min(1.0, caps[k2] * x);
    double sum = 0.0;
    for (double v : g) sum += v;
    for (std::size_t sweep = 0; sweep < 200000; ++sweep) {
      double change = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double others = sum - g[j];
        double v = (w.individual + w.composite * (k - others)) / (w.individual + w.composite);
        v = std::clamp(v, 0.0, caps[j] * x);
        change = std::max(change, std::abs(v - g[j]));
        sum = others + v;
        g[j] = v;
      }
      if (change <= 1e-16) break;
    }
    return f.on_levels(g, x);
  };

  const double x_best = golden_section(
      [&](double x) {
        if (f.evaluations() > budget) exhausted = true;
        return inner(x);
      },
      x_lo, x_hi, 2 * opt.golden_iterations);
  inner(x_best);

  TaskOutcome out;
  out.point.x = x_best;
  out.point.s.resize(caps.size());
  for (std::size_t j = 0; j < caps.size(); ++j) {
    out.point.s[j] = caps[j] > 0.0 ? std::min(1.0, g[j] / (caps[j] * x_best)) : 1.0;
  }
  out.point.value = f(out.point.s, out.point.x);
  out.evaluations = f.evaluations();
  out.exhausted = exhausted;
  return out;
}

std::vector<Point> grid_seeds(const Objective& base, const OracleOptions& opt, std::size_t& evals) {
  Objective f = base;
  const std::size_t n = f.caps().size();
  const std::size_t m = std::max<std::size_t>(opt.grid_points, 2);
  const double x_hi = f.x_upper();
  std::vector<Point> best;
  std::vector<std::size_t> idx(n + 1, 0);
  std::vector<double> s(n);
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) s[j] = static_cast<double>(idx[j]) / (m - 1);
    const double x = x_hi * static_cast<double>(idx[n] + 1) / m;
    const double v = f(s, x);
    if (best.size() < opt.grid_refinements || v < best.back().value) {
      Point p{s, x, v};
      best.insert(std::upper_bound(best.begin(), best.end(), p,
                                   [](const Point& a, const Point& b) { return a.value < b.value; }),
                  std::move(p));
      if (best.size() > opt.grid_refinements) best.pop_back();
    }
    std::size_t j = 0;
    while (j <= n && ++idx[j] == m) idx[j++] = 0;
    if (j > n) break;
  }
  evals = f.evaluations();
  return best;
}

}  // namespace

OracleResult oracle_solve(const AggregationProfile& profile, const GradientStats& stats,
                          const NoiseSpec& noise, const OracleOptions& options,
                          Execution execution) {
  validate(stats);
  validate(noise);
  if (!(stats.alpha > 0.0)) throw std::invalid_argument("oracle_solve: alpha must be positive");
  if (profile.size() == 0) throw std::invalid_argument("oracle_solve: no devices");
  bool any = false;
  for (double c : profile.capabilities) any = any || c > 0.0;
  if (!any) throw std::domain_error("oracle_solve: every channel is zero");

  const Objective objective(profile, stats, noise);
  const std::size_t n = profile.size();
  const double x_hi = objective.x_upper();

  // Starting points: random restarts, then grid seeds for small K.
  std::vector<Point> starts;
  starts.reserve(options.restarts + options.grid_refinements);
  for (std::size_t r = 0; r < options.restarts; ++r) {
    Engine engine = make_engine(options.seed, r, Stream::kOracle);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point p;
    p.s.resize(n);
    for (auto& v : p.s) v = unit(engine);
    p.x = x_hi * std::pow(10.0, -3.0 * unit(engine));
    starts.push_back(std::move(p));
  }
  std::size_t grid_evals = 0;
  if (n <= 3) {
    for (auto& p : grid_seeds(objective, options, grid_evals)) starts.push_back(std::move(p));
  }

  const std::size_t tasks = starts.size() + 1;
  const std::size_t per_task = std::max<std::size_t>(options.evaluation_budget / tasks, 1);
  std::vector<TaskOutcome> outcomes(tasks);
  const auto count = static_cast<std::ptrdiff_t>(tasks);
  auto run = [&](std::ptrdiff_t t) {
    if (t == count - 1) {
      outcomes[t] = nested_level_search(objective, options, per_task);
    } else {
      outcomes[t] = coordinate_descent(objective, starts[t], options, per_task);
    }
  };
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) run(t);
  } else {
    for (std::ptrdiff_t t = 0; t < count; ++t) run(t);
  }

  OracleResult result;
  result.evaluations = grid_evals;
  const TaskOutcome* best = nullptr;
  for (const auto& o : outcomes) {
    result.evaluations += o.evaluations;
    result.budget_exhausted = result.budget_exhausted || o.exhausted;
    if (best == nullptr || o.point.value < best->point.value) best = &o;
  }
  result.budget_exhausted = result.budget_exhausted || result.evaluations > options.evaluation_budget;

  PowerSolution& sol = result.best;
  sol.eta = 1.0 / (best->point.x * best->point.x);
  sol.powers.resize(n);
  std::size_t at_peak = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = best->point.s[k];
    sol.powers[k] = s * s * profile.channels[k].peak_power;
    if (s >= 1.0 - 1e-9) ++at_peak;
  }
  sol.l_star = at_peak;
  sol.regime = stats.beta_is_infinite() ? PolicyRegime::kThreshold
               : stats.beta == 0.0      ? PolicyRegime::kFullPower
                                        : PolicyRegime::kGeneral;
  sol.mse = mse_ab(stats, sol.powers, profile.channels, sol.eta, noise);
  return result;
}

}  // namespace otafl
