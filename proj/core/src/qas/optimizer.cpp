// Copyright 2026 The ReplayForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "replayforge/qas/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "replayforge/common.hpp"

namespace rf::qas {

OptimizerMethod parse_optimizer(const std::string& name) {
  if (name == "nelder_mead") return OptimizerMethod::NelderMead;
  if (name == "param_shift_adam" || name == "adam") return OptimizerMethod::ParamShiftAdam;
  throw ConfigError("unknown optimizer: " + name);
}

void VqeOptimizerConfig::validate() const {
  if (max_iter <= 0) throw ConfigError("optimizer max_iter must be positive");
  if (!(initial_step > 0.0)) throw ConfigError("optimizer initial_step must be positive");
  if (!(adam_lr > 0.0)) throw ConfigError("optimizer adam_lr must be positive");
}

namespace {

struct Counted {
  const CostFunction& f;
  std::size_t calls = 0;
  double operator()(std::span<const double> x) {
    ++calls;
    const double v = f(x);
    if (!std::isfinite(v)) throw NumericError("non-finite cost during parameter search");
    return v;
  }
};

OptimizeResult nelder_mead(Counted& f, std::vector<double> x0, const VqeOptimizerConfig& cfg) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> simplex(d + 1, x0);
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += cfg.initial_step;
  for (std::size_t i = 0; i <= d; ++i) fv[i] = f(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), xr(d), xe(d), xc(d);
  auto blend = [&](std::vector<double>& out, double t, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < d; ++j) out[j] = centroid[j] + t * (worst[j] - centroid[j]);
  };

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t j = 0; j < d; ++j) size = std::max(size, std::abs(simplex[i][j] - simplex[best][j]));
    if (fv[worst] - fv[best] <= cfg.tolerance && size <= std::sqrt(cfg.tolerance)) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);
    }
    blend(xr, -1.0, simplex[worst]);
    const double fr = f(xr);
    if (fr < fv[best]) {
      blend(xe, -2.0, simplex[worst]);
      const double fe = f(xe);
      if (fe < fr) simplex[worst] = xe, fv[worst] = fe;
      else simplex[worst] = xr, fv[worst] = fr;
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr, fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    blend(xc, outside ? -0.5 : 0.5, simplex[worst]);
    const double fc = f(xc);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = xc, fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < d; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fv[i] = f(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  OptimizeResult r;
  r.thetas = simplex[best];
  r.cost = fv[best];
  r.iterations = it;
  return r;
}

OptimizeResult shift_adam(Counted& f, std::vector<double> x, const VqeOptimizerConfig& cfg) {
  const std::size_t d = x.size();
  std::vector<double> m(d, 0.0), v(d, 0.0);
  OptimizeResult r;
  r.thetas = x;
  r.cost = f(x);
  const CostFunction counted = [&](std::span<const double> p) { return f(p); };
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    const std::vector<double> g = parameter_shift_gradient(counted, x);
    double norm = 0.0;
    for (double gi : g) norm += gi * gi;
    if (std::sqrt(norm) < cfg.tolerance) break;
    const double t = it + 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      m[j] = 0.9 * m[j] + 0.1 * g[j];
      v[j] = 0.999 * v[j] + 0.001 * g[j] * g[j];
      const double mh = m[j] / (1.0 - std::pow(0.9, t));
      const double vh = v[j] / (1.0 - std::pow(0.999, t));
      x[j] -= cfg.adam_lr * mh / (std::sqrt(vh) + 1e-8);
    }
    const double c = f(x);
    if (c < r.cost) r.cost = c, r.thetas = x;
  }
  r.iterations = it;
  return r;
}

}  // namespace

std::vector<double> parameter_shift_gradient(const CostFunction& cost, std::span<const double> theta) {
  std::vector<double> x(theta.begin(), theta.end());
  std::vector<double> g(x.size());
  constexpr double s = std::numbers::pi / 2.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double orig = x[j];
    x[j] = orig + s;
    const double plus = cost(x);
    x[j] = orig - s;
    const double minus = cost(x);
    x[j] = orig;
    g[j] = 0.5 * (plus - minus);
  }
  return g;
}

OptimizeResult minimize(const CostFunction& cost, std::vector<double> theta0, const VqeOptimizerConfig& config) {
  config.validate();
  Counted f{cost};
  OptimizeResult r;
  if (theta0.empty()) {
    r.cost = f(theta0);
  } else if (config.method == OptimizerMethod::NelderMead) {
    r = nelder_mead(f, std::move(theta0), config);
  } else {
    r = shift_adam(f, std::move(theta0), config);
  }
  r.cost_calls = f.calls;
  return r;
}

}  // namespace rf::qas
