// Copyright 2026 The Interaction Lab Authors
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

#ifndef INTERLAB_THEORY_HPP
#define INTERLAB_THEORY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/interaction.hpp"
#include "interlab/parallel.hpp"
#include "interlab/rng.hpp"
#include "interlab/subset.hpp"

namespace interlab {

namespace detail {
inline void check_theory_order(int n, int m) {
  if (n < 2 || n > kMaxPlayers) throw DomainError("player count outside [2, 64]");
  if (m < 0 || m > n - 2)
    throw DomainError("order " + std::to_string(m) + " outside [0, " + std::to_string(n - 2) + "]");
}
}  // namespace detail

/// u(m) = C(n-2, m): number of admissible contexts of an order-m interaction.
inline std::uint64_t contextual_variability(int n, int m) {
  detail::check_theory_order(n, m);
  return binomial(n - 2, m);
}

/// Normalized learning strength F(m)/F(0) = (n-m-1)/(n-1) / sqrt(u(m)).
inline double learning_strength_hat(int n, int m) {
  const double u = static_cast<double>(contextual_variability(n, m));
  return static_cast<double>(n - m - 1) / static_cast<double>(n - 1) / std::sqrt(u);
}

struct TheoryCurve {
  int n = 0;
  std::vector<int> orders;
  std::vector<double> f_hat;  // f_hat[0] == 1
};

inline TheoryCurve theory_curve(int n) {
  detail::check_theory_order(n, 0);
  TheoryCurve c;
  c.n = n;
  for (int m = 0; m <= n - 2; ++m) {
    c.orders.push_back(m);
    c.f_hat.push_back(learning_strength_hat(n, m));
  }
  return c;
}

/// F-hat of an n-player curve at fractional order t in [0, 1], where t = 1
/// is order n-2. Linear interpolation between integer orders.
inline double learning_strength_hat_at(int n, double t) {
  if (n < 3) throw DomainError("fractional theory curve needs n >= 3");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("fractional order outside [0, 1]");
  const double pos = t * static_cast<double>(n - 2);
  const int lo = std::min(static_cast<int>(std::floor(pos)), n - 3);
  const double frac = pos - lo;
  return (1.0 - frac) * learning_strength_hat(n, lo) + frac * learning_strength_hat(n, lo + 1);
}

// ---------------------------------------------------------------------------
// Gradient-field simulation

/// Synthetic gradient field: each context gradient of d(delta v)/dW is an
/// i.i.d. zero-mean Gaussian K-vector with per-coordinate std sigma.
struct GradSimConfig {
  int n = 12;
  std::size_t dims = 1000;  // K
  double sigma = 1.0;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kMaxSimulatedContexts = 1'000'000;

/// E||z|| for z ~ N(0, sigma^2 I_K): sigma sqrt(2) Gamma((K+1)/2) / Gamma(K/2).
inline double gaussian_norm_mean(std::size_t dims, double sigma) {
  const double k = static_cast<double>(dims);
  return sigma * std::sqrt(2.0) * std::exp(std::lgamma((k + 1.0) / 2.0) - std::lgamma(k / 2.0));
}

/// Coefficient of the order-m update of one ordered pair: (n-m-1)/(n(n-1)).
inline double order_update_coefficient(int n, int m) { return efficiency_weight(n, m); }

/// Monte Carlo estimate of F(m) up to the order-independent constant:
/// mean over trials of || coeff(m) / u(m) * sum_{contexts} g_S ||_2.
inline double simulate_learning_strength(const GradSimConfig& cfg, int m) {
  if (cfg.dims < 1) throw ValidationError("gradient simulation needs K >= 1");
  if (!(cfg.sigma >= 0.0)) throw ValidationError("gradient simulation needs sigma >= 0");
  if (cfg.trials < 1) throw ValidationError("gradient simulation needs at least one trial");
  const std::uint64_t u = contextual_variability(cfg.n, m);
  if (u > kMaxSimulatedContexts)
    throw GuardError("u(m)=" + std::to_string(u) + " contexts is too many to materialize; "
                     "simulate a subsampled context set instead");
  const double scale = order_update_coefficient(cfg.n, m) / static_cast<double>(u);
  const std::uint64_t order_seed = child_seed(cfg.seed, static_cast<std::uint64_t>(m));

  std::vector<double> norms(cfg.trials, 0.0);
  parallel_for(cfg.trials, [&](std::size_t t) {
    Rng rng(child_seed(order_seed, t));
    std::vector<double> acc(cfg.dims, 0.0);
    for (std::uint64_t c = 0; c < u; ++c)
      for (double& a : acc) a += cfg.sigma * rng.normal();
    double sq = 0.0;
    for (double a : acc) sq += a * a;
    norms[t] = scale * std::sqrt(sq);
  });
  double sum = 0.0;
  for (double x : norms) sum += x;
  return sum / static_cast<double>(cfg.trials);
}

/// Closed-form counterpart of simulate_learning_strength with the exact
/// Gaussian norm mean in place of the large-K approximation sqrt(K) sigma.
inline double expected_learning_strength(const GradSimConfig& cfg, int m) {
  const double u = static_cast<double>(contextual_variability(cfg.n, m));
  return order_update_coefficient(cfg.n, m) / std::sqrt(u) * gaussian_norm_mean(cfg.dims, cfg.sigma);
}

// ---------------------------------------------------------------------------
// Effective dimension

struct EffectiveFit {
  int n_prime = 0;
  double mismatch = 0.0;
};

/// Mean squared log-mismatch between the profile (normalized at order 0) and
/// the n'-player theory curve, both on the fractional axis t = m/(n-2).
/// Orders where the profile is not positive are left out.
inline double effective_n_mismatch(const OrderProfile& profile, int n_prime) {
  const int n = profile.n;
  const double j0 = profile.normalized.front();
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < profile.order_grid.size(); ++k) {
    const double j_hat = profile.normalized[k] / j0;
    if (!(j_hat > 0.0)) continue;
    const double t = static_cast<double>(profile.order_grid[k]) / static_cast<double>(n - 2);
    const double d = std::log(learning_strength_hat_at(n_prime, t)) - std::log(j_hat);
    sum += d * d;
    ++used;
  }
  return used == 0 ? std::numeric_limits<double>::infinity() : sum / static_cast<double>(used);
}

/// Grid search of n' in {3, ..., n}; ties go to the smaller n'.
inline EffectiveFit fit_effective_n(const OrderProfile& profile) {
  if (profile.degenerate) throw DomainError("cannot fit a degenerate (all-zero) profile");
  if (profile.n < 3) throw DomainError("effective-dimension fit needs n >= 3");
  if (profile.order_grid.empty() || profile.order_grid.front() != 0)
    throw DomainError("effective-dimension fit needs order 0 on the grid");
  if (!(profile.normalized.front() > 0.0))
    throw DomainError("effective-dimension fit needs a positive order-0 strength");
  EffectiveFit best{0, std::numeric_limits<double>::infinity()};
  for (int np = 3; np <= profile.n; ++np) {
    const double mis = effective_n_mismatch(profile, np);
    if (mis < best.mismatch) best = {np, mis};
  }
  return best;
}

}  // namespace interlab

#endif  // INTERLAB_THEORY_HPP
