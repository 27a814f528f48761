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

#ifndef INTERLAB_INTERACTION_HPP
#define INTERLAB_INTERACTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/game.hpp"
#include "interlab/parallel.hpp"
#include "interlab/rng.hpp"
#include "interlab/subset.hpp"

namespace interlab {

/// Multi-order interaction I^(m)(i,j) together with its sampling error.
struct InteractionEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples_used = 0;
  bool exact = false;
};

namespace detail {

inline void check_pair(int n, int i, int j) {
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw DomainError("player index outside [0, " + std::to_string(n) + ")");
  if (i == j) throw DomainError("interaction needs two distinct players, got i=j=" + std::to_string(i));
}

inline void check_interaction_order(int n, int m) {
  if (m < 0 || m > n - 2)
    throw DomainError("order " + std::to_string(m) + " outside [0, " + std::to_string(n - 2) + "]");
}

inline SubsetMask pair_context_pool(int n, int i, int j) {
  return SubsetMask::full(n).without(i).without(j);
}

}  // namespace detail

/// Change of i's marginal contribution when j joins context S:
/// [v(S+i+j) - v(S+j)] - [v(S+i) - v(S)].
///
/// Evaluated as (v(S+i+j) + v(S)) - (v(S+i) + v(S+j)), which is bit-for-bit
/// symmetric in (i, j).
template <ValueFunction V>
double delta_v(const V& v, int i, int j, const SubsetMask& s) {
  const int n = v.num_players();
  detail::check_pair(n, i, j);
  if (s.n() != n) throw DimensionError("context subset over wrong player count");
  if (s.contains(i) || s.contains(j))
    throw DomainError("context " + s.to_string() + " contains a player of the pair");
  const SubsetMask si = s.with(i);
  const SubsetMask sj = s.with(j);
  const SubsetMask sij = si.with(j);
  const double v_ij = v(sij), v_i = v(si), v_j = v(sj), v_0 = v(s);
  return (v_ij + v_0) - (v_i + v_j);
}

/// I^(m)(i,j) by enumerating every size-m context. Requires n <= 20.
template <ValueFunction V>
InteractionEstimate interaction_order_exact(const V& v, int i, int j, int m) {
  const int n = v.num_players();
  if (n > kMaxExactPlayers)
    throw GuardError("exact interaction needs n <= " + std::to_string(kMaxExactPlayers) + " (n=" +
                     std::to_string(n) + "); use the Monte Carlo estimator");
  detail::check_pair(n, i, j);
  detail::check_interaction_order(n, m);
  double sum = 0.0;
  std::uint64_t count = 0;
  for_each_subset(detail::pair_context_pool(n, i, j), m, [&](const SubsetMask& s) {
    sum += delta_v(v, i, j, s);
    ++count;
  });
  return {sum / static_cast<double>(count), 0.0, count, true};
}

struct McOptions {
  /// Enumerate instead of sampling once the budget covers every context.
  bool exhaustive_when_small = false;
};

/// Monte Carlo estimate of I^(m)(i,j) from \p num_samples uniform contexts
/// drawn with replacement. The stream depends on (seed, m) only, so (i,j)
/// and (j,i) see the same contexts and agree exactly.
template <ValueFunction V>
InteractionEstimate interaction_order_mc(const V& v, int i, int j, int m,
                                         std::uint64_t num_samples, std::uint64_t seed,
                                         McOptions options = {}) {
  const int n = v.num_players();
  detail::check_pair(n, i, j);
  detail::check_interaction_order(n, m);
  if (num_samples < 1) throw DomainError("Monte Carlo estimate needs at least one sample");
  if (options.exhaustive_when_small && n <= kMaxExactPlayers &&
      num_samples >= binomial(n - 2, m))
    return interaction_order_exact(v, i, j, m);

  const SubsetMask pool = detail::pair_context_pool(n, i, j);
  Rng rng(child_seed(seed, static_cast<std::uint64_t>(m)));
  std::vector<double> draws(num_samples);
  double sum = 0.0;
  for (auto& d : draws) {
    d = delta_v(v, i, j, sample_subset(pool, m, rng));
    sum += d;
  }
  const double count = static_cast<double>(num_samples);
  const double mean = sum / count;
  double se = 0.0;
  if (num_samples > 1) {
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  return {mean, se, num_samples, false};
}

/// I^(m)(i,j) with the exact path whenever \p budget covers all contexts.
template <ValueFunction V>
InteractionEstimate interaction_order(const V& v, int i, int j, int m, std::uint64_t budget,
                                      std::uint64_t seed) {
  return interaction_order_mc(v, i, j, m, budget, seed, McOptions{.exhaustive_when_small = true});
}

/// Aggregate interaction I(i,j): mean of I^(m)(i,j) over m = 0..n-2.
template <ValueFunction V>
double pair_interaction(const V& v, int i, int j, std::uint64_t per_order_budget,
                        std::uint64_t seed) {
  const int n = v.num_players();
  detail::check_pair(n, i, j);
  double sum = 0.0;
  for (int m = 0; m <= n - 2; ++m) sum += interaction_order(v, i, j, m, per_order_budget, seed).value;
  return sum / static_cast<double>(n - 1);
}

/// mu_i = v({i}) - v(empty).
template <ValueFunction V>
double independent_effect(const V& v, int i) {
  const int n = v.num_players();
  if (i < 0 || i >= n) throw DomainError("player index outside [0, " + std::to_string(n) + ")");
  return v(SubsetMask(n, {i})) - v(SubsetMask::empty(n));
}

/// Unordered pair (i < j) number \p index in row-major order.
inline std::pair<int, int> pair_from_index(int n, std::size_t index) {
  int i = 0;
  std::size_t row = static_cast<std::size_t>(n - 1);
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + static_cast<int>(index)};
}

/// Pairs used by order_strength: all of them when the budget covers the
/// n(n-1)/2 pairs, otherwise a seeded sample without replacement.
inline std::vector<std::pair<int, int>> select_pairs(int n, std::uint64_t pair_budget,
                                                     std::uint64_t seed) {
  if (pair_budget < 1) throw DomainError("pair budget must be at least 1");
  const std::size_t total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  std::vector<std::size_t> ids(total);
  for (std::size_t k = 0; k < total; ++k) ids[k] = k;
  if (pair_budget < total) {
    Rng rng(child_seed(seed, 0xFA12ULL));
    for (std::size_t k = 0; k < pair_budget; ++k)
      std::swap(ids[k], ids[k + rng.uniform_below(total - k)]);
    ids.resize(pair_budget);
    std::sort(ids.begin(), ids.end());
  }
  std::vector<std::pair<int, int>> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) out.push_back(pair_from_index(n, id));
  return out;
}

/// S^(m): mean |I^(m)(i,j)| over the selected pairs.
template <ValueFunction V>
double order_strength(const V& v, int m, std::uint64_t pair_budget, std::uint64_t subset_budget,
                      std::uint64_t seed) {
  const int n = v.num_players();
  detail::check_interaction_order(n, m);
  if (subset_budget < 1) throw DomainError("subset budget must be at least 1");
  const auto pairs = select_pairs(n, pair_budget, seed);
  double sum = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    sum += std::abs(interaction_order(v, i, j, m, subset_budget, child_seed(seed, p)).value);
  }
  return sum / static_cast<double>(pairs.size());
}

/// Default orders: every order 0..n-2 for n <= 20, otherwise 21 evenly
/// spaced orders round(t(n-2)/20), de-duplicated.
inline std::vector<int> default_order_grid(int n) {
  std::vector<int> grid;
  if (n <= kMaxExactPlayers) {
    for (int m = 0; m <= n - 2; ++m) grid.push_back(m);
    return grid;
  }
  for (int t = 0; t <= 20; ++t) {
    const int m = static_cast<int>(std::lround(static_cast<double>(t) * (n - 2) / 20.0));
    if (grid.empty() || grid.back() != m) grid.push_back(m);
  }
  return grid;
}

struct ProfileBudgets {
  std::uint64_t pairs = UINT64_MAX;
  std::uint64_t subsets = UINT64_MAX;
};

/// Interaction strength per order, averaged over samples and normalized.
struct OrderProfile {
  int n = 0;
  std::vector<int> order_grid;
  std::vector<double> strengths;   // S^(m) averaged over samples
  std::vector<double> normalized;  // J^(m); mean over the grid is 1
  bool degenerate = false;         // all strengths zero; normalized set to 0
  ProfileBudgets budgets;
  std::uint64_t seed = 0;
  std::size_t num_samples = 0;
};

inline void validate_grid(int n, const std::vector<int>& grid) {
  if (grid.empty()) throw DomainError("order grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    detail::check_interaction_order(n, grid[k]);
    if (k > 0 && grid[k] <= grid[k - 1]) throw DomainError("order grid must be strictly ascending");
  }
}

/// Fills normalized/degenerate from strengths.
inline void normalize_profile(OrderProfile& p) {
  double mean = 0.0;
  for (double s : p.strengths) mean += s;
  mean /= static_cast<double>(p.strengths.size());
  p.normalized.assign(p.strengths.size(), 0.0);
  p.degenerate = !(mean > 0.0);
  if (p.degenerate) return;
  for (std::size_t k = 0; k < p.strengths.size(); ++k) p.normalized[k] = p.strengths[k] / mean;
}

/// Share of the total strength carried by grid orders m with
/// lo <= m <= hi (real bounds, e.g. 0.3n and 0.7n).
inline double band_fraction(const OrderProfile& p, double lo, double hi) {
  double band = 0.0, total = 0.0;
  for (std::size_t k = 0; k < p.order_grid.size(); ++k) {
    total += p.strengths[k];
    if (p.order_grid[k] >= lo && p.order_grid[k] <= hi) band += p.strengths[k];
  }
  if (!(total > 0.0)) throw DomainError("band fraction of a degenerate profile");
  return band / total;
}

/// J^(m) over \p grid for a set of games (one per explained sample).
///
/// Each (sample, order) pair is an independent task seeded from its sample
/// index; the reduction runs in index order. When the budgets make every
/// order exact and n <= 16, each game is first materialized as a ValueTable.
template <ValueFunction V>
OrderProfile order_profile(std::span<const V> games, const std::vector<int>& grid,
                           ProfileBudgets budgets, std::uint64_t seed) {
  if (games.empty()) throw DomainError("order profile needs at least one sample");
  const int n = games.front().num_players();
  for (const auto& g : games)
    if (g.num_players() != n) throw DimensionError("games over different player counts");
  validate_grid(n, grid);

  bool all_exact = n <= 16;
  for (int m : grid) all_exact = all_exact && budgets.subsets >= binomial(n - 2, m);

  const std::size_t num_orders = grid.size();
  std::vector<double> per_task(games.size() * num_orders, 0.0);
  if (all_exact) {
    parallel_for(games.size(), [&](std::size_t x) {
      const ValueTable table(games[x]);
      const std::uint64_t sample_seed = child_seed(seed, x);
      for (std::size_t k = 0; k < num_orders; ++k)
        per_task[x * num_orders + k] =
            order_strength(table, grid[k], budgets.pairs, budgets.subsets, sample_seed);
    });
  } else {
    parallel_for(per_task.size(), [&](std::size_t t) {
      const std::size_t x = t / num_orders;
      per_task[t] = order_strength(games[x], grid[t % num_orders], budgets.pairs, budgets.subsets,
                                   child_seed(seed, x));
    });
  }

  OrderProfile p;
  p.n = n;
  p.order_grid = grid;
  p.budgets = budgets;
  p.seed = seed;
  p.num_samples = games.size();
  p.strengths.assign(num_orders, 0.0);
  for (std::size_t x = 0; x < games.size(); ++x)
    for (std::size_t k = 0; k < num_orders; ++k) p.strengths[k] += per_task[x * num_orders + k];
  for (double& s : p.strengths) s /= static_cast<double>(games.size());
  normalize_profile(p);
  return p;
}

// ---------------------------------------------------------------------------
// Efficiency decomposition
//
//   v(N) = v(empty) + sum_i mu_i + sum_m w(m) sum_{i != j} I^(m)(i,j)
//
// with the sum over ORDERED pairs and w(m) = (n-1-m) / (n(n-1)).

inline constexpr int kMaxEfficiencyPlayers = 12;

inline double efficiency_weight(int n, int m) {
  return static_cast<double>(n - 1 - m) / (static_cast<double>(n) * (n - 1));
}

struct EfficiencyReport {
  double lhs = 0.0;  // v(N)
  double reconstruction = 0.0;
  double residual = 0.0;
  std::vector<double> order_contributions;  // w(m) * sum over ordered pairs of I^(m)
  double independent_sum = 0.0;             // sum_i mu_i
  double empty_value = 0.0;                 // v(empty)
};

template <ValueFunction V>
EfficiencyReport efficiency_residual(const V& v) {
  const int n = v.num_players();
  if (n > kMaxEfficiencyPlayers)
    throw GuardError("efficiency check needs n <= " + std::to_string(kMaxEfficiencyPlayers) +
                     " (n=" + std::to_string(n) + ")");
  if (n < 2) throw DomainError("efficiency check needs at least two players");
  const ValueTable table(v);
  EfficiencyReport r;
  r.lhs = table(SubsetMask::full(n));
  r.empty_value = table(SubsetMask::empty(n));
  for (int i = 0; i < n; ++i) r.independent_sum += independent_effect(table, i);
  r.order_contributions.assign(static_cast<std::size_t>(n - 1), 0.0);
  for (int m = 0; m <= n - 2; ++m) {
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) total += interaction_order_exact(table, i, j, m).value;
    r.order_contributions[m] = efficiency_weight(n, m) * total;
  }
  r.reconstruction = r.empty_value + r.independent_sum;
  for (double c : r.order_contributions) r.reconstruction += c;
  r.residual = std::abs(r.lhs - r.reconstruction);
  return r;
}

}  // namespace interlab

#endif  // INTERLAB_INTERACTION_HPP
