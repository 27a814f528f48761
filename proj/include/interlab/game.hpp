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

#ifndef INTERLAB_GAME_HPP
#define INTERLAB_GAME_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/parallel.hpp"
#include "interlab/rng.hpp"
#include "interlab/subset.hpp"

namespace interlab {

/// A game over players {0, ..., n-1}: v(S) for every subset S.
///
/// Implementations bind whatever sample they explain at construction and
/// must be deterministic and safe to call concurrently.
template <typename V>
concept ValueFunction = requires(const V& v, const SubsetMask& s) {
  { v.num_players() } -> std::convertible_to<int>;
  { v(s) } -> std::convertible_to<double>;
};

/// Per-variable replacement values for absent players.
struct Baseline {
  std::vector<double> values;
};

/// x with every variable outside S replaced by its baseline value.
inline std::vector<double> make_masked_input(std::span<const double> x, const SubsetMask& s,
                                             const Baseline& b) {
  if (x.size() != b.values.size() || x.size() != static_cast<std::size_t>(s.n()))
    throw DimensionError("masking: sample has " + std::to_string(x.size()) + " values, baseline " +
                         std::to_string(b.values.size()) + ", subset n=" + std::to_string(s.n()));
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    out[k] = s.contains(static_cast<int>(k)) ? x[k] : b.values[k];
  return out;
}

/// Column means of a row-major dataset.
inline Baseline compute_baseline(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("cannot compute a baseline from an empty dataset");
  const std::size_t cols = rows.front().size();
  std::vector<double> sum(cols, 0.0);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged dataset rows");
    for (std::size_t k = 0; k < cols; ++k) sum[k] += r[k];
  }
  for (double& s : sum) s /= static_cast<double>(rows.size());
  return Baseline{std::move(sum)};
}

/// Zero replacement values.
inline Baseline zero_baseline(std::size_t n) { return Baseline{std::vector<double>(n, 0.0)}; }

// ---------------------------------------------------------------------------
// Synthetic games

enum class SyntheticKind { kAdditive, kConjunction, kRandomPolynomial };

/// One monomial of a set-polynomial game: contributes coeff whenever
/// coalition is contained in S.
struct GameTerm {
  SubsetMask coalition;
  double coeff = 0.0;
};

struct SyntheticGameSpec {
  SyntheticKind kind = SyntheticKind::kAdditive;
  int n = 0;
  std::vector<double> additive;   // kAdditive: one coefficient per player
  SubsetMask coalition;           // kConjunction
  std::vector<GameTerm> terms;    // kRandomPolynomial
  int degree = 0;                 // kRandomPolynomial, informational
  std::uint64_t seed = 0;
};

/// v(S) = sum of coeff(T) over terms T contained in S.
class PolynomialGame {
 public:
  PolynomialGame(int n, std::vector<GameTerm> terms) : n_(n), terms_(std::move(terms)) {
    if (n < 2 || n > kMaxPlayers) throw ValidationError("game needs 2 <= n <= 64 players");
    for (std::size_t a = 0; a < terms_.size(); ++a) {
      if (terms_[a].coalition.n() != n) throw ValidationError("term over wrong player count");
      if (!std::isfinite(terms_[a].coeff)) throw ValidationError("non-finite term coefficient");
      for (std::size_t b = 0; b < a; ++b)
        if (terms_[a].coalition == terms_[b].coalition)
          throw ValidationError("duplicate coalition " + terms_[a].coalition.to_string());
    }
  }

  int num_players() const noexcept { return n_; }
  const std::vector<GameTerm>& terms() const noexcept { return terms_; }

  double operator()(const SubsetMask& s) const {
    double v = 0.0;
    for (const auto& t : terms_)
      if (t.coalition.is_subset_of(s)) v += t.coeff;
    return v;
  }

 private:
  int n_;
  std::vector<GameTerm> terms_;
};

/// Random set-polynomial spec: a constant term plus \p num_terms distinct
/// coalitions of size 1..degree with coefficients uniform in [-1, 1].
inline SyntheticGameSpec random_polynomial_spec(int n, int degree, std::uint64_t seed,
                                                int num_terms = 0) {
  if (n < 2 || n > kMaxPlayers) throw ValidationError("random polynomial needs 2 <= n <= 64");
  if (degree < 1 || degree > n) throw ValidationError("random polynomial degree outside [1, n]");
  if (num_terms <= 0) num_terms = 2 * n;
  Rng rng(seed);
  SyntheticGameSpec spec;
  spec.kind = SyntheticKind::kRandomPolynomial;
  spec.n = n;
  spec.degree = degree;
  spec.seed = seed;
  spec.terms.push_back({SubsetMask::empty(n), rng.uniform(-1.0, 1.0)});
  const SubsetMask all = SubsetMask::full(n);
  int attempts = 0;
  while (static_cast<int>(spec.terms.size()) < num_terms + 1 && attempts < 100 * num_terms) {
    ++attempts;
    const int size = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(degree)));
    SubsetMask c = sample_subset(all, size, rng);
    const double coeff = rng.uniform(-1.0, 1.0);
    bool dup = false;
    for (const auto& t : spec.terms) dup = dup || t.coalition == c;
    if (!dup) spec.terms.push_back({c, coeff});
  }
  return spec;
}

/// Builds the value function described by \p spec.
inline PolynomialGame synthetic_game(const SyntheticGameSpec& spec) {
  std::vector<GameTerm> terms;
  switch (spec.kind) {
    case SyntheticKind::kAdditive:
      if (static_cast<int>(spec.additive.size()) != spec.n)
        throw ValidationError("additive game needs one coefficient per player");
      for (int k = 0; k < spec.n; ++k)
        if (spec.additive[k] != 0.0) terms.push_back({SubsetMask(spec.n, {k}), spec.additive[k]});
      break;
    case SyntheticKind::kConjunction:
      if (spec.coalition.n() != spec.n || spec.coalition.size() == 0)
        throw ValidationError("conjunction game needs a non-empty coalition over n players");
      terms.push_back({spec.coalition, 1.0});
      break;
    case SyntheticKind::kRandomPolynomial:
      for (const auto& t : spec.terms)
        if (t.coalition.size() > spec.degree && spec.degree > 0)
          throw ValidationError("term " + t.coalition.to_string() + " exceeds declared degree");
      terms = spec.terms;
      break;
  }
  return PolynomialGame(spec.n, std::move(terms));
}

inline PolynomialGame additive_game(std::vector<double> coeffs) {
  SyntheticGameSpec spec;
  spec.kind = SyntheticKind::kAdditive;
  spec.n = static_cast<int>(coeffs.size());
  spec.additive = std::move(coeffs);
  return synthetic_game(spec);
}

inline PolynomialGame conjunction_game(int n, std::initializer_list<int> coalition) {
  SyntheticGameSpec spec;
  spec.kind = SyntheticKind::kConjunction;
  spec.n = n;
  spec.coalition = SubsetMask(n, coalition);
  return synthetic_game(spec);
}

// ---------------------------------------------------------------------------

/// v materialized on all 2^n subsets (n <= 20). Itself a ValueFunction, so
/// exact estimators can run on it with table lookups instead of model calls.
class ValueTable {
 public:
  template <ValueFunction V>
  explicit ValueTable(const V& v) : n_(v.num_players()) {
    if (n_ > kMaxExactPlayers)
      throw GuardError("value table needs n <= " + std::to_string(kMaxExactPlayers) +
                       ", got n=" + std::to_string(n_));
    values_.resize(std::size_t{1} << n_);
    const std::size_t count = values_.size();
    constexpr std::size_t kChunk = 256;
    parallel_for((count + kChunk - 1) / kChunk, [&](std::size_t c) {
      const std::size_t end = std::min(count, (c + 1) * kChunk);
      for (std::size_t b = c * kChunk; b < end; ++b)
        values_[b] = static_cast<double>(v(SubsetMask(n_, b)));
    });
  }

  int num_players() const noexcept { return n_; }
  double operator()(const SubsetMask& s) const { return values_[s.bits()]; }
  double at(std::uint64_t bits) const { return values_[bits]; }

 private:
  int n_;
  std::vector<double> values_;
};

}  // namespace interlab

#endif  // INTERLAB_GAME_HPP
