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

#ifndef INTERLAB_SUBSET_HPP
#define INTERLAB_SUBSET_HPP

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/rng.hpp"

namespace interlab {

inline constexpr int kMaxPlayers = 64;
/// Largest player count for which exact enumeration paths are allowed.
inline constexpr int kMaxExactPlayers = 20;

/// Exact binomial coefficient C(n, k); 0 when k is outside [0, n].
/// Exact for every n <= 64.
constexpr std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

/// A set of player indices drawn from {0, ..., n-1}, n <= 64.
class SubsetMask {
 public:
  SubsetMask() = default;

  explicit SubsetMask(int n, std::uint64_t bits = 0) : n_(n), bits_(bits) {
    if (n < 0 || n > kMaxPlayers)
      throw DomainError("player count " + std::to_string(n) + " outside [0, 64]");
    if (n < kMaxPlayers && (bits >> n) != 0)
      throw DomainError("subset contains an index >= n=" + std::to_string(n));
  }

  SubsetMask(int n, std::initializer_list<int> members) : SubsetMask(n) {
    for (int k : members) insert_checked(k);
  }

  static SubsetMask from_indices(int n, const std::vector<int>& members) {
    SubsetMask s(n);
    for (int k : members) s.insert_checked(k);
    return s;
  }

  static SubsetMask empty(int n) { return SubsetMask(n); }
  static SubsetMask full(int n) {
    return SubsetMask(n, n == kMaxPlayers ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  int n() const noexcept { return n_; }
  std::uint64_t bits() const noexcept { return bits_; }
  int size() const noexcept { return std::popcount(bits_); }
  bool contains(int k) const noexcept {
    return k >= 0 && k < n_ && ((bits_ >> k) & 1U) != 0;
  }

  /// Copy with index \p k added.
  SubsetMask with(int k) const {
    SubsetMask s = *this;
    s.insert_checked(k);
    return s;
  }
  /// Copy with index \p k removed.
  SubsetMask without(int k) const {
    SubsetMask s = *this;
    if (contains(k)) s.bits_ &= ~(std::uint64_t{1} << k);
    return s;
  }

  SubsetMask complement() const { return SubsetMask(n_, full(n_).bits_ & ~bits_); }

  bool is_subset_of(const SubsetMask& other) const noexcept {
    return (bits_ & ~other.bits_) == 0;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int k : members()) {
      if (!first) s += ',';
      s += std::to_string(k);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

  friend SubsetMask operator|(const SubsetMask& a, const SubsetMask& b) {
    check_same_n(a, b);
    return SubsetMask(a.n_, a.bits_ | b.bits_);
  }
  friend SubsetMask operator&(const SubsetMask& a, const SubsetMask& b) {
    check_same_n(a, b);
    return SubsetMask(a.n_, a.bits_ & b.bits_);
  }

 private:
  static void check_same_n(const SubsetMask& a, const SubsetMask& b) {
    if (a.n_ != b.n_) throw DimensionError("subsets over different player counts");
  }
  void insert_checked(int k) {
    if (k < 0 || k >= n_)
      throw DomainError("index " + std::to_string(k) + " outside [0, " + std::to_string(n_) + ")");
    bits_ |= std::uint64_t{1} << k;
  }

  int n_ = 0;
  std::uint64_t bits_ = 0;
};

namespace detail {
inline void check_order(const SubsetMask& pool, int m) {
  if (m < 0 || m > pool.size())
    throw DomainError("subset size " + std::to_string(m) + " outside [0, " +
                      std::to_string(pool.size()) + "]");
}
}  // namespace detail

/// Calls fn(S) for every size-m subset S of \p pool, in lexicographic order
/// of the member positions.
template <typename Fn>
void for_each_subset(const SubsetMask& pool, int m, Fn&& fn) {
  detail::check_order(pool, m);
  const std::vector<int> items = pool.members();
  const int p = static_cast<int>(items.size());
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) idx[k] = k;
  for (;;) {
    std::uint64_t bits = 0;
    for (int k : idx) bits |= std::uint64_t{1} << items[k];
    fn(SubsetMask(pool.n(), bits));
    int k = m - 1;
    while (k >= 0 && idx[k] == p - m + k) --k;
    if (k < 0) return;
    ++idx[k];
    for (int t = k + 1; t < m; ++t) idx[t] = idx[t - 1] + 1;
  }
}

/// All C(|pool|, m) size-m subsets of \p pool, lexicographically ordered.
inline std::vector<SubsetMask> enumerate_subsets(const SubsetMask& pool, int m) {
  std::vector<SubsetMask> out;
  detail::check_order(pool, m);
  out.reserve(binomial(pool.size(), m));
  for_each_subset(pool, m, [&](const SubsetMask& s) { out.push_back(s); });
  return out;
}

/// Uniformly random size-m subset of \p pool (partial Fisher-Yates).
inline SubsetMask sample_subset(const SubsetMask& pool, int m, Rng& rng) {
  detail::check_order(pool, m);
  std::vector<int> items = pool.members();
  const std::size_t p = items.size();
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(m); ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.uniform_below(p - k));
    std::swap(items[k], items[pick]);
    bits |= std::uint64_t{1} << items[k];
  }
  return SubsetMask(pool.n(), bits);
}

}  // namespace interlab

#endif  // INTERLAB_SUBSET_HPP
