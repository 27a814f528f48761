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

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "interlab/game.hpp"
#include "interlab/interaction.hpp"
#include "interlab/mlp.hpp"
#include "oracles.hpp"

namespace interlab {
namespace {

TEST(DeltaVTest, AdditiveGameHasNoInteraction) {
  const auto g = additive_game({1.5, -2, 3, 0.25, 7});
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const SubsetMask s = sample_subset(SubsetMask::full(5).without(1).without(3),
                                       static_cast<int>(rng.uniform_below(4)), rng);
    EXPECT_EQ(delta_v(g, 1, 3, s), 0.0);
  }
}

TEST(DeltaVTest, ConjunctionPair) {
  const auto g = conjunction_game(4, {0, 1});
  EXPECT_EQ(delta_v(g, 0, 1, SubsetMask::empty(4)), 1.0);
  EXPECT_EQ(delta_v(g, 1, 0, SubsetMask(4, {2, 3})), 1.0);
}

TEST(DeltaVTest, RandomPolynomialMatchesFourTermOracle) {
  const auto spec = random_polynomial_spec(6, 3, 7);
  const auto g = synthetic_game(spec);
  const auto ref = oracle::polynomial(spec.terms);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      const SubsetMask pool = SubsetMask::full(6).without(i).without(j);
      for (const auto& s : enumerate_subsets(pool, 2)) {
        const std::uint64_t b = s.bits(), bi = 1ULL << i, bj = 1ULL << j;
        const double expected = (ref(b | bi | bj) - ref(b | bj)) - (ref(b | bi) - ref(b));
        EXPECT_NEAR(delta_v(g, i, j, s), expected, 1e-14);
      }
    }
}

TEST(DeltaVTest, DomainErrors) {
  const auto g = conjunction_game(4, {0, 1});
  EXPECT_THROW(delta_v(g, 1, 1, SubsetMask::empty(4)), DomainError);
  EXPECT_THROW(delta_v(g, 0, 1, SubsetMask(4, {0})), DomainError);
  EXPECT_THROW(delta_v(g, 0, 4, SubsetMask::empty(4)), DomainError);
}

TEST(InteractionExactTest, ConjunctionAndAdditive) {
  const auto conj = conjunction_game(7, {2, 5});
  const auto add = additive_game({1, 2, 3, 4, 5, 6, 7});
  for (int m = 0; m <= 5; ++m) {
    const auto e = interaction_order_exact(conj, 2, 5, m);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_TRUE(e.exact);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_EQ(e.samples_used, binomial(5, m));
    EXPECT_EQ(interaction_order_exact(add, 0, 6, m).value, 0.0);
  }
}

TEST(InteractionExactTest, MatchesBruteForceAndClosedForm) {
  const auto spec = random_polynomial_spec(8, 4, 3);
  const auto g = synthetic_game(spec);
  const auto ref = oracle::polynomial(spec.terms);
  const auto e = interaction_order_exact(g, 1, 6, 3);
  EXPECT_EQ(e.samples_used, 20u);
  EXPECT_NEAR(e.value, oracle::interaction(ref, 8, 1, 6, 3), 1e-14);
  EXPECT_NEAR(e.value, oracle::interaction_closed_form(spec.terms, 8, 1, 6, 3), 1e-14);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      for (int m = 0; m <= 6; ++m)
        EXPECT_NEAR(interaction_order_exact(g, i, j, m).value,
                    oracle::interaction_closed_form(spec.terms, 8, i, j, m), 1e-13);
}

TEST(InteractionExactTest, SymmetricBitExact) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = synthetic_game(random_polynomial_spec(9, 5, seed));
    for (int m = 0; m <= 7; ++m)
      EXPECT_EQ(interaction_order_exact(g, 2, 7, m).value, interaction_order_exact(g, 7, 2, m).value);
  }
}

TEST(InteractionExactTest, GuardsLargeN) {
  const auto g = additive_game(std::vector<double>(21, 1.0));
  EXPECT_THROW(interaction_order_exact(g, 0, 1, 3), GuardError);
  EXPECT_THROW(interaction_order_exact(conjunction_game(5, {0, 1}), 0, 1, 4), DomainError);
}

TEST(InteractionMcTest, ConstantIntegrand) {
  const auto g = conjunction_game(12, {3, 4});
  for (int m : {0, 4, 10}) {
    const auto e = interaction_order_mc(g, 3, 4, m, 50, 17);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_FALSE(e.exact);
    EXPECT_EQ(e.samples_used, 50u);
  }
}

TEST(InteractionMcTest, ExhaustiveSwitchMatchesExact) {
  const auto g = synthetic_game(random_polynomial_spec(10, 5, 8));
  for (int m = 0; m <= 8; ++m) {
    const auto exact = interaction_order_exact(g, 0, 9, m);
    const auto mc = interaction_order_mc(g, 0, 9, m, binomial(8, m), 1, {.exhaustive_when_small = true});
    EXPECT_TRUE(mc.exact);
    EXPECT_EQ(mc.value, exact.value);
  }
}

TEST(InteractionMcTest, SymmetricWithSharedDraws) {
  const auto g = synthetic_game(random_polynomial_spec(16, 6, 4));
  for (int m : {1, 7, 13}) {
    const auto a = interaction_order_mc(g, 3, 11, m, 300, 5);
    const auto b = interaction_order_mc(g, 11, 3, m, 300, 5);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
  }
}

TEST(InteractionMcTest, DeterministicAndCoversExactValue) {
  const auto g = synthetic_game(random_polynomial_spec(12, 6, 21));
  const double exact = interaction_order_exact(g, 2, 9, 5).value;
  int covered = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto e = interaction_order_mc(g, 2, 9, 5, 2000, trial);
    EXPECT_EQ(e.value, interaction_order_mc(g, 2, 9, 5, 2000, trial).value);
    if (std::abs(e.value - exact) <= 3.0 * e.std_error) ++covered;
  }
  EXPECT_GE(covered, 99);
}

TEST(PairInteractionTest, Aggregation) {
  EXPECT_EQ(pair_interaction(conjunction_game(6, {1, 4}), 1, 4, 1000, 0), 1.0);
  EXPECT_EQ(pair_interaction(additive_game({1, 2, 3, 4}), 0, 3, 1000, 0), 0.0);
  const auto g = synthetic_game(random_polynomial_spec(8, 4, 12));
  double mean = 0.0;
  for (int m = 0; m <= 6; ++m) mean += interaction_order_exact(g, 2, 5, m).value;
  mean /= 7.0;
  EXPECT_DOUBLE_EQ(pair_interaction(g, 2, 5, UINT64_MAX, 0), mean);
}

TEST(IndependentEffectTest, Basics) {
  EXPECT_EQ(independent_effect(additive_game({2, 5}), 1), 5.0);
  EXPECT_EQ(independent_effect(conjunction_game(2, {0, 1}), 0), 0.0);
  EXPECT_THROW(independent_effect(additive_game({2, 5}), 2), DomainError);
}

TEST(IndependentEffectTest, MlpFixtureMatchesTwoForwardEvaluations) {
  const MlpModel model = mlp_init({5, 8, 2}, 31);
  const std::vector<double> x{0.5, -1.0, 2.0, 0.1, -0.3};
  const Baseline b{{0.1, 0.2, 0.3, 0.4, 0.5}};
  const MaskedModelGame game(model, x, b, 1);
  const double v_i = log_odds(forward(model, std::vector<double>{0.1, 0.2, 2.0, 0.4, 0.5}), 1);
  const double v_0 = log_odds(forward(model, b.values), 1);
  EXPECT_DOUBLE_EQ(independent_effect(game, 2), v_i - v_0);
}

TEST(PairSelectionTest, AllPairsOrSampledWithoutReplacement) {
  const auto all = select_pairs(6, 1000, 0);
  ASSERT_EQ(all.size(), 15u);
  EXPECT_EQ(all.front(), std::make_pair(0, 1));
  EXPECT_EQ(all.back(), std::make_pair(4, 5));
  const auto some = select_pairs(10, 7, 3);
  ASSERT_EQ(some.size(), 7u);
  for (std::size_t k = 1; k < some.size(); ++k) EXPECT_LT(some[k - 1], some[k]);
  EXPECT_EQ(some, select_pairs(10, 7, 3));
}

TEST(OrderStrengthTest, HandOracleAtN4) {
  // Conjunction on {0,1}: only the pair (0,1) interacts, with I = 1 at
  // every order, so the mean over the 6 pairs is 1/6.
  const auto g = conjunction_game(4, {0, 1});
  for (int m = 0; m <= 2; ++m) EXPECT_DOUBLE_EQ(order_strength(g, m, 6, 100, 0), 1.0 / 6.0);
  const auto add = additive_game({1, -1, 2, 3});
  for (int m = 0; m <= 2; ++m) EXPECT_EQ(order_strength(add, m, 6, 100, 0), 0.0);
}

TEST(OrderStrengthTest, ExhaustiveBudgetsMatchDoubleLoop) {
  const auto spec = random_polynomial_spec(8, 5, 77);
  const auto g = synthetic_game(spec);
  const auto ref = oracle::polynomial(spec.terms);
  for (int m = 0; m <= 6; ++m) {
    double sum = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) sum += std::abs(oracle::interaction(ref, 8, i, j, m));
    EXPECT_NEAR(order_strength(g, m, 28, 1000, 0), sum / 28.0, 1e-13);
  }
}

TEST(OrderProfileTest, DegenerateAdditive) {
  const std::vector<PolynomialGame> games{additive_game({1, 2, 3, 4, 5})};
  const auto p = order_profile(std::span<const PolynomialGame>(games), default_order_grid(5), {}, 0);
  EXPECT_TRUE(p.degenerate);
  for (double j : p.normalized) EXPECT_EQ(j, 0.0);
}

TEST(OrderProfileTest, ConjunctionIsFlat) {
  const std::vector<PolynomialGame> games{conjunction_game(7, {1, 2})};
  const auto p = order_profile(std::span<const PolynomialGame>(games), default_order_grid(7), {}, 0);
  EXPECT_FALSE(p.degenerate);
  for (double j : p.normalized) EXPECT_NEAR(j, 1.0, 1e-15);
}

TEST(OrderProfileTest, NormalizedMeanIsOneAndThreadCountIrrelevant) {
  std::vector<PolynomialGame> games;
  for (std::uint64_t s = 0; s < 4; ++s) games.push_back(synthetic_game(random_polynomial_spec(10, 6, s)));
  const std::vector<int> grid{0, 2, 5, 8};
  setenv("INTERACTION_LAB_THREADS", "1", 1);
  const auto serial = order_profile(std::span<const PolynomialGame>(games), grid, {20, 30}, 9);
  setenv("INTERACTION_LAB_THREADS", "4", 1);
  const auto threaded = order_profile(std::span<const PolynomialGame>(games), grid, {20, 30}, 9);
  unsetenv("INTERACTION_LAB_THREADS");
  EXPECT_EQ(serial.strengths, threaded.strengths);
  double mean = 0.0;
  for (double j : serial.normalized) mean += j;
  EXPECT_NEAR(mean / grid.size(), 1.0, 1e-12);
  for (double s : serial.strengths) EXPECT_GE(s, 0.0);
}

TEST(OrderProfileTest, TableAndDirectPathsAgree) {
  std::vector<PolynomialGame> games{synthetic_game(random_polynomial_spec(9, 4, 2))};
  const auto grid = default_order_grid(9);
  const auto via_table = order_profile(std::span<const PolynomialGame>(games), grid, {}, 0);
  // Budget one short of C(7,3) at order 3 disables the table path only there;
  // compare the other orders.
  const auto direct = order_profile(std::span<const PolynomialGame>(games), grid, {UINT64_MAX, 34}, 0);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (binomial(7, grid[k]) <= 34) {
      EXPECT_NEAR(via_table.strengths[k], direct.strengths[k], 1e-14);
    }
}

TEST(OrderProfileTest, Validation) {
  const std::vector<PolynomialGame> games{conjunction_game(5, {0, 1})};
  EXPECT_THROW(order_profile(std::span<const PolynomialGame>(games), {}, {}, 0), DomainError);
  EXPECT_THROW(order_profile(std::span<const PolynomialGame>(games), {0, 4}, {}, 0), DomainError);
  EXPECT_THROW(order_profile(std::span<const PolynomialGame>(games), {2, 1}, {}, 0), DomainError);
  EXPECT_THROW(order_profile(std::span<const PolynomialGame>(), {0}, {}, 0), DomainError);
}

TEST(DefaultGridTest, SmallAndLargeN) {
  EXPECT_EQ(default_order_grid(5), (std::vector<int>{0, 1, 2, 3}));
  const auto big = default_order_grid(40);
  EXPECT_EQ(big.size(), 21u);
  EXPECT_EQ(big.front(), 0);
  EXPECT_EQ(big.back(), 38);
  const auto tiny_steps = default_order_grid(25);  // 23 orders squeezed onto 21 points
  for (std::size_t k = 1; k < tiny_steps.size(); ++k) EXPECT_LT(tiny_steps[k - 1], tiny_steps[k]);
}

// Resolves the efficiency weights by least squares: for random games the
// unknowns w(m) satisfy v(N) - v(empty) - sum mu = sum_m w(m) * A_m, where
// A_m is the ORDERED-pair sum of I^(m). The solution must be unique and
// equal (n-1-m)/(n(n-1)).
TEST(EfficiencyTest, LeastSquaresOracleRecoversWeights) {
  for (int n = 4; n <= 8; ++n) {
    const int rows = 3 * n;
    Eigen::MatrixXd a(rows, n - 1);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
      const auto spec = random_polynomial_spec(n, n, 1000 + 37 * n + r);
      const auto ref = oracle::polynomial(spec.terms);
      const std::uint64_t full = (1ULL << n) - 1;
      double target = ref(full) - ref(0);
      for (int i = 0; i < n; ++i) target -= ref(1ULL << i) - ref(0);
      rhs(r) = target;
      for (int m = 0; m <= n - 2; ++m) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (i != j) sum += oracle::interaction(ref, n, i, j, m);
        a(r, m) = sum;
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    ASSERT_EQ(qr.rank(), n - 1) << "weights not identifiable at n=" << n;
    const Eigen::VectorXd w = qr.solve(rhs);
    for (int m = 0; m <= n - 2; ++m) {
      EXPECT_NEAR(w(m), efficiency_weight(n, m), 1e-9) << "n=" << n << " m=" << m;
      EXPECT_NEAR(w(m), (n - 1.0 - m) / (n * (n - 1.0)), 1e-9);
    }
  }
}

TEST(EfficiencyTest, AdditiveResidualExactlyZero) {
  const auto r = efficiency_residual(additive_game({1, 2, 4, 8, 16}));
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.independent_sum, 31.0);
  for (double c : r.order_contributions) EXPECT_EQ(c, 0.0);
}

TEST(EfficiencyTest, ConjunctionAndRandomGames) {
  EXPECT_LT(efficiency_residual(conjunction_game(4, {0, 1})).residual, 1e-12);
  double worst = 0.0;
  for (int n = 4; n <= 10; ++n)
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto r = efficiency_residual(synthetic_game(random_polynomial_spec(n, n, seed)));
      EXPECT_DOUBLE_EQ(r.residual, std::abs(r.lhs - r.reconstruction));
      worst = std::max(worst, r.residual / (std::abs(r.lhs) + 1.0));
    }
  EXPECT_LT(worst, 1e-9);
}

TEST(EfficiencyTest, Guard) {
  EXPECT_THROW(efficiency_residual(additive_game(std::vector<double>(13, 1.0))), GuardError);
}

}  // namespace
}  // namespace interlab
