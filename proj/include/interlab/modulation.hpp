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

#ifndef INTERLAB_MODULATION_HPP
#define INTERLAB_MODULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/game.hpp"
#include "interlab/interaction.hpp"
#include "interlab/mlp.hpp"
#include "interlab/rng.hpp"
#include "interlab/subset.hpp"

namespace interlab {

enum class ModulationKind { kEncourage, kSuppress };

/// One L+ (encourage) or L- (suppress) term of the training objective.
struct ModulationSpec {
  ModulationKind kind = ModulationKind::kEncourage;
  double r1 = 0.3;
  double r2 = 0.7;
  double lambda = 1.0;
  std::uint64_t pair_samples = 4;
  std::uint64_t seed = 0;
};

/// Integer subset sizes of an order band and the coefficient on v(S1).
///
/// Sizes are round-half-up of r * n. The coefficient is s2/s1, which equals
/// r2/r1 whenever r * n is integral; with s1 = 0 it is 1, so the signal
/// becomes E[v(S2)] - v(empty).
struct BandSizes {
  int s1 = 0;
  int s2 = 0;
  double ratio = 1.0;
};

inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

inline BandSizes band_sizes(int n, double r1, double r2) {
  if (!(r1 >= 0.0 && r2 <= 1.0 && r1 < r2))
    throw ValidationError("order band needs 0 <= r1 < r2 <= 1");
  BandSizes b;
  b.s1 = round_half_up(r1 * n);
  b.s2 = round_half_up(r2 * n);
  if (!(b.s1 < b.s2 && b.s2 <= n))
    throw ValidationError("band (" + std::to_string(r1) + ", " + std::to_string(r2) +
                          ") collapses to sizes s1=" + std::to_string(b.s1) +
                          ", s2=" + std::to_string(b.s2) + " at n=" + std::to_string(n));
  b.ratio = b.s1 == 0 ? 1.0 : static_cast<double>(b.s2) / b.s1;
  return b;
}

inline void validate_spec(const ModulationSpec& spec, int n) {
  band_sizes(n, spec.r1, spec.r2);
  if (!(spec.lambda >= 0.0)) throw ValidationError("modulation lambda must be >= 0");
  if (spec.pair_samples < 1) throw ValidationError("modulation needs pair_samples >= 1");
}

/// Weight of I^(m)(i,j) (per ordered pair) in the decomposition of
/// delta u(r1, r2):
///   (s2/s1 - 1)(m+1) / (n(n-1))   for m <= s1 - 2
///   (s2 - m - 1) / (n(n-1))       for s1 - 2 < m <= s2 - 2
///   0                             above.
inline double theorem2_weight(int n, double r1, double r2, int m) {
  if (r1 <= 0.0)
    throw DomainError("band weights are undefined at r1 = 0; delta_u uses E[v(S2)] - v(empty) there");
  if (m < 0 || m > n - 2)
    throw DomainError("order " + std::to_string(m) + " outside [0, " + std::to_string(n - 2) + "]");
  const BandSizes b = band_sizes(n, r1, r2);
  const double denom = static_cast<double>(n) * (n - 1);
  if (m <= b.s1 - 2) return (b.ratio - 1.0) * (m + 1) / denom;
  if (m <= b.s2 - 2) return static_cast<double>(b.s2 - m - 1) / denom;
  return 0.0;
}

struct OrderWeights {
  int n = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  std::vector<double> weights;  // m = 0..n-2
};

inline OrderWeights order_weights(int n, double r1, double r2) {
  OrderWeights w{n, r1, r2, {}};
  for (int m = 0; m <= n - 2; ++m) w.weights.push_back(theorem2_weight(n, r1, r2, m));
  return w;
}

/// One (S1, S2) draw: S2 uniform of size s2, S1 uniform of size s1 inside S2.
struct SubsetPair {
  SubsetMask inner;  // S1
  SubsetMask outer;  // S2
};

inline std::vector<SubsetPair> sample_subset_pairs(int n, const BandSizes& b, std::uint64_t count,
                                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SubsetPair> pairs;
  pairs.reserve(count);
  const SubsetMask all = SubsetMask::full(n);
  for (std::uint64_t k = 0; k < count; ++k) {
    SubsetMask outer = sample_subset(all, b.s2, rng);
    SubsetMask inner = sample_subset(outer, b.s1, rng);
    pairs.push_back({inner, outer});
  }
  return pairs;
}

inline constexpr int kMaxExactDeltaUPlayers = 14;

/// Exact delta u by enumeration. Because every S1 of size s1 lies in the
/// same number of S2, the pair expectation splits into
/// E_{|S2|=s2} v(S2) - ratio * E_{|S1|=s1} v(S1).
template <ValueFunction V>
double delta_u_exact(const V& v, double r1, double r2) {
  const int n = v.num_players();
  if (n > kMaxExactDeltaUPlayers)
    throw GuardError("exact delta u needs n <= " + std::to_string(kMaxExactDeltaUPlayers));
  const BandSizes b = band_sizes(n, r1, r2);
  auto mean_at = [&](int size) {
    double sum = 0.0;
    std::uint64_t count = 0;
    for_each_subset(SubsetMask::full(n), size, [&](const SubsetMask& s) {
      sum += v(s);
      ++count;
    });
    return sum / static_cast<double>(count);
  };
  return mean_at(b.s2) - b.ratio * mean_at(b.s1);
}

/// Sampled delta u over \p pair_samples (S1, S2) draws.
template <ValueFunction V>
double delta_u(const V& v, double r1, double r2, std::uint64_t pair_samples, std::uint64_t seed) {
  if (pair_samples < 1) throw DomainError("delta u needs pair_samples >= 1");
  const int n = v.num_players();
  const BandSizes b = band_sizes(n, r1, r2);
  double sum = 0.0;
  for (const auto& p : sample_subset_pairs(n, b, pair_samples, seed))
    sum += v(p.outer) - b.ratio * v(p.inner);
  return sum / static_cast<double>(pair_samples);
}

/// Reconstruction of delta u from exact interactions:
/// (1 - ratio) v(empty) + sum_m w(m) sum_{i != j} I^(m)(i,j).
template <ValueFunction V>
double delta_u_reconstruction(const V& v, double r1, double r2, bool ordered_pairs = true) {
  const int n = v.num_players();
  const BandSizes b = band_sizes(n, r1, r2);
  const ValueTable table(v);
  double total = (1.0 - b.ratio) * table(SubsetMask::empty(n));
  for (int m = 0; m <= n - 2; ++m) {
    const double w = theorem2_weight(n, r1, r2, m);
    if (w == 0.0) continue;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) sum += interaction_order_exact(table, i, j, m).value;
    total += w * (ordered_pairs ? 2.0 * sum : sum);
  }
  return total;
}

inline constexpr int kMaxTheorem2Players = 10;

struct Theorem2Report {
  double max_residual = 0.0;            // ordered-pair convention
  double max_residual_unordered = 0.0;  // for comparison only
  std::size_t games = 0;
};

/// Exact delta u versus its interaction reconstruction on random polynomial
/// games of degree up to n.
inline Theorem2Report verify_theorem2(int n, double r1, double r2, std::size_t num_games,
                                      std::uint64_t seed) {
  if (n > kMaxTheorem2Players)
    throw GuardError("band identity check needs n <= " + std::to_string(kMaxTheorem2Players));
  if (r1 <= 0.0) throw DomainError("band identity check needs r1 > 0");
  Theorem2Report report;
  report.games = num_games;
  for (std::size_t g = 0; g < num_games; ++g) {
    const auto game = synthetic_game(random_polynomial_spec(n, n, child_seed(seed, g)));
    const double exact = delta_u_exact(game, r1, r2);
    report.max_residual =
        std::max(report.max_residual, std::abs(exact - delta_u_reconstruction(game, r1, r2, true)));
    report.max_residual_unordered = std::max(
        report.max_residual_unordered, std::abs(exact - delta_u_reconstruction(game, r1, r2, false)));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Losses

/// Non-owning view of labelled rows.
struct Batch {
  std::vector<std::span<const double>> inputs;
  std::vector<int> labels;

  std::size_t size() const noexcept { return inputs.size(); }
};

namespace detail {

inline void check_batch(const MlpModel& model, const Batch& batch) {
  if (batch.size() == 0) throw DomainError("loss needs a non-empty batch");
  if (batch.labels.size() != batch.inputs.size()) throw DimensionError("batch labels/inputs differ in length");
  for (int y : batch.labels)
    if (y < 0 || y >= model.num_classes()) throw DomainError("label outside [0, num_classes)");
}

inline void check_finite(double loss, const char* what) {
  if (!std::isfinite(loss)) throw NumericError(std::string("non-finite ") + what);
}

}  // namespace detail

/// Per-class band logits delta u_c for one input, sharing the same (S1, S2)
/// draws across classes. Optionally back-propagates weight * dL/d(delta u).
class BandLogits {
 public:
  BandLogits(const MlpModel& model, std::span<const double> x, const Baseline& baseline,
             const BandSizes& band, std::vector<SubsetPair> pairs)
      : model_(&model), band_(band), pairs_(std::move(pairs)) {
    const std::size_t classes = static_cast<std::size_t>(model.num_classes());
    values_.assign(classes, 0.0);
    outer_.resize(pairs_.size());
    inner_.resize(pairs_.size());
    const double inv = 1.0 / static_cast<double>(pairs_.size());
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto z2 = masked_forward(model, x, pairs_[p].outer, baseline, &outer_[p]);
      const auto z1 = masked_forward(model, x, pairs_[p].inner, baseline, &inner_[p]);
      for (std::size_t c = 0; c < classes; ++c) values_[c] += inv * (z2[c] - band.ratio * z1[c]);
    }
  }

  const std::vector<double>& values() const noexcept { return values_; }

  void backward(std::span<const double> grad_values, MlpGradient& grad, double weight) const {
    const double inv = weight / static_cast<double>(pairs_.size());
    std::vector<double> g_inner(grad_values.size());
    for (std::size_t c = 0; c < grad_values.size(); ++c) g_inner[c] = -band_.ratio * grad_values[c];
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      interlab::backward(*model_, outer_[p], grad_values, &grad, nullptr, inv);
      interlab::backward(*model_, inner_[p], g_inner, &grad, nullptr, inv);
    }
  }

 private:
  const MlpModel* model_;
  BandSizes band_;
  std::vector<SubsetPair> pairs_;
  std::vector<ForwardTrace> outer_;
  std::vector<ForwardTrace> inner_;
  std::vector<double> values_;
};

/// Band logit delta u_c(r1, r2 | x) of class c.
inline double delta_u_class(const MlpModel& model, std::span<const double> x, int c,
                            const Baseline& baseline, double r1, double r2,
                            std::uint64_t pair_samples, std::uint64_t seed) {
  if (c < 0 || c >= model.num_classes()) throw DomainError("class index out of range");
  if (pair_samples < 1) throw DomainError("delta u needs pair_samples >= 1");
  const int n = model.num_inputs();
  const BandSizes b = band_sizes(n, r1, r2);
  BandLogits logits(model, x, baseline, b, sample_subset_pairs(n, b, pair_samples, seed));
  return logits.values()[static_cast<std::size_t>(c)];
}

/// Mean softmax cross-entropy of the full-input logits. Adds weight * gradient
/// into \p grad when non-null.
inline double cross_entropy_loss(const MlpModel& model, const Batch& batch, MlpGradient* grad = nullptr,
                                 double weight = 1.0) {
  detail::check_batch(model, batch);
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  ForwardTrace trace;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto z = forward(model, batch.inputs[b], grad ? &trace : nullptr);
    const auto y = static_cast<std::size_t>(batch.labels[b]);
    total += log_sum_exp(z) - z[y];
    if (grad) {
      auto g = softmax(z);
      g[y] -= 1.0;
      backward(model, trace, g, grad, nullptr, weight * inv);
    }
  }
  total *= inv;
  detail::check_finite(total, "cross-entropy loss");
  return total;
}

namespace detail {

template <typename PerSample>
double band_loss(const MlpModel& model, const Batch& batch, const Baseline& baseline, double r1,
                 double r2, std::uint64_t pair_samples, std::uint64_t seed, MlpGradient* grad,
                 double weight, PerSample&& per_sample) {
  check_batch(model, batch);
  if (pair_samples < 1) throw DomainError("band loss needs pair_samples >= 1");
  const int n = model.num_inputs();
  const BandSizes band = band_sizes(n, r1, r2);
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    BandLogits logits(model, batch.inputs[b], baseline, band,
                      sample_subset_pairs(n, band, pair_samples, child_seed(seed, b)));
    std::vector<double> g(logits.values().size(), 0.0);
    total += per_sample(logits.values(), batch.labels[b], g);
    if (grad) logits.backward(g, *grad, weight * inv);
  }
  total *= inv;
  check_finite(total, "band loss");
  return total;
}

}  // namespace detail

/// Cross-entropy of softmax(delta u_c) against the one-hot label.
inline double encourage_from_logits(std::span<const double> u, int y, std::span<double> grad) {
  const auto p = softmax(u);
  for (std::size_t c = 0; c < u.size(); ++c) grad[c] = p[c];
  grad[static_cast<std::size_t>(y)] -= 1.0;
  return log_sum_exp(u) - u[static_cast<std::size_t>(y)];
}

/// Negative entropy sum_c p_c log p_c of softmax(delta u_c).
inline double suppress_from_logits(std::span<const double> u, std::span<double> grad) {
  const double lse = log_sum_exp(u);
  std::vector<double> logp(u.size());
  std::vector<double> p(u.size());
  double neg_entropy = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    logp[c] = u[c] - lse;
    p[c] = std::exp(logp[c]);
    neg_entropy += p[c] * logp[c];
  }
  for (std::size_t c = 0; c < u.size(); ++c) grad[c] = p[c] * (logp[c] - neg_entropy);
  return neg_entropy;
}

/// L+(r1, r2), averaged over the batch.
inline double loss_encourage(const MlpModel& model, const Batch& batch, const Baseline& baseline,
                             double r1, double r2, std::uint64_t pair_samples, std::uint64_t seed,
                             MlpGradient* grad = nullptr, double weight = 1.0) {
  return detail::band_loss(model, batch, baseline, r1, r2, pair_samples, seed, grad, weight,
                           [](const std::vector<double>& u, int y, std::vector<double>& g) {
                             return encourage_from_logits(u, y, g);
                           });
}

/// L-(r1, r2), averaged over the batch.
inline double loss_suppress(const MlpModel& model, const Batch& batch, const Baseline& baseline,
                            double r1, double r2, std::uint64_t pair_samples, std::uint64_t seed,
                            MlpGradient* grad = nullptr, double weight = 1.0) {
  return detail::band_loss(model, batch, baseline, r1, r2, pair_samples, seed, grad, weight,
                           [](const std::vector<double>& u, int, std::vector<double>& g) {
                             return suppress_from_logits(u, g);
                           });
}

/// Value of one modulation term (without its lambda). The term seed is
/// spec.seed mixed with \p step_seed so each step draws fresh pairs.
inline double modulation_term(const MlpModel& model, const Batch& batch, const Baseline& baseline,
                              const ModulationSpec& spec, std::uint64_t step_seed,
                              MlpGradient* grad = nullptr, double weight = 1.0) {
  const std::uint64_t seed = child_seed(spec.seed, step_seed);
  return spec.kind == ModulationKind::kEncourage
             ? loss_encourage(model, batch, baseline, spec.r1, spec.r2, spec.pair_samples, seed, grad, weight)
             : loss_suppress(model, batch, baseline, spec.r1, spec.r2, spec.pair_samples, seed, grad, weight);
}

/// L_cls + sum over terms of lambda * (L+ or L-). Term k draws its pairs
/// from child_seed(step_seed, k).
inline double combined_loss(const MlpModel& model, const Batch& batch, const Baseline& baseline,
                            const std::vector<ModulationSpec>& terms, std::uint64_t step_seed,
                            MlpGradient* grad = nullptr) {
  double total = cross_entropy_loss(model, batch, grad);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& spec = terms[k];
    validate_spec(spec, model.num_inputs());
    if (spec.lambda == 0.0) continue;
    total += spec.lambda *
             modulation_term(model, batch, baseline, spec, child_seed(step_seed, k), grad, spec.lambda);
  }
  detail::check_finite(total, "combined loss");
  return total;
}

// ---------------------------------------------------------------------------

struct LossAndGradient {
  double loss = 0.0;
  MlpGradient grad;
};

/// Exact reverse-mode gradient of an objective. \p objective has the shape
/// double(const MlpModel&, MlpGradient*) and must add its gradient into the
/// buffer when one is passed.
template <typename Objective>
LossAndGradient gradient(const MlpModel& model, Objective&& objective) {
  LossAndGradient out{0.0, MlpGradient::zeros_like(model)};
  out.loss = objective(model, &out.grad);
  detail::check_finite(out.loss, "objective");
  return out;
}

}  // namespace interlab

#endif  // INTERLAB_MODULATION_HPP
