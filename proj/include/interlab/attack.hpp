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

#ifndef INTERLAB_ATTACK_HPP
#define INTERLAB_ATTACK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/mlp.hpp"

namespace interlab {

/// Untargeted L-infinity PGD settings, in the network's input units.
struct AttackConfig {
  double epsilon = 0.3;
  int steps = 50;
  double step_size = 0.01;
};

inline void validate_attack(const AttackConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw ValidationError("attack epsilon must be > 0");
  if (cfg.steps < 0) throw ValidationError("attack steps must be >= 0");
  if (!(cfg.step_size > 0.0)) throw ValidationError("attack step size must be > 0");
}

/// Clamp of \p x into [center - eps, center + eps] such that
/// |x - center| <= eps holds in floating point, not just in exact arithmetic.
inline double project_linf(double x, double center, double eps) {
  double lo = center - eps;
  double hi = center + eps;
  while (center - lo > eps) lo = std::nextafter(lo, center);
  while (hi - center > eps) hi = std::nextafter(hi, center);
  return x < lo ? lo : (x > hi ? hi : x);
}

/// dCE/dx of the full-input cross-entropy at label y.
inline std::vector<double> input_gradient(const MlpModel& model, std::span<const double> x, int y) {
  ForwardTrace trace;
  auto g = softmax(forward(model, x, &trace));
  g[static_cast<std::size_t>(y)] -= 1.0;
  std::vector<double> dx;
  backward(model, trace, g, nullptr, &dx);
  return dx;
}

/// x <- proj(x + step_size * sign(grad)), repeated cfg.steps times.
/// sign(0) is 0, so a flat loss leaves the input unchanged.
inline std::vector<double> pgd_attack(const MlpModel& model, std::span<const double> x0, int y,
                                      const AttackConfig& cfg) {
  validate_attack(cfg);
  if (y < 0 || y >= model.num_classes()) throw DomainError("label outside [0, num_classes)");
  std::vector<double> x(x0.begin(), x0.end());
  for (int step = 0; step < cfg.steps; ++step) {
    const auto g = input_gradient(model, x, y);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double s = g[k] > 0.0 ? 1.0 : (g[k] < 0.0 ? -1.0 : 0.0);
      x[k] = project_linf(x[k] + cfg.step_size * s, x0[k], cfg.epsilon);
    }
  }
  return x;
}

inline int predict(const MlpModel& model, std::span<const double> x) {
  const auto z = forward(model, x);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

/// Percentage of rows still classified correctly after the attack.
inline double adversarial_accuracy(const MlpModel& model, const std::vector<std::vector<double>>& xs,
                                   const std::vector<int>& ys, const AttackConfig& cfg) {
  if (xs.empty()) throw DomainError("adversarial accuracy needs a non-empty evaluation set");
  if (xs.size() != ys.size()) throw DimensionError("inputs and labels differ in length");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < xs.size(); ++r)
    if (predict(model, pgd_attack(model, xs[r], ys[r], cfg)) == ys[r]) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(xs.size());
}

inline double clean_accuracy(const MlpModel& model, const std::vector<std::vector<double>>& xs,
                             const std::vector<int>& ys) {
  if (xs.empty()) throw DomainError("accuracy needs a non-empty evaluation set");
  std::size_t correct = 0;
  for (std::size_t r = 0; r < xs.size(); ++r)
    if (predict(model, xs[r]) == ys[r]) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(xs.size());
}

}  // namespace interlab

#endif  // INTERLAB_ATTACK_HPP
