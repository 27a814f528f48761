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

#ifndef INTERLAB_MLP_HPP
#define INTERLAB_MLP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/game.hpp"
#include "interlab/rng.hpp"
#include "interlab/subset.hpp"

namespace interlab {

/// Optional affine input transform x -> (x - mean) / scale applied by the
/// data pipeline before the network sees a row.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;

  bool empty() const noexcept { return mean.empty(); }

  friend bool operator==(const Standardization&, const Standardization&) = default;
};

/// Fully connected ReLU network with an identity output layer.
///
/// weights[l] is row-major with shape (layer_sizes[l+1], layer_sizes[l]).
struct MlpModel {
  std::vector<int> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::uint64_t seed = 0;
  Standardization standardization;
  std::vector<std::string> label_values;  // original class labels, optional
  std::string provenance;                 // e.g. "config_hash=... seed=...", optional

  int num_inputs() const { return layer_sizes.front(); }
  int num_classes() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return weights.size(); }

  std::size_t num_parameters() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) total += weights[l].size() + biases[l].size();
    return total;
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

/// Parameter-shaped gradient buffer.
struct MlpGradient {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static MlpGradient zeros_like(const MlpModel& model) {
    MlpGradient g;
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
      g.weights.emplace_back(model.weights[l].size(), 0.0);
      g.biases.emplace_back(model.biases[l].size(), 0.0);
    }
    return g;
  }

  void add_scaled(const MlpGradient& other, double scale) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      for (std::size_t k = 0; k < weights[l].size(); ++k) weights[l][k] += scale * other.weights[l][k];
      for (std::size_t k = 0; k < biases[l].size(); ++k) biases[l][k] += scale * other.biases[l][k];
    }
  }

  /// Visits every entry in a fixed order: layer by layer, weights then biases.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t l = 0; l < weights.size(); ++l) {
      for (double w : weights[l]) fn(w);
      for (double b : biases[l]) fn(b);
    }
  }
};

/// Pointer to parameter number \p index in MlpGradient::for_each order.
inline double& parameter_at(MlpModel& model, std::size_t index) {
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    if (index < model.weights[l].size()) return model.weights[l][index];
    index -= model.weights[l].size();
    if (index < model.biases[l].size()) return model.biases[l][index];
    index -= model.biases[l].size();
  }
  throw DomainError("parameter index out of range");
}

inline void validate_layer_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ValidationError("an MLP needs at least an input and an output layer");
  for (int s : sizes)
    if (s < 1) throw ValidationError("layer sizes must be positive");
}

/// He-uniform initialization: W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), b = 0.
/// Weights are drawn layer by layer in row-major order from one stream.
inline MlpModel mlp_init(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  validate_layer_sizes(layer_sizes);
  MlpModel model;
  model.layer_sizes = layer_sizes;
  model.seed = seed;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(layer_sizes[l]);
    const auto fan_out = static_cast<std::size_t>(layer_sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<double> w(fan_in * fan_out);
    for (double& x : w) x = rng.uniform(-limit, limit);
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }
  return model;
}

/// Throws unless the parameter shapes agree with layer_sizes.
inline void validate_model(const MlpModel& model) {
  validate_layer_sizes(model.layer_sizes);
  const std::size_t layers = model.layer_sizes.size() - 1;
  if (model.weights.size() != layers || model.biases.size() != layers)
    throw ValidationError("model has " + std::to_string(model.weights.size()) +
                          " weight layers, expected " + std::to_string(layers));
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<std::size_t>(model.layer_sizes[l]);
    const auto out = static_cast<std::size_t>(model.layer_sizes[l + 1]);
    if (model.weights[l].size() != in * out || model.biases[l].size() != out)
      throw ValidationError("parameter shape mismatch in layer " + std::to_string(l));
  }
  const auto& st = model.standardization;
  if (!st.empty() && (st.mean.size() != static_cast<std::size_t>(model.num_inputs()) ||
                      st.scale.size() != st.mean.size()))
    throw ValidationError("standardization length does not match the input layer");
  if (!model.label_values.empty() && model.label_values.size() != static_cast<std::size_t>(model.num_classes()))
    throw ValidationError("label mapping length does not match the output layer");
}

/// Activations recorded by forward() for the backward pass.
struct ForwardTrace {
  std::vector<std::vector<double>> activations;  // [0] = input, back() = logits
};

inline std::vector<double> forward(const MlpModel& model, std::span<const double> x,
                                   ForwardTrace* trace = nullptr) {
  if (x.size() != static_cast<std::size_t>(model.num_inputs()))
    throw DimensionError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.num_inputs()));
  std::vector<double> a(x.begin(), x.end());
  if (trace) {
    trace->activations.clear();
    trace->activations.push_back(a);
  }
  const std::size_t layers = model.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<std::size_t>(model.layer_sizes[l]);
    const auto out = static_cast<std::size_t>(model.layer_sizes[l + 1]);
    const auto& w = model.weights[l];
    std::vector<double> z(model.biases[l]);
    for (std::size_t o = 0; o < out; ++o) {
      const double* row = w.data() + o * in;
      double s = 0.0;
      for (std::size_t k = 0; k < in; ++k) s += row[k] * a[k];
      z[o] += s;
    }
    if (l + 1 < layers)
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    a = std::move(z);
    if (trace) trace->activations.push_back(a);
  }
  return a;
}

/// Reverse pass for one forward trace. Adds weight * dL/dparams to \p grad
/// (when non-null) and writes dL/dx into \p input_grad (when non-null).
/// The ReLU derivative at exactly 0 is taken as 0.
inline void backward(const MlpModel& model, const ForwardTrace& trace,
                     std::span<const double> logit_grad, MlpGradient* grad,
                     std::vector<double>* input_grad = nullptr, double weight = 1.0) {
  std::vector<double> delta(logit_grad.begin(), logit_grad.end());
  for (double& d : delta) d *= weight;
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const auto in = static_cast<std::size_t>(model.layer_sizes[l]);
    const auto out = static_cast<std::size_t>(model.layer_sizes[l + 1]);
    const auto& a_in = trace.activations[l];
    const auto& w = model.weights[l];
    if (grad) {
      auto& gw = grad->weights[l];
      auto& gb = grad->biases[l];
      for (std::size_t o = 0; o < out; ++o) {
        if (delta[o] == 0.0) continue;
        gb[o] += delta[o];
        double* row = gw.data() + o * in;
        for (std::size_t k = 0; k < in; ++k) row[k] += delta[o] * a_in[k];
      }
    }
    if (l == 0 && !input_grad) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      if (delta[o] == 0.0) continue;
      const double* row = w.data() + o * in;
      for (std::size_t k = 0; k < in; ++k) prev[k] += row[k] * delta[o];
    }
    if (l > 0)
      for (std::size_t k = 0; k < in; ++k)
        if (!(a_in[k] > 0.0)) prev[k] = 0.0;
    delta = std::move(prev);
  }
  if (input_grad) *input_grad = std::move(delta);
}

inline std::vector<double> masked_forward(const MlpModel& model, std::span<const double> x,
                                          const SubsetMask& s, const Baseline& baseline,
                                          ForwardTrace* trace = nullptr) {
  return forward(model, make_masked_input(x, s, baseline), trace);
}

// ---------------------------------------------------------------------------
// Softmax helpers

inline double log_sum_exp(std::span<const double> z) {
  const double hi = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - hi);
  return hi + std::log(s);
}

inline std::vector<double> softmax(std::span<const double> z) {
  const double hi = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) s += p[k] = std::exp(z[k] - hi);
  for (double& v : p) v /= s;
  return p;
}

/// log(p_c / (1 - p_c)) under softmax(z), computed as z_c - logsumexp(z_{k != c}).
inline double log_odds(std::span<const double> z, int c) {
  if (c < 0 || static_cast<std::size_t>(c) >= z.size()) throw DomainError("class index out of range");
  std::vector<double> others;
  others.reserve(z.size() - 1);
  for (std::size_t k = 0; k < z.size(); ++k)
    if (static_cast<int>(k) != c) others.push_back(z[k]);
  if (others.empty()) throw DomainError("log-odds needs at least two classes");
  return z[static_cast<std::size_t>(c)] - log_sum_exp(others);
}

// ---------------------------------------------------------------------------
// Model-backed games

/// v(S|x): log-odds of the target class on the masked input.
class MaskedModelGame {
 public:
  MaskedModelGame(const MlpModel& model, std::vector<double> x, Baseline baseline, int target)
      : model_(&model), x_(std::move(x)), baseline_(std::move(baseline)), target_(target) {
    if (x_.size() != static_cast<std::size_t>(model.num_inputs()) || baseline_.values.size() != x_.size())
      throw DimensionError("sample/baseline length does not match the model input");
    if (target < 0 || target >= model.num_classes()) throw DomainError("target class out of range");
  }

  int num_players() const noexcept { return static_cast<int>(x_.size()); }
  double operator()(const SubsetMask& s) const {
    return log_odds(masked_forward(*model_, x_, s, baseline_), target_);
  }

 private:
  const MlpModel* model_;
  std::vector<double> x_;
  Baseline baseline_;
  int target_;
};

/// v_c(S|x): raw logit of class c on the masked input.
class ClassLogitGame {
 public:
  ClassLogitGame(const MlpModel& model, std::vector<double> x, Baseline baseline, int cls)
      : model_(&model), x_(std::move(x)), baseline_(std::move(baseline)), cls_(cls) {
    if (x_.size() != static_cast<std::size_t>(model.num_inputs()) || baseline_.values.size() != x_.size())
      throw DimensionError("sample/baseline length does not match the model input");
    if (cls < 0 || cls >= model.num_classes()) throw DomainError("class index out of range");
  }

  int num_players() const noexcept { return static_cast<int>(x_.size()); }
  double operator()(const SubsetMask& s) const {
    return masked_forward(*model_, x_, s, baseline_)[static_cast<std::size_t>(cls_)];
  }

 private:
  const MlpModel* model_;
  std::vector<double> x_;
  Baseline baseline_;
  int cls_;
};

}  // namespace interlab

#endif  // INTERLAB_MLP_HPP
