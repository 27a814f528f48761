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

#ifndef INTERLAB_TRAIN_HPP
#define INTERLAB_TRAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "interlab/attack.hpp"
#include "interlab/dataset.hpp"
#include "interlab/error.hpp"
#include "interlab/interaction.hpp"
#include "interlab/mlp.hpp"
#include "interlab/modulation.hpp"
#include "interlab/rng.hpp"

namespace interlab {

struct TrainConfig {
  std::vector<int> hidden = {64, 64};
  int epochs = 60;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  std::vector<ModulationSpec> modulation;
  int snapshot_every = 0;  // 0 disables profile snapshots
  double train_fraction = 0.7;
  double validation_fraction = 0.3;
  std::size_t probe_samples = 16;
  bool zero_baseline = false;
};

inline void validate_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (cfg.snapshot_every < 0) throw ValidationError("snapshot_every must be >= 0");
  if (std::abs(cfg.train_fraction + cfg.validation_fraction - 1.0) > 1e-12)
    throw ValidationError("split fractions must sum to 1");
  for (int h : cfg.hidden)
    if (h < 1) throw ValidationError("hidden layer sizes must be positive");
  if (cfg.probe_samples < 1) throw ValidationError("probe_samples must be >= 1");
}

/// Standardized train/validation split; statistics come from the train rows.
struct PreparedData {
  std::vector<std::vector<double>> train_x;
  std::vector<int> train_y;
  std::vector<std::vector<double>> val_x;
  std::vector<int> val_y;
  Standardization standardization;
  Baseline baseline;  // in standardized units
  int num_classes = 0;
  std::vector<std::string> label_values;
};

inline PreparedData prepare_data(const TrainConfig& cfg, const TabularDataset& ds) {
  if (ds.rows() == 0) throw ValidationError("dataset is empty");
  const auto split = split_rows(ds.rows(), cfg.train_fraction, child_seed(cfg.seed, 0x5B17ULL));
  PreparedData d;
  d.num_classes = ds.num_classes();
  d.label_values = ds.label_values;
  std::vector<std::vector<double>> raw_train;
  for (std::size_t r : split.train) {
    raw_train.push_back(ds.features[r]);
    d.train_y.push_back(ds.labels[r]);
  }
  d.standardization = fit_standardization(raw_train);
  d.train_x = apply_standardization(d.standardization, raw_train);
  for (std::size_t r : split.validation) {
    d.val_x.push_back(apply_standardization(d.standardization, ds.features[r]));
    d.val_y.push_back(ds.labels[r]);
  }
  d.baseline = cfg.zero_baseline ? zero_baseline(static_cast<std::size_t>(ds.num_features()))
                                 : compute_baseline(d.train_x);
  return d;
}

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct ProfileSnapshot {
  int epoch = 0;
  OrderProfile profile;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::vector<ProfileSnapshot> snapshots;
};

struct TrainResult {
  MlpModel model;
  TrainLog log;
  Baseline baseline;
};

inline Batch make_batch(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                        std::span<const std::size_t> rows) {
  Batch b;
  for (std::size_t r : rows) {
    b.inputs.emplace_back(xs[r]);
    b.labels.push_back(ys[r]);
  }
  return b;
}

inline Batch full_batch(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys) {
  Batch b;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    b.inputs.emplace_back(xs[r]);
    b.labels.push_back(ys[r]);
  }
  return b;
}

/// Interaction profile of \p model over every order, exact with all pairs,
/// for the log-odds of each row's own label.
inline OrderProfile model_profile(const MlpModel& model, const std::vector<std::vector<double>>& xs,
                                  const std::vector<int>& ys, const Baseline& baseline,
                                  std::uint64_t seed) {
  std::vector<MaskedModelGame> games;
  for (std::size_t r = 0; r < xs.size(); ++r) games.emplace_back(model, xs[r], baseline, ys[r]);
  return order_profile(std::span<const MaskedModelGame>(games), default_order_grid(model.num_inputs()),
                       ProfileBudgets{}, seed);
}

/// Mini-batch SGD (no momentum) on cross-entropy plus the modulation terms.
/// Epoch e shuffles with child_seed(seed, e); every batch draws its subset
/// pairs from a seed derived from (epoch, batch).
inline TrainResult train_prepared(const TrainConfig& cfg, const PreparedData& data) {
  validate_train_config(cfg);
  const int n = static_cast<int>(data.train_x.front().size());
  for (const auto& spec : cfg.modulation) validate_spec(spec, n);
  std::vector<int> sizes{n};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(data.num_classes);

  TrainResult result;
  result.model = mlp_init(sizes, cfg.seed);
  result.model.standardization = data.standardization;
  result.model.label_values = data.label_values;
  result.baseline = data.baseline;
  MlpModel& model = result.model;

  const std::size_t probe = std::min(cfg.probe_samples, data.val_x.size());
  const std::vector<std::vector<double>> probe_x(data.val_x.begin(),
                                                 data.val_x.begin() + static_cast<std::ptrdiff_t>(probe));
  const std::vector<int> probe_y(data.val_y.begin(), data.val_y.begin() + static_cast<std::ptrdiff_t>(probe));
  auto snapshot = [&](int epoch) {
    result.log.snapshots.push_back(
        {epoch, model_profile(model, probe_x, probe_y, data.baseline, child_seed(cfg.seed, 0xB0B0ULL))});
  };
  if (cfg.snapshot_every > 0) snapshot(0);

  const Batch train_all = full_batch(data.train_x, data.train_y);
  const Batch val_all = full_batch(data.val_x, data.val_y);
  std::vector<std::size_t> order(data.train_x.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    const std::uint64_t epoch_seed = child_seed(cfg.seed, static_cast<std::uint64_t>(epoch));
    Rng rng(epoch_seed);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.uniform_below(k)]);

    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const Batch batch = make_batch(data.train_x, data.train_y,
                                     std::span<const std::size_t>(order.data() + start, end - start));
      const std::uint64_t step_seed = child_seed(epoch_seed, batch_index);
      const auto lg = gradient(model, [&](const MlpModel& m, MlpGradient* g) {
        return combined_loss(m, batch, data.baseline, cfg.modulation, step_seed, g);
      });
      if (!std::isfinite(lg.loss))
        throw NumericError("training diverged at epoch " + std::to_string(epoch));
      for (std::size_t l = 0; l < model.num_layers(); ++l) {
        for (std::size_t k = 0; k < model.weights[l].size(); ++k)
          model.weights[l][k] -= cfg.learning_rate * lg.grad.weights[l][k];
        for (std::size_t k = 0; k < model.biases[l].size(); ++k)
          model.biases[l][k] -= cfg.learning_rate * lg.grad.biases[l][k];
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = cross_entropy_loss(model, train_all);
    rec.train_acc = clean_accuracy(model, data.train_x, data.train_y);
    rec.val_loss = cross_entropy_loss(model, val_all);
    rec.val_acc = clean_accuracy(model, data.val_x, data.val_y);
    result.log.epochs.push_back(rec);
    if (cfg.snapshot_every > 0 && epoch % cfg.snapshot_every == 0) snapshot(epoch);
  }
  return result;
}

inline TrainResult train(const TrainConfig& cfg, const TabularDataset& ds) {
  validate_train_config(cfg);
  return train_prepared(cfg, prepare_data(cfg, ds));
}

// ---------------------------------------------------------------------------
// Named variants

enum class Variant { kNormal, kLowOrder, kMidOrder, kHighOrder };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kNormal: return "normal";
    case Variant::kLowOrder: return "low";
    case Variant::kMidOrder: return "mid";
    case Variant::kHighOrder: return "high";
  }
  return "?";
}

/// Modulation terms of the four model variants:
///   normal: none
///   low:    L-(0.7, 1.0), lambda 1
///   mid:    L+(0.3, 0.7), lambda 1
///   high:   L-(0, 0.5),   lambda 1
inline std::vector<ModulationSpec> variant_terms(Variant v, std::uint64_t pair_samples = 4) {
  switch (v) {
    case Variant::kNormal: return {};
    case Variant::kLowOrder: return {{ModulationKind::kSuppress, 0.7, 1.0, 1.0, pair_samples, 0}};
    case Variant::kMidOrder: return {{ModulationKind::kEncourage, 0.3, 0.7, 1.0, pair_samples, 0}};
    case Variant::kHighOrder: return {{ModulationKind::kSuppress, 0.0, 0.5, 1.0, pair_samples, 0}};
  }
  return {};
}

}  // namespace interlab

#endif  // INTERLAB_TRAIN_HPP
