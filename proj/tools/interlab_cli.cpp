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

// interlab: command-line front end.
//
//   interlab verify  [--suite efficiency|theorem2|gradsim|all] [--seed S]
//   interlab analyze --model m.json --data d.csv --out profile.csv
//   interlab theory  --n N [--fit profile.csv] [--out curve.csv]
//   interlab train   --config cfg.json --data d.csv --out-dir run/
//   interlab attack  --model m.json --data d.csv [--eps E --steps K --step-size A]
//   interlab make-data --task pairwise|conjunction|blobs --out d.csv
//
// Failures print one line "error kind=<kind> exit=<code> message=<json string>"
// on stderr. Exit codes: 0 ok, 1 invalid input, 2 verification failed,
// 3 numeric failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "interlab/interlab.hpp"

namespace {

namespace fs = std::filesystem;
using interlab::json;

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw interlab::ValidationError(path + ": cannot open for writing");
  return out;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> orders;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      orders.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw interlab::ValidationError("--orders: '" + item + "' is not an integer");
    }
  }
  return orders;
}

/// Rows of \p ds in the model's input units.
std::vector<std::vector<double>> model_inputs(const interlab::MlpModel& model,
                                              const interlab::TabularDataset& ds) {
  if (ds.num_features() != model.num_inputs())
    throw interlab::DimensionError("data has " + std::to_string(ds.num_features()) +
                                   " features, model expects " + std::to_string(model.num_inputs()));
  if (model.standardization.empty()) return ds.features;
  return interlab::apply_standardization(model.standardization, ds.features);
}

void check_labels(const interlab::MlpModel& model, const interlab::TabularDataset& ds) {
  if (ds.num_classes() > model.num_classes())
    throw interlab::ValidationError("data has " + std::to_string(ds.num_classes()) +
                                    " classes, model has " + std::to_string(model.num_classes()));
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass() const { return value < threshold; }
};

void print_check(const Check& c) {
  std::printf("check=%s value=%s threshold=%s status=%s\n", c.name.c_str(),
              interlab::format_double(c.value).c_str(), interlab::format_double(c.threshold).c_str(),
              c.pass() ? "pass" : "fail");
}

std::vector<Check> verify_efficiency(std::uint64_t seed) {
  double worst = 0.0;
  for (int g = 0; g < 100; ++g) {
    const int n = 4 + g % 7;
    const auto game = interlab::synthetic_game(
        interlab::random_polynomial_spec(n, n, interlab::child_seed(seed, static_cast<std::uint64_t>(g))));
    const auto r = interlab::efficiency_residual(game);
    worst = std::max(worst, r.residual / std::max(1.0, std::abs(r.lhs)));
  }
  return {{"efficiency_relative_residual", worst, 1e-9}};
}

std::vector<Check> verify_theorem2(std::uint64_t seed) {
  struct Band {
    int n;
    double r1, r2;
    const char* name;
  };
  const Band bands[] = {{6, 1.0 / 3.0, 5.0 / 6.0, "theorem2_n6"},
                        {8, 0.25, 0.75, "theorem2_n8"},
                        {10, 0.2, 0.5, "theorem2_n10"}};
  std::vector<Check> out;
  for (const auto& b : bands)
    out.push_back({b.name, interlab::verify_theorem2(b.n, b.r1, b.r2, 50, seed).max_residual, 1e-8});
  return out;
}

std::vector<Check> verify_gradsim(std::uint64_t seed) {
  const interlab::GradSimConfig cfg{.n = 12, .dims = 1000, .sigma = 1.0, .trials = 200, .seed = seed};
  const double base = interlab::simulate_learning_strength(cfg, 0);
  double worst = 0.0;
  for (int m = 0; m <= cfg.n - 2; ++m) {
    const double ratio = interlab::simulate_learning_strength(cfg, m) / base;
    worst = std::max(worst, std::abs(ratio / interlab::learning_strength_hat(cfg.n, m) - 1.0));
  }
  return {{"gradsim_max_relative_error", worst, 0.03}};
}

int run_verify(const std::string& suite, std::uint64_t seed) {
  std::vector<Check> checks;
  auto add = [&](std::vector<Check> more) {
    for (auto& c : more) {
      print_check(c);
      checks.push_back(std::move(c));
    }
  };
  if (suite == "efficiency" || suite == "all") add(verify_efficiency(seed));
  if (suite == "theorem2" || suite == "all") add(verify_theorem2(seed));
  if (suite == "gradsim" || suite == "all") add(verify_gradsim(seed));
  for (const auto& c : checks)
    if (!c.pass()) {
      std::fprintf(stderr, "error kind=verification exit=2 message=%s\n",
                   json(c.name + " exceeded its threshold").dump().c_str());
      return static_cast<int>(interlab::ExitCode::kVerification);
    }
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string model, data, label = "label", orders, out;
  std::uint64_t pairs = UINT64_MAX, samples = UINT64_MAX, rows = 16, seed = 0;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto model = interlab::load_model(a.model);
  const auto ds = interlab::load_dataset_csv(a.data, a.label);
  check_labels(model, ds);
  const auto xs = model_inputs(model, ds);
  const int n = model.num_inputs();
  const std::vector<int> grid = a.orders.empty() ? interlab::default_order_grid(n) : parse_orders(a.orders);
  if (a.rows < 1) throw interlab::ValidationError("--rows must be >= 1");
  if (a.pairs < 1 || a.samples < 1) throw interlab::ValidationError("--pairs and --samples must be >= 1");

  const interlab::Baseline baseline = interlab::compute_baseline(xs);
  std::vector<interlab::MaskedModelGame> games;
  for (std::size_t r = 0; r < std::min<std::size_t>(a.rows, xs.size()); ++r)
    games.emplace_back(model, xs[r], baseline, ds.labels[r]);
  const auto profile = interlab::order_profile(std::span<const interlab::MaskedModelGame>(games), grid,
                                               {a.pairs, a.samples}, a.seed);

  const json resolved{{"command", "analyze"},
                      {"model_hash", interlab::file_hash(a.model)},
                      {"data_hash", interlab::file_hash(a.data)},
                      {"label", a.label},
                      {"orders", grid},
                      {"pairs", a.pairs},
                      {"samples", a.samples},
                      {"rows", games.size()},
                      {"seed", a.seed}};
  auto out = open_output(a.out);
  interlab::write_profile_csv(out, profile, interlab::provenance_comment(resolved, a.seed) +
                                                " n=" + std::to_string(n));
  if (profile.degenerate)
    std::fprintf(stderr, "warning kind=degenerate_profile message=%s\n",
                 json("all interaction strengths are zero; normalized profile set to 0").dump().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// theory

int run_theory(int n, const std::string& fit_path, const std::string& out_path, const std::string& fit_out) {
  const auto curve = interlab::theory_curve(n);
  const json resolved{{"command", "theory"}, {"n", n}};
  if (!out_path.empty()) {
    auto out = open_output(out_path);
    interlab::write_theory_csv(out, curve, interlab::provenance_comment(resolved, 0));
  } else {
    interlab::write_theory_csv(std::cout, curve, interlab::provenance_comment(resolved, 0));
  }
  if (fit_path.empty()) return 0;
  std::ifstream in(fit_path);
  if (!in) throw interlab::ParseError(fit_path + ": cannot open file");
  const auto profile = interlab::read_profile_csv(in, n);
  json j = interlab::effective_fit_to_json(interlab::fit_effective_n(profile));
  j["config_hash"] = interlab::config_hash(
      {{"command", "theory-fit"}, {"n", n}, {"profile_hash", interlab::file_hash(fit_path)}});
  j["seed"] = 0;
  if (fit_out.empty()) {
    std::cout << j.dump() << '\n';
  } else {
    open_output(fit_out) << j.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train

int run_train(const std::string& config_path, const std::string& data_path, const std::string& label,
              const std::string& out_dir) {
  const auto cfg = interlab::load_train_config(config_path);
  const auto ds = interlab::load_dataset_csv(data_path, label);
  const json resolved_cfg = interlab::train_config_to_json(cfg);
  const json resolved{{"command", "train"}, {"config", resolved_cfg}, {"data_hash", interlab::file_hash(data_path)}};
  const std::string hash = interlab::config_hash(resolved);
  const std::string comment = interlab::provenance_comment(resolved, cfg.seed);

  auto result = interlab::train(cfg, ds);
  result.model.provenance = "config_hash=" + hash + " seed=" + std::to_string(cfg.seed);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  interlab::save_model(result.model, (dir / "model.json").string());
  {
    auto out = open_output((dir / "train_log.csv").string());
    interlab::write_train_log_csv(out, result.log, comment);
  }
  for (const auto& snap : result.log.snapshots) {
    auto out = open_output((dir / ("profile_epoch_" + std::to_string(snap.epoch) + ".csv")).string());
    interlab::write_profile_csv(out, snap.profile, comment + " n=" + std::to_string(snap.profile.n));
  }
  json record = resolved;
  record["config_hash"] = hash;
  record["seed"] = cfg.seed;
  open_output((dir / "run.json").string()) << record.dump(2) << '\n';
  const auto& last = result.log.epochs.back();
  std::printf("epochs=%d train_loss=%s val_loss=%s train_acc=%s val_acc=%s\n", last.epoch,
              interlab::format_double(last.train_loss).c_str(), interlab::format_double(last.val_loss).c_str(),
              interlab::format_double(last.train_acc).c_str(), interlab::format_double(last.val_acc).c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// attack

int run_attack(const std::string& model_path, const std::string& data_path, const std::string& label,
               const interlab::AttackConfig& cfg, std::uint64_t seed, const std::string& out_path) {
  interlab::validate_attack(cfg);
  const auto model = interlab::load_model(model_path);
  const auto ds = interlab::load_dataset_csv(data_path, label);
  check_labels(model, ds);
  const auto xs = model_inputs(model, ds);
  const json resolved{{"command", "attack"},
                      {"model_hash", interlab::file_hash(model_path)},
                      {"data_hash", interlab::file_hash(data_path)},
                      {"label", label},
                      {"epsilon", cfg.epsilon},
                      {"steps", cfg.steps},
                      {"step_size", cfg.step_size},
                      {"seed", seed}};
  const json j{{"rows", xs.size()},
               {"epsilon", cfg.epsilon},
               {"steps", cfg.steps},
               {"step_size", cfg.step_size},
               {"clean_accuracy", interlab::clean_accuracy(model, xs, ds.labels)},
               {"adversarial_accuracy", interlab::adversarial_accuracy(model, xs, ds.labels, cfg)},
               {"config_hash", interlab::config_hash(resolved)},
               {"seed", seed}};
  if (out_path.empty()) {
    std::cout << j.dump() << '\n';
  } else {
    open_output(out_path) << j.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// make-data

int run_make_data(const std::string& task, const interlab::TaskSpec& base, const std::string& out_path) {
  interlab::TaskSpec spec = base;
  if (task == "pairwise") spec.kind = interlab::TaskKind::kPairwise;
  else if (task == "conjunction") spec.kind = interlab::TaskKind::kConjunction;
  else if (task == "blobs") spec.kind = interlab::TaskKind::kBlobs;
  else throw interlab::ValidationError("--task must be pairwise, conjunction or blobs");
  auto out = open_output(out_path);
  interlab::write_dataset_csv(out, interlab::make_synthetic_task(spec));
  return 0;
}

int fail(const std::string& kind, int code, const std::string& message) {
  std::fprintf(stderr, "error kind=%s exit=%d message=%s\n", kind.c_str(), code,
               json(message).dump(-1, ' ', false, json::error_handler_t::replace).c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-order interaction analysis, modulation training and verification."};
  app.require_subcommand(1);
  int code = 0;

  auto* verify = app.add_subcommand("verify", "Run the exactness and simulation oracle suites.");
  std::string suite = "all";
  std::uint64_t verify_seed = 0;
  verify->add_option("--suite", suite)->check(CLI::IsMember({"efficiency", "theorem2", "gradsim", "all"}));
  verify->add_option("--seed", verify_seed);

  auto* analyze = app.add_subcommand("analyze", "Interaction-strength profile of a trained model.");
  AnalyzeArgs aa;
  analyze->add_option("--model", aa.model)->required();
  analyze->add_option("--data", aa.data)->required();
  analyze->add_option("--label", aa.label, "label column name");
  analyze->add_option("--orders", aa.orders, "comma-separated orders (default: all, at most 21)");
  analyze->add_option("--pairs", aa.pairs, "pairs per order (default: all)");
  analyze->add_option("--samples", aa.samples, "contexts per pair and order (default: all)");
  analyze->add_option("--rows", aa.rows, "number of rows to explain");
  analyze->add_option("--seed", aa.seed);
  analyze->add_option("--out", aa.out)->required();

  auto* theory = app.add_subcommand("theory", "Normalized learning-strength curve.");
  int theory_n = 0;
  std::string fit_path, theory_out, fit_out;
  theory->add_option("--n", theory_n)->required();
  theory->add_option("--fit", fit_path, "profile CSV to fit an effective player count to");
  theory->add_option("--out", theory_out, "curve CSV (default: stdout)");
  theory->add_option("--fit-out", fit_out, "fit JSON (default: stdout)");

  auto* train = app.add_subcommand("train", "Train an MLP with optional modulation terms.");
  std::string config_path, train_data, train_label = "label", out_dir;
  train->add_option("--config", config_path)->required();
  train->add_option("--data", train_data)->required();
  train->add_option("--label", train_label);
  train->add_option("--out-dir", out_dir)->required();

  auto* attack = app.add_subcommand("attack", "Adversarial accuracy under L-infinity PGD.");
  std::string attack_model, attack_data, attack_label = "label", attack_out;
  interlab::AttackConfig attack_cfg;
  std::uint64_t attack_seed = 0;
  attack->add_option("--model", attack_model)->required();
  attack->add_option("--data", attack_data)->required();
  attack->add_option("--label", attack_label);
  attack->add_option("--eps", attack_cfg.epsilon);
  attack->add_option("--steps", attack_cfg.steps);
  attack->add_option("--step-size", attack_cfg.step_size);
  attack->add_option("--seed", attack_seed);
  attack->add_option("--out", attack_out, "result JSON (default: stdout)");

  auto* make_data = app.add_subcommand("make-data", "Write a bundled synthetic task as CSV.");
  std::string task = "pairwise", data_out;
  interlab::TaskSpec task_spec;
  make_data->add_option("--task", task);
  make_data->add_option("--rows", task_spec.rows);
  make_data->add_option("--features", task_spec.features);
  make_data->add_option("--noise", task_spec.label_noise);
  make_data->add_option("--conjunction-size", task_spec.conjunction_size);
  make_data->add_option("--seed", task_spec.seed);
  make_data->add_option("--out", data_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 1, e.what());
  }

  try {
    if (*verify) code = run_verify(suite, verify_seed);
    else if (*analyze) code = run_analyze(aa);
    else if (*theory) code = run_theory(theory_n, fit_path, theory_out, fit_out);
    else if (*train) code = run_train(config_path, train_data, train_label, out_dir);
    else if (*attack) code = run_attack(attack_model, attack_data, attack_label, attack_cfg, attack_seed, attack_out);
    else if (*make_data) code = run_make_data(task, task_spec, data_out);
  } catch (const interlab::Error& e) {
    return fail(e.kind(), static_cast<int>(e.exit_code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail("validation", 1, e.what());
  } catch (const std::exception& e) {
    return fail("internal", 1, e.what());
  }
  return code;
}
