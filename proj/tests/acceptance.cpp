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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--out-dir DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "interlab/interlab.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace interlab;

namespace {

constexpr std::uint64_t kSeed = 0;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s criterion=%d name=%s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) { return format_double(v); }

// 1 -----------------------------------------------------------------------

void efficiency() {
  Stopwatch t;
  double worst = 0.0;
  for (int g = 0; g < 100; ++g) {
    const int n = 4 + g % 7;
    const auto game = synthetic_game(random_polynomial_spec(n, n, child_seed(kSeed, static_cast<std::uint64_t>(g))));
    const auto r = efficiency_residual(game);
    worst = std::max(worst, r.residual / std::max(1.0, std::abs(r.lhs)));
  }
  const double s = t.seconds();
  report(1, "efficiency_identity", worst < 1e-9 && s < 30.0,
         "max_relative_residual=" + fmt(worst) + " threshold=1e-09 seconds=" + fmt(s));
}

// 2 -----------------------------------------------------------------------

void band_identity() {
  Stopwatch t;
  struct Band {
    int n;
    double r1, r2;
  };
  std::string detail;
  double worst = 0.0;
  for (const Band b : {Band{6, 1.0 / 3.0, 5.0 / 6.0}, Band{8, 0.25, 0.75}, Band{10, 0.2, 0.5}}) {
    const double r = verify_theorem2(b.n, b.r1, b.r2, 50, kSeed).max_residual;
    worst = std::max(worst, r);
    detail += "n" + std::to_string(b.n) + "=" + fmt(r) + " ";
  }
  const double s = t.seconds();
  report(2, "band_output_identity", worst < 1e-8 && s < 120.0,
         detail + "threshold=1e-08 seconds=" + fmt(s));
}

// 3 -----------------------------------------------------------------------

void learning_strength() {
  Stopwatch t;
  const GradSimConfig cfg{.n = 12, .dims = 1000, .sigma = 1.0, .trials = 200, .seed = kSeed};
  const double base = simulate_learning_strength(cfg, 0);
  double worst = 0.0;
  int worst_m = 0;
  for (int m = 0; m <= cfg.n - 2; ++m) {
    const double err = std::abs(simulate_learning_strength(cfg, m) / base / learning_strength_hat(cfg.n, m) - 1.0);
    if (err > worst) worst = err, worst_m = m;
  }
  const double s = t.seconds();
  report(3, "learning_strength_simulation", worst < 0.03 && s < 60.0,
         "max_relative_error=" + fmt(worst) + " at_m=" + std::to_string(worst_m) + " threshold=0.03 seconds=" +
             fmt(s));
}

// 4 -----------------------------------------------------------------------

void u_shape() {
  std::string outside;
  for (int n = 8; n <= 32; ++n) {
    const auto c = theory_curve(n);
    const int argmin = static_cast<int>(std::min_element(c.f_hat.begin(), c.f_hat.end()) - c.f_hat.begin());
    const double top = n - 2;
    if (argmin < top / 3.0 || argmin > 2.0 * top / 3.0)
      outside += (outside.empty() ? "" : ",") + std::to_string(n) + ":" + std::to_string(argmin);
  }
  report(4, "theory_u_shape", outside.empty(),
         "n_range=8..32 outside_middle_third=" + (outside.empty() ? std::string("none") : outside));
}

// 5 -----------------------------------------------------------------------

void mc_consistency() {
  Stopwatch t;
  std::string detail;
  bool pass = true;
  for (int m : {2, 5, 8}) {
    int covered = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      const std::uint64_t seed = child_seed(child_seed(kSeed, static_cast<std::uint64_t>(m)), trial);
      const auto game = synthetic_game(random_polynomial_spec(12, 6, seed));
      Rng rng(child_seed(seed, 1));
      const int i = static_cast<int>(rng.uniform_below(12));
      int j = static_cast<int>(rng.uniform_below(11));
      if (j >= i) ++j;
      const double exact = interaction_order_exact(game, i, j, m).value;
      const auto e = interaction_order_mc(game, i, j, m, 2000, seed);
      // Rounding floor: a context-independent integrand has a zero spread.
      if (std::abs(e.value - exact) <= 3.0 * e.std_error + 1e-12 * (1.0 + std::abs(exact))) ++covered;
    }
    pass = pass && covered >= 99;
    detail += "m" + std::to_string(m) + "=" + std::to_string(covered) + "/100 ";
  }
  const double s = t.seconds();
  report(5, "mc_consistency", pass && s < 180.0, detail + "required=99 seconds=" + fmt(s));
}

// 6 -----------------------------------------------------------------------

struct Fixture {
  MlpModel model;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  Baseline baseline;
};

Fixture make_fixture(int n, int classes, std::size_t rows, std::uint64_t seed) {
  Fixture f{mlp_init({n, 10, 8, classes}, seed), {}, {}, Baseline{std::vector<double>(n)}};
  Rng rng(child_seed(seed, 1));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    f.rows.push_back(x);
    f.labels.push_back(static_cast<int>(rng.uniform_below(classes)));
  }
  for (double& b : f.baseline.values) b = 0.1 * rng.normal();
  return f;
}

template <typename Objective>
double gradient_error(const MlpModel& model, Objective objective) {
  const auto analytic = gradient(model, objective);
  const auto fd = oracle::finite_difference(model, [&](const MlpModel& m) { return objective(m, nullptr); });
  return oracle::relative_error(oracle::flatten(analytic.grad), fd);
}

void gradients() {
  Stopwatch t;
  std::map<std::string, double> worst;
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const Fixture f = make_fixture(8, 3, 4, seed);
    const Batch batch = full_batch(f.rows, f.labels);
    const std::vector<ModulationSpec> terms{
        {.kind = ModulationKind::kEncourage, .r1 = 0.3, .r2 = 0.7, .lambda = 1.0, .pair_samples = 4, .seed = 1},
        {.kind = ModulationKind::kSuppress, .r1 = 0.7, .r2 = 1.0, .lambda = 1.0, .pair_samples = 4, .seed = 2}};
    auto track = [&](const std::string& name, double err) { worst[name] = std::max(worst[name], err); };
    track("ce", gradient_error(f.model, [&](const MlpModel& m, MlpGradient* g) {
            return cross_entropy_loss(m, batch, g);
          }));
    track("encourage", gradient_error(f.model, [&](const MlpModel& m, MlpGradient* g) {
            return loss_encourage(m, batch, f.baseline, 0.3, 0.7, 4, seed, g);
          }));
    track("suppress", gradient_error(f.model, [&](const MlpModel& m, MlpGradient* g) {
            return loss_suppress(m, batch, f.baseline, 0.7, 1.0, 4, seed, g);
          }));
    track("combined", gradient_error(f.model, [&](const MlpModel& m, MlpGradient* g) {
            return combined_loss(m, batch, f.baseline, terms, seed, g);
          }));
  }
  std::string detail;
  double overall = 0.0;
  for (const auto& [name, err] : worst) {
    detail += name + "=" + fmt(err) + " ";
    overall = std::max(overall, err);
  }
  const double s = t.seconds();
  report(6, "loss_gradients", overall < 1e-4 && s < 60.0, detail + "threshold=0.0001 seconds=" + fmt(s));
}

// 7-11 ------------------------------------------------------------------

constexpr Variant kVariants[] = {Variant::kNormal, Variant::kLowOrder, Variant::kMidOrder, Variant::kHighOrder};

struct TaskRun {
  std::string task;
  std::map<std::string, double> train_loss, gap, adversarial, mid_fraction, high_fraction;
  OrderProfile normal_profile;
};

TrainConfig desk_config() {
  TrainConfig cfg;
  cfg.hidden = {64, 64};
  cfg.epochs = 150;
  cfg.batch_size = 32;
  cfg.learning_rate = 0.2;
  cfg.seed = kSeed;
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError(path.string() + ": cannot open for writing");
}

TaskRun run_task(TaskKind kind, const std::string& name, const fs::path& dir) {
  const TaskSpec spec{.kind = kind, .rows = 600, .features = 12, .seed = kSeed};
  const auto ds = make_synthetic_task(spec);
  const int n = spec.features;
  TaskRun run;
  run.task = name;
  json metrics{{"task", name}};
  for (Variant v : kVariants) {
    TrainConfig cfg = desk_config();
    cfg.modulation = variant_terms(v, 8);
    const auto data = prepare_data(cfg, ds);
    const auto result = train_prepared(cfg, data);
    const auto profile = model_profile(result.model, data.val_x, data.val_y, data.baseline, kSeed);
    const auto& last = result.log.epochs.back();
    const std::string key = variant_name(v);
    run.train_loss[key] = last.train_loss;
    run.gap[key] = last.val_loss - last.train_loss;
    run.adversarial[key] = adversarial_accuracy(result.model, data.val_x, data.val_y,
                                                AttackConfig{.epsilon = 0.3, .steps = 50, .step_size = 0.01});
    run.mid_fraction[key] = band_fraction(profile, 0.3 * n, 0.7 * n);
    run.high_fraction[key] = band_fraction(profile, 0.7 * n, n);
    if (v == Variant::kNormal) run.normal_profile = profile;

    const fs::path vdir = dir / name / key;
    fs::create_directories(vdir);
    save_model(result.model, (vdir / "model.json").string());
    std::ostringstream log, prof;
    write_train_log_csv(log, result.log);
    write_profile_csv(prof, profile, "# seed=" + std::to_string(kSeed) + " n=" + std::to_string(n));
    write_file(vdir / "train_log.csv", log.str());
    write_file(vdir / "profile.csv", prof.str());
    metrics[key] = {{"train_loss", run.train_loss[key]},
                    {"loss_gap", run.gap[key]},
                    {"val_accuracy", last.val_acc},
                    {"adversarial_accuracy", run.adversarial[key]},
                    {"mid_fraction", run.mid_fraction[key]},
                    {"high_fraction", run.high_fraction[key]}};
  }
  write_file(dir / name / "metrics.json", metrics.dump(2) + "\n");
  return run;
}

std::vector<TaskRun> run_desk(const fs::path& dir) {
  return {run_task(TaskKind::kPairwise, "pairwise", dir), run_task(TaskKind::kConjunction, "conjunction", dir)};
}

void bottleneck(const TaskRun& run, double seconds) {
  const OrderProfile& p = run.normal_profile;
  const double top = p.n - 2;
  double mid_min = INFINITY;
  for (std::size_t k = 0; k < p.order_grid.size(); ++k) {
    const int m = p.order_grid[k];
    if (m >= top / 3.0 && m <= 2.0 * top / 3.0) mid_min = std::min(mid_min, p.normalized[k]);
  }
  const double j0 = p.normalized.front(), jn = p.normalized.back();
  report(7, "desk_bottleneck", mid_min < j0 && mid_min < jn && seconds < 600.0,
         "task=" + run.task + " J0=" + fmt(j0) + " mid_min=" + fmt(mid_min) + " Jn-2=" + fmt(jn));
}

void modulation(const TaskRun& run, double seconds) {
  const double mid_gain = run.mid_fraction.at("mid") / run.mid_fraction.at("normal") - 1.0;
  const double high_drop = 1.0 - run.high_fraction.at("low") / run.high_fraction.at("normal");
  report(8, "desk_modulation", mid_gain >= 0.2 && high_drop >= 0.2 && seconds < 1200.0,
         "task=" + run.task + " mid_band_gain=" + fmt(mid_gain) + " high_band_drop=" + fmt(high_drop) +
             " required=0.2");
}

void orderings(const std::vector<TaskRun>& runs, double seconds) {
  bool pass = seconds < 1200.0;
  std::string detail;
  for (const auto& r : runs) {
    const bool fit = r.train_loss.at("high") <= r.train_loss.at("normal") &&
                     r.train_loss.at("normal") <= r.train_loss.at("low");
    const bool gen = r.gap.at("low") <= r.gap.at("normal") && r.gap.at("normal") <= r.gap.at("high");
    pass = pass && fit && gen;
    detail += r.task + ":train_loss(high,normal,low)=" + fmt(r.train_loss.at("high")) + "," +
              fmt(r.train_loss.at("normal")) + "," + fmt(r.train_loss.at("low")) + (fit ? "(ok)" : "(violated)") +
              " gap(low,normal,high)=" + fmt(r.gap.at("low")) + "," + fmt(r.gap.at("normal")) + "," +
              fmt(r.gap.at("high")) + (gen ? "(ok)" : "(violated)") + " ";
  }
  report(9, "fit_generalization_orderings", pass, detail);
}

void robustness(const std::vector<TaskRun>& runs, double seconds) {
  bool any = false;
  std::string detail;
  for (const auto& r : runs) {
    any = any || r.adversarial.at("low") >= r.adversarial.at("high");
    detail += r.task + ":low=" + fmt(r.adversarial.at("low")) + ",high=" + fmt(r.adversarial.at("high")) + " ";
  }
  report(10, "robustness_direction", any && seconds < 600.0, detail + "epsilon=0.3 steps=50");
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

void determinism(const fs::path& first, const fs::path& second) {
  const auto a = read_tree(first), b = read_tree(second);
  std::string differing;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) differing += (differing.empty() ? "" : ",") + name;
  }
  const bool pass = a.size() == b.size() && differing.empty() && !a.empty();
  report(11, "determinism", pass,
         "files=" + std::to_string(a.size()) + " differing=" + (differing.empty() ? std::string("none") : differing));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out_dir = "acceptance_run";
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--out-dir" && k + 1 < argc) {
      out_dir = argv[++k];
    } else {
      std::fprintf(stderr, "usage: acceptance [--out-dir DIR]\n");
      return 1;
    }
  }
  try {
    efficiency();
    band_identity();
    learning_strength();
    u_shape();
    mc_consistency();
    gradients();

    fs::remove_all(out_dir);
    Stopwatch t;
    const auto runs = run_desk(out_dir / "first");
    const double seconds = t.seconds();
    std::printf("desk runs finished seconds=%s\n", fmt(seconds).c_str());
    bottleneck(runs[0], seconds);
    modulation(runs[0], seconds);
    orderings(runs, seconds);
    robustness(runs, seconds);

    run_desk(out_dir / "second");
    determinism(out_dir / "first", out_dir / "second");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("summary failed=%d of 11\n", failures);
  return failures == 0 ? 0 : 1;
}
