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

#ifndef INTERLAB_IO_HPP
#define INTERLAB_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "interlab/attack.hpp"
#include "interlab/error.hpp"
#include "interlab/interaction.hpp"
#include "interlab/mlp.hpp"
#include "interlab/modulation.hpp"
#include "interlab/theory.hpp"
#include "interlab/train.hpp"

namespace interlab {

using json = nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

/// printf("%.17g"): enough digits to round-trip any double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// 64-bit FNV-1a of \p bytes as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

/// Hash of the compact dump of \p j.
inline std::string config_hash(const json& j) { return fnv1a_hex(j.dump()); }

/// Hash of a file's bytes, so run records identify inputs by content.
inline std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

/// Provenance line written first in every CSV output.
inline std::string provenance_comment(const json& resolved, std::uint64_t seed) {
  return "# config_hash=" + config_hash(resolved) + " seed=" + std::to_string(seed);
}

// ---------------------------------------------------------------------------
// Strict JSON helpers

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing key '" + std::string(key) + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + ": key '" + std::string(key) + "' has the wrong type");
  }
}

template <typename T>
void read_optional(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get_field<T>(j, key, where);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model

inline json model_to_json(const MlpModel& m) {
  json j;
  j["version"] = kModelFormatVersion;
  j["layer_sizes"] = m.layer_sizes;
  j["weights"] = m.weights;
  j["biases"] = m.biases;
  j["seed"] = m.seed;
  if (!m.standardization.empty())
    j["standardization"] = {{"mean", m.standardization.mean}, {"scale", m.standardization.scale}};
  if (!m.label_values.empty()) j["label_values"] = m.label_values;
  if (!m.provenance.empty()) j["provenance"] = m.provenance;
  return j;
}

inline MlpModel model_from_json(const json& j) {
  const std::string where = "model";
  detail::reject_unknown_keys(j, {"version", "layer_sizes", "weights", "biases", "seed", "standardization",
                                 "label_values", "provenance"},
                              where);
  if (!j.contains("version")) throw ValidationError("model: missing key 'version'");
  const int version = detail::get_field<int>(j, "version", where);
  if (version != kModelFormatVersion)
    throw ValidationError("model: format version " + std::to_string(version) +
                          " is incompatible with this build (expects " +
                          std::to_string(kModelFormatVersion) + ")");
  MlpModel m;
  m.layer_sizes = detail::get_field<std::vector<int>>(j, "layer_sizes", where);
  m.weights = detail::get_field<std::vector<std::vector<double>>>(j, "weights", where);
  m.biases = detail::get_field<std::vector<std::vector<double>>>(j, "biases", where);
  m.seed = detail::get_field<std::uint64_t>(j, "seed", where);
  if (j.contains("standardization")) {
    const auto& s = j.at("standardization");
    detail::reject_unknown_keys(s, {"mean", "scale"}, "model.standardization");
    m.standardization.mean = detail::get_field<std::vector<double>>(s, "mean", "model.standardization");
    m.standardization.scale = detail::get_field<std::vector<double>>(s, "scale", "model.standardization");
  }
  detail::read_optional(j, "label_values", m.label_values, where);
  detail::read_optional(j, "provenance", m.provenance, where);
  validate_model(m);
  return m;
}

inline void save_model(const MlpModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << model_to_json(m).dump() << '\n';
}

inline MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON (" + std::string(e.what()) + ")");
  }
  return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Modulation and training configs

inline json modulation_to_json(const ModulationSpec& s) {
  return {{"kind", s.kind == ModulationKind::kEncourage ? "encourage" : "suppress"},
          {"r1", s.r1},
          {"r2", s.r2},
          {"lambda", s.lambda},
          {"pair_samples", s.pair_samples},
          {"seed", s.seed}};
}

inline ModulationSpec modulation_from_json(const json& j) {
  const std::string where = "modulation term";
  detail::reject_unknown_keys(j, {"kind", "r1", "r2", "lambda", "pair_samples", "seed"}, where);
  ModulationSpec s;
  const auto kind = detail::get_field<std::string>(j, "kind", where);
  if (kind == "encourage") s.kind = ModulationKind::kEncourage;
  else if (kind == "suppress") s.kind = ModulationKind::kSuppress;
  else throw ValidationError(where + ": kind must be 'encourage' or 'suppress', got '" + kind + "'");
  s.r1 = detail::get_field<double>(j, "r1", where);
  s.r2 = detail::get_field<double>(j, "r2", where);
  s.lambda = detail::get_field<double>(j, "lambda", where);
  detail::read_optional(j, "pair_samples", s.pair_samples, where);
  detail::read_optional(j, "seed", s.seed, where);
  if (!(s.r1 >= 0.0 && s.r1 < s.r2 && s.r2 <= 1.0))
    throw ValidationError(where + ": need 0 <= r1 < r2 <= 1");
  if (!(s.lambda >= 0.0)) throw ValidationError(where + ": lambda must be >= 0");
  if (s.pair_samples < 1) throw ValidationError(where + ": pair_samples must be >= 1");
  return s;
}

inline json train_config_to_json(const TrainConfig& c) {
  json terms = json::array();
  for (const auto& s : c.modulation) terms.push_back(modulation_to_json(s));
  return {{"hidden", c.hidden},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"modulation", terms},
          {"snapshot_every", c.snapshot_every},
          {"split", {{"train", c.train_fraction}, {"validation", c.validation_fraction}}},
          {"probe_samples", c.probe_samples},
          {"baseline", c.zero_baseline ? "zero" : "mean"}};
}

inline TrainConfig train_config_from_json(const json& j) {
  const std::string where = "train config";
  detail::reject_unknown_keys(j,
                              {"hidden", "epochs", "batch_size", "learning_rate", "seed", "modulation",
                               "snapshot_every", "split", "probe_samples", "baseline"},
                              where);
  TrainConfig c;
  detail::read_optional(j, "hidden", c.hidden, where);
  detail::read_optional(j, "epochs", c.epochs, where);
  detail::read_optional(j, "batch_size", c.batch_size, where);
  detail::read_optional(j, "learning_rate", c.learning_rate, where);
  detail::read_optional(j, "seed", c.seed, where);
  detail::read_optional(j, "snapshot_every", c.snapshot_every, where);
  detail::read_optional(j, "probe_samples", c.probe_samples, where);
  if (j.contains("modulation")) {
    if (!j.at("modulation").is_array()) throw ValidationError(where + ": 'modulation' must be an array");
    for (const auto& t : j.at("modulation")) c.modulation.push_back(modulation_from_json(t));
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    detail::reject_unknown_keys(s, {"train", "validation"}, where + ".split");
    c.train_fraction = detail::get_field<double>(s, "train", where + ".split");
    c.validation_fraction = detail::get_field<double>(s, "validation", where + ".split");
  }
  if (j.contains("baseline")) {
    const auto b = detail::get_field<std::string>(j, "baseline", where);
    if (b != "mean" && b != "zero") throw ValidationError(where + ": baseline must be 'mean' or 'zero'");
    c.zero_baseline = b == "zero";
  }
  validate_train_config(c);
  return c;
}

inline TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return train_config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON (" + std::string(e.what()) + ")");
  }
}

// ---------------------------------------------------------------------------
// Result files

/// Columns m,strength,normalized in ascending m.
inline void write_profile_csv(std::ostream& out, const OrderProfile& p, const std::string& comment = "") {
  if (!comment.empty()) out << comment << '\n';
  out << "m,strength,normalized\n";
  for (std::size_t k = 0; k < p.order_grid.size(); ++k)
    out << p.order_grid[k] << ',' << format_double(p.strengths[k]) << ','
        << format_double(p.normalized[k]) << '\n';
}

/// Reads a profile CSV (lines starting with '#' are skipped). The player
/// count is not stored in the file and must be supplied.
inline OrderProfile read_profile_csv(std::istream& in, int n) {
  OrderProfile p;
  p.n = n;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "m,strength,normalized" && line != "m,strength,normalized\r")
        throw ParseError("profile CSV: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw ParseError("profile CSV: line " + std::to_string(line_no) + " needs three columns");
    try {
      p.order_grid.push_back(std::stoi(a));
      p.strengths.push_back(std::stod(b));
      p.normalized.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ParseError("profile CSV: line " + std::to_string(line_no) + " is not numeric");
    }
  }
  if (!header || p.order_grid.empty()) throw ParseError("profile CSV: no rows");
  validate_grid(n, p.order_grid);
  normalize_profile(p);
  return p;
}

inline void write_theory_csv(std::ostream& out, const TheoryCurve& c, const std::string& comment = "") {
  if (!comment.empty()) out << comment << '\n';
  out << "m,f_hat\n";
  for (std::size_t k = 0; k < c.orders.size(); ++k)
    out << c.orders[k] << ',' << format_double(c.f_hat[k]) << '\n';
}

inline void write_train_log_csv(std::ostream& out, const TrainLog& log, const std::string& comment = "") {
  if (!comment.empty()) out << comment << '\n';
  out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& e : log.epochs)
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.train_acc) << ','
        << format_double(e.val_loss) << ',' << format_double(e.val_acc) << '\n';
}

inline json efficiency_to_json(const EfficiencyReport& r) {
  return {{"lhs", r.lhs},
          {"reconstruction", r.reconstruction},
          {"residual", r.residual},
          {"order_contributions", r.order_contributions},
          {"independent_sum", r.independent_sum},
          {"empty_value", r.empty_value}};
}

inline json effective_fit_to_json(const EffectiveFit& f) {
  return {{"n_prime", f.n_prime}, {"mismatch", f.mismatch}};
}

}  // namespace interlab

#endif  // INTERLAB_IO_HPP
