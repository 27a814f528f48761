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

#ifndef INTERLAB_DATASET_HPP
#define INTERLAB_DATASET_HPP

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "interlab/error.hpp"
#include "interlab/mlp.hpp"
#include "interlab/rng.hpp"

namespace interlab {

/// Numeric feature matrix with densely indexed integer labels.
struct TabularDataset {
  std::vector<std::string> feature_names;
  std::string label_name = "label";
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<std::string> label_values;  // label_values[c] is the original text of class c

  std::size_t rows() const noexcept { return features.size(); }
  int num_features() const noexcept { return static_cast<int>(feature_names.size()); }
  int num_classes() const noexcept { return static_cast<int>(label_values.size()); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

inline bool parse_integer(const std::string& text, long long& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(text.c_str(), &end, 10);
  return errno == 0 && end == text.c_str() + text.size();
}

}  // namespace detail

/// Reads a comma-separated file with a header row. Labels are re-indexed to
/// 0..C-1: numerically when every label is an integer, otherwise in
/// lexicographic order of the label text. Quoted cells are not supported.
inline TabularDataset read_dataset_csv(std::istream& in, const std::string& label_column,
                                       const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError(source + ": empty file (no header row)");
  const auto header = detail::split_csv_line(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end())
    throw ParseError(source + ": label column '" + label_column + "' not found in header");
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  TabularDataset ds;
  ds.label_name = label_column;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_idx) ds.feature_names.push_back(header[c]);

  std::vector<std::string> raw_labels;
  std::size_t data_row = 0;
  while (next_line()) {
    ++data_row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError(source + ": line " + std::to_string(line_no) + " (data row " +
                       std::to_string(data_row) + ") has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) continue;
      double v = 0.0;
      if (!detail::parse_double(cells[c], v))
        throw ParseError(source + ": line " + std::to_string(line_no) + " (data row " +
                         std::to_string(data_row) + "), column '" + header[c] +
                         "': non-numeric value '" + cells[c] + "'");
      row.push_back(v);
    }
    if (cells[label_idx].empty())
      throw ParseError(source + ": line " + std::to_string(line_no) + " (data row " +
                       std::to_string(data_row) + "): missing label");
    ds.features.push_back(std::move(row));
    raw_labels.push_back(cells[label_idx]);
  }
  if (ds.features.empty()) throw ParseError(source + ": no data rows");
  if (ds.feature_names.empty()) throw ParseError(source + ": no feature columns");

  bool all_integer = true;
  for (const auto& l : raw_labels) {
    long long v;
    all_integer = all_integer && detail::parse_integer(l, v);
  }
  std::vector<std::string> distinct(raw_labels);
  std::sort(distinct.begin(), distinct.end(), [&](const std::string& a, const std::string& b) {
    if (all_integer) return std::stoll(a) < std::stoll(b);
    return a < b;
  });
  distinct.erase(std::unique(distinct.begin(), distinct.end(),
                             [&](const std::string& a, const std::string& b) {
                               return all_integer ? std::stoll(a) == std::stoll(b) : a == b;
                             }),
                 distinct.end());
  std::map<std::string, int> index;
  for (std::size_t c = 0; c < distinct.size(); ++c) index[distinct[c]] = static_cast<int>(c);
  for (const auto& l : raw_labels) {
    int c;
    if (all_integer) {
      const long long v = std::stoll(l);
      c = static_cast<int>(std::find_if(distinct.begin(), distinct.end(),
                                        [&](const std::string& d) { return std::stoll(d) == v; }) -
                           distinct.begin());
    } else {
      c = index.at(l);
    }
    ds.labels.push_back(c);
  }
  ds.label_values = std::move(distinct);
  return ds;
}

inline TabularDataset load_dataset_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return read_dataset_csv(in, label_column, path);
}

/// Writes features plus the label column (original label text) as CSV.
inline void write_dataset_csv(std::ostream& out, const TabularDataset& ds) {
  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.label_name << '\n';
  char buf[32];
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.features[r]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << ds.label_values[static_cast<std::size_t>(ds.labels[r])] << '\n';
  }
}

// ---------------------------------------------------------------------------

/// Per-column mean and population std of \p rows; zero-variance columns get
/// scale 1.
inline Standardization fit_standardization(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("cannot standardize an empty dataset");
  const std::size_t cols = rows.front().size();
  Standardization st{std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0)};
  for (const auto& r : rows)
    for (std::size_t k = 0; k < cols; ++k) st.mean[k] += r[k];
  for (double& m : st.mean) m /= static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t k = 0; k < cols; ++k) st.scale[k] += (r[k] - st.mean[k]) * (r[k] - st.mean[k]);
  for (double& s : st.scale) {
    s = std::sqrt(s / static_cast<double>(rows.size()));
    if (!(s > 0.0)) s = 1.0;
  }
  return st;
}

inline std::vector<double> apply_standardization(const Standardization& st, std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  if (st.empty()) return out;
  if (st.mean.size() != x.size()) throw DimensionError("standardization length mismatch");
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (out[k] - st.mean[k]) / st.scale[k];
  return out;
}

inline std::vector<std::vector<double>> apply_standardization(const Standardization& st,
                                                              const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply_standardization(st, r));
  return out;
}

/// Seeded shuffle of row indices followed by a train/validation cut.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

inline SplitIndices split_rows(std::size_t rows, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("train fraction must lie in (0, 1)");
  std::vector<std::size_t> idx(rows);
  for (std::size_t k = 0; k < rows; ++k) idx[k] = k;
  Rng rng(seed);
  for (std::size_t k = rows; k > 1; --k) std::swap(idx[k - 1], idx[rng.uniform_below(k)]);
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(rows)));
  if (cut == 0 || cut == rows) throw ValidationError("split leaves an empty train or validation set");
  return {{idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cut)},
          {idx.begin() + static_cast<std::ptrdiff_t>(cut), idx.end()}};
}

// ---------------------------------------------------------------------------
// Bundled synthetic tasks

enum class TaskKind {
  kBlobs,        // unit-variance blobs 8 standard deviations apart
  kPairwise,     // sign of a sum of pairwise products
  kConjunction,  // all of k features above a threshold
};

struct TaskSpec {
  TaskKind kind = TaskKind::kPairwise;
  std::size_t rows = 600;
  int features = 12;
  double label_noise = 0.0;  // probability of flipping a label
  int conjunction_size = 4;
  std::uint64_t seed = 0;
};

namespace detail {
/// Standard normal upper-tail quantile by bisection on erfc.
inline double normal_upper_quantile(double tail) {
  double lo = -10.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

inline TabularDataset make_synthetic_task(const TaskSpec& spec) {
  if (spec.features < 2) throw ValidationError("synthetic task needs at least two features");
  if (spec.rows < 2) throw ValidationError("synthetic task needs at least two rows");
  Rng rng(spec.seed);
  TabularDataset ds;
  for (int k = 0; k < spec.features; ++k) ds.feature_names.push_back("x" + std::to_string(k));
  ds.label_name = "label";
  ds.label_values = {"0", "1"};

  // Task structure is drawn first so it does not depend on the row count.
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> coeffs;
  std::vector<double> direction(static_cast<std::size_t>(spec.features));
  for (double& d : direction) d = rng.normal();
  for (int k = 0; k < spec.features; ++k) {
    const int a = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec.features)));
    int b = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec.features - 1)));
    if (b >= a) ++b;
    pairs.emplace_back(a, b);
    coeffs.push_back((rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.5));
  }
  const int csize = std::clamp(spec.conjunction_size, 1, spec.features);
  const double threshold = detail::normal_upper_quantile(std::pow(0.5, 1.0 / csize));

  for (std::size_t r = 0; r < spec.rows; ++r) {
    std::vector<double> x(static_cast<std::size_t>(spec.features));
    for (double& v : x) v = rng.normal();
    int y = 0;
    switch (spec.kind) {
      case TaskKind::kBlobs: {
        y = rng.uniform01() < 0.5 ? 0 : 1;
        double norm = 0.0;
        for (double d : direction) norm += d * d;
        norm = std::sqrt(norm);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += (y ? 4.0 : -4.0) * direction[k] / norm;
        break;
      }
      case TaskKind::kPairwise: {
        double score = 0.0;
        for (std::size_t p = 0; p < pairs.size(); ++p)
          score += coeffs[p] * x[static_cast<std::size_t>(pairs[p].first)] *
                   x[static_cast<std::size_t>(pairs[p].second)];
        y = score > 0.0 ? 1 : 0;
        break;
      }
      case TaskKind::kConjunction: {
        bool all = true;
        for (int k = 0; k < csize; ++k) all = all && x[static_cast<std::size_t>(k)] > threshold;
        y = all ? 1 : 0;
        break;
      }
    }
    if (spec.label_noise > 0.0 && rng.uniform01() < spec.label_noise) y = 1 - y;
    ds.features.push_back(std::move(x));
    ds.labels.push_back(y);
  }
  return ds;
}

}  // namespace interlab

#endif  // INTERLAB_DATASET_HPP
