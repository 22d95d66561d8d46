// Copyright 2026 The qsvm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Labeled point sets, CSV ingestion and shuffle/split management.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qsvm/error.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

struct LabeledPoint {
  std::vector<double> features;
  int label = 0;

  friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Nonempty, fixed-dimension set of finite labeled points. Immutable once
/// built; every constructor path validates.
class Dataset {
 public:
  explicit Dataset(std::vector<LabeledPoint> points, std::vector<std::string> feature_names = {})
      : points_(std::move(points)), feature_names_(std::move(feature_names)) {
    require(!points_.empty(), "empty dataset");
    dim_ = points_.front().features.size();
    require(dim_ >= 1, "dataset points have no features");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      require(p.features.size() == dim_, "point " + std::to_string(i) + " has dimension " +
                                             std::to_string(p.features.size()) + ", expected " +
                                             std::to_string(dim_));
      for (double v : p.features)
        require(std::isfinite(v), "point " + std::to_string(i) + " has a non-finite feature");
    }
    if (feature_names_.empty()) {
      for (std::size_t j = 0; j < dim_; ++j) feature_names_.push_back("f" + std::to_string(j));
    }
    require(feature_names_.size() == dim_, "feature name count does not match dimension");
  }

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return dim_; }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<LabeledPoint>& points() const { return points_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  std::span<const double> features(std::size_t i) const { return points_[i].features; }
  int label(std::size_t i) const { return points_[i].label; }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.label);
    return out;
  }

  /// Sorted distinct label values.
  std::vector<int> classes() const {
    std::set<int> s;
    for (const auto& p : points_) s.insert(p.label);
    return {s.begin(), s.end()};
  }

  bool is_binary() const {
    return std::all_of(points_.begin(), points_.end(),
                       [](const LabeledPoint& p) { return p.label == -1 || p.label == 1; });
  }

  Dataset with_labels(std::span<const int> labels) const {
    require(labels.size() == points_.size(), "label count does not match dataset size");
    auto pts = points_;
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i].label = labels[i];
    return Dataset(std::move(pts), feature_names_);
  }

  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<LabeledPoint> pts;
    pts.reserve(indices.size());
    for (auto i : indices) {
      require(i < points_.size(), "subset index out of range");
      pts.push_back(points_[i]);
    }
    return Dataset(std::move(pts), feature_names_);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<LabeledPoint> points_;
  std::vector<std::string> feature_names_;
  std::size_t dim_ = 0;
};

/// Raw CSV contents: header plus data rows, all cells trimmed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv_table(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(line, ',');
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    ++row_no;
    if (cells.size() != table.header.size())
      throw Error("row " + std::to_string(row_no) + ": expected " +
                  std::to_string(table.header.size()) + " columns, found " +
                  std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

namespace detail {

inline std::size_t find_column(const CsvTable& table, const std::string& name) {
  auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) throw Error("label column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - table.header.begin());
}

inline double parse_cell(const CsvTable& table, std::size_t row, std::size_t col) {
  auto v = parse_real(table.rows[row][col]);
  if (!v)
    throw Error("row " + std::to_string(row + 1) + ", column '" + table.header[col] +
                "': cannot parse '" + table.rows[row][col] + "' as a finite real");
  return *v;
}

}  // namespace detail

/// Builds a Dataset from CSV text. Rows are numbered from 1 after the header.
inline Dataset parse_csv(std::string_view text, const std::string& label_column) {
  const auto table = parse_csv_table(text);
  if (table.header.empty() || table.rows.empty()) throw Error("empty dataset");
  const auto label_col = detail::find_column(table, label_column);
  require(table.header.size() >= 2, "dataset has no feature columns");

  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (c != label_col) names.push_back(table.header[c]);

  std::vector<LabeledPoint> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    LabeledPoint p;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == label_col) {
        auto lbl = parse_integer(table.rows[r][c]);
        if (!lbl)
          throw Error("row " + std::to_string(r + 1) + ", column '" + table.header[c] +
                      "': cannot parse '" + table.rows[r][c] + "' as an integer label");
        p.label = static_cast<int>(*lbl);
      } else {
        p.features.push_back(detail::parse_cell(table, r, c));
      }
    }
    points.push_back(std::move(p));
  }
  return Dataset(std::move(points), std::move(names));
}

inline Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  if (!std::filesystem::exists(path)) throw Error("file not found: " + path.string());
  return parse_csv(read_file(path), label_column);
}

/// Feature rows for prediction. An empty file yields no rows; when
/// `label_column` names a present column it is dropped.
inline std::vector<std::vector<double>> load_feature_rows(
    const std::filesystem::path& path, const std::optional<std::string>& label_column) {
  if (!std::filesystem::exists(path)) throw Error("file not found: " + path.string());
  const auto table = parse_csv_table(read_file(path));
  std::optional<std::size_t> skip;
  if (label_column) {
    auto it = std::find(table.header.begin(), table.header.end(), *label_column);
    if (it != table.header.end()) skip = static_cast<std::size_t>(it - table.header.begin());
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<double> x;
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (!skip || c != *skip) x.push_back(detail::parse_cell(table, r, c));
    rows.push_back(std::move(x));
  }
  return rows;
}

inline std::string to_csv(const Dataset& data, const std::string& label_column = "label") {
  std::string out;
  for (const auto& name : data.feature_names()) out += name + ",";
  out += label_column + "\n";
  for (const auto& p : data.points()) {
    for (double v : p.features) out += format_real(v) + ",";
    out += std::to_string(p.label) + "\n";
  }
  return out;
}

/// Number of training points for a given fraction: ceil(fraction * n),
/// guarded against representation error in fractions like 34/45.
inline std::size_t train_count(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
}

/// Deterministic seeded permutation followed by a (train, test) cut.
inline std::pair<Dataset, Dataset> shuffle_split(const Dataset& data, double train_fraction,
                                                 std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "train fraction must lie in (0, 1)");
  const std::size_t n = data.size();
  const std::size_t n_train = train_count(n, train_fraction);
  require(n_train >= 1 && n_train < n, "train fraction " + format_real(train_fraction) +
                                           " leaves an empty part for " + std::to_string(n) +
                                           " points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::span<const std::size_t> all(order);
  return {data.subset(all.first(n_train)), data.subset(all.subspan(n_train))};
}

}  // namespace qsvm
