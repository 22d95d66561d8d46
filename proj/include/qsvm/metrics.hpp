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

// Confusion matrices and the indicators derived from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qsvm/error.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

/// k x k counts, rows = actual class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {}

  std::size_t k() const { return k_; }
  std::size_t operator()(std::size_t actual, std::size_t predicted) const {
    return counts_[actual * k_ + predicted];
  }
  void add(std::size_t actual, std::size_t predicted, std::size_t n = 1) {
    require(actual < k_ && predicted < k_, "confusion matrix index out of range");
    counts_[actual * k_ + predicted] += n;
  }
  std::size_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }
  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) s += (*this)(i, i);
    return s;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted, std::size_t k) {
  require(actual.size() == predicted.size(), "confusion: actual and predicted lengths differ (" +
                                                 std::to_string(actual.size()) + " vs " +
                                                 std::to_string(predicted.size()) + ")");
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    require(actual[i] >= 0 && static_cast<std::size_t>(actual[i]) < k &&
                predicted[i] >= 0 && static_cast<std::size_t>(predicted[i]) < k,
            "confusion: label out of range 0.." + std::to_string(k - 1) + " at position " +
                std::to_string(i));
    cm.add(static_cast<std::size_t>(actual[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

/// +1 maps to index 0 (positive), -1 to index 1 (negative).
inline ConfusionMatrix binary_confusion(std::span<const int> actual, std::span<const int> predicted) {
  auto to_index = [](int label) {
    require(label == 1 || label == -1, "binary confusion: expected labels in {-1, +1}");
    return label == 1 ? 0 : 1;
  };
  std::vector<int> a, p;
  for (int v : actual) a.push_back(to_index(v));
  for (int v : predicted) p.push_back(to_index(v));
  return confusion(a, p, 2);
}

struct BinaryReport {
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  // Set when the indicator's denominator was zero; the value is then 0.
  bool accuracy_degenerate = false, precision_degenerate = false;
  bool recall_degenerate = false, f1_degenerate = false;
};

inline BinaryReport binary_report(const ConfusionMatrix& cm) {
  require(cm.k() == 2, "binary report needs a 2x2 confusion matrix");
  BinaryReport r;
  r.tp = cm(0, 0);
  r.fn = cm(0, 1);
  r.fp = cm(1, 0);
  r.tn = cm(1, 1);
  auto ratio = [](double num, double den, bool& flag) {
    if (den == 0.0) {
      flag = true;
      return 0.0;
    }
    return num / den;
  };
  const auto tp = static_cast<double>(r.tp), fn = static_cast<double>(r.fn);
  const auto fp = static_cast<double>(r.fp), tn = static_cast<double>(r.tn);
  r.accuracy = ratio(tp + tn, tp + tn + fp + fn, r.accuracy_degenerate);
  r.precision = ratio(tp, tp + fp, r.precision_degenerate);
  r.recall = ratio(tp, tp + fn, r.recall_degenerate);
  r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall, r.f1_degenerate);
  return r;
}

/// trace / total, 0 when the matrix is empty.
inline double multiclass_accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) return 0.0;
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

struct AdjacencyErrors {
  std::size_t adjacent = 0;  // off by one position in the class ordering
  std::size_t distant = 0;   // off by two or more

  friend bool operator==(const AdjacencyErrors&, const AdjacencyErrors&) = default;
};

/// `ordering[p]` is the class index at position p along the natural order
/// of the classes (e.g. increasing angle).
inline AdjacencyErrors adjacency_errors(const ConfusionMatrix& cm, std::span<const std::size_t> ordering) {
  const auto k = cm.k();
  require(ordering.size() == k, "class ordering must list every class once");
  std::vector<std::size_t> position(k, k);
  for (std::size_t p = 0; p < k; ++p) {
    require(ordering[p] < k && position[ordering[p]] == k, "class ordering is not a permutation");
    position[ordering[p]] = p;
  }
  AdjacencyErrors out;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t p = 0; p < k; ++p) {
      if (a == p) continue;
      const auto dist = position[a] > position[p] ? position[a] - position[p] : position[p] - position[a];
      (dist == 1 ? out.adjacent : out.distant) += cm(a, p);
    }
  return out;
}

inline std::vector<std::size_t> natural_ordering(std::size_t k) {
  std::vector<std::size_t> o(k);
  std::iota(o.begin(), o.end(), std::size_t{0});
  return o;
}

inline double mean(std::span<const double> v) {
  require(!v.empty(), "mean of an empty list");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Population form: divides by n.
inline double population_stddev(std::span<const double> v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline std::string format_confusion(const ConfusionMatrix& cm, std::span<const std::string> names) {
  require(names.size() == cm.k(), "confusion: one name per class required");
  std::size_t width = 6;
  for (const auto& n : names) width = std::max(width, n.size() + 1);
  for (std::size_t a = 0; a < cm.k(); ++a)
    for (std::size_t p = 0; p < cm.k(); ++p) width = std::max(width, std::to_string(cm(a, p)).size() + 1);
  auto pad = [width](const std::string& s) { return std::string(width - std::min(width, s.size()), ' ') + s; };
  std::ostringstream out;
  out << pad("actual\\pred");
  for (const auto& n : names) out << pad(n);
  out << "\n";
  for (std::size_t a = 0; a < cm.k(); ++a) {
    out << pad(names[a]);
    for (std::size_t p = 0; p < cm.k(); ++p) out << pad(std::to_string(cm(a, p)));
    out << "\n";
  }
  return out.str();
}

inline std::string format_binary_report(const BinaryReport& r) {
  std::ostringstream out;
  out << "TP " << r.tp << "  FN " << r.fn << "  FP " << r.fp << "  TN " << r.tn << "\n";
  auto line = [&out](const char* name, double v, bool degenerate) {
    out << name << format_fixed(v) << (degenerate ? "  (undefined, reported as 0)" : "") << "\n";
  };
  line("accuracy  ", r.accuracy, r.accuracy_degenerate);
  line("precision ", r.precision, r.precision_degenerate);
  line("recall    ", r.recall, r.recall_degenerate);
  line("f1        ", r.f1, r.f1_degenerate);
  return out.str();
}

inline std::string binary_report_kv(const BinaryReport& r) {
  std::ostringstream out;
  out << "tp=" << r.tp << "\nfn=" << r.fn << "\nfp=" << r.fp << "\ntn=" << r.tn << "\n";
  out << "accuracy=" << format_real(r.accuracy) << "\n";
  out << "precision=" << format_real(r.precision) << "\n";
  out << "recall=" << format_real(r.recall) << "\n";
  out << "f1=" << format_real(r.f1) << "\n";
  out << "degenerate=" << (r.accuracy_degenerate ? "accuracy," : "") << (r.precision_degenerate ? "precision," : "")
      << (r.recall_degenerate ? "recall," : "") << (r.f1_degenerate ? "f1," : "") << "\n";
  return out.str();
}

}  // namespace qsvm
