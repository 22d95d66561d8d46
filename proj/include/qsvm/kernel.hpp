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

#include <cmath>
#include <span>
#include <string>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/matrix.hpp"

namespace qsvm {

enum class KernelKind { gaussian, linear };

struct KernelParams {
  KernelKind kind = KernelKind::gaussian;
  double gamma = 1.0;

  static KernelParams gaussian(double gamma) {
    require(gamma > 0.0 && std::isfinite(gamma), "gaussian kernel gamma must be positive");
    return {KernelKind::gaussian, gamma};
  }
  static KernelParams linear() { return {KernelKind::linear, 1.0}; }

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

inline std::string to_string(KernelKind kind) {
  return kind == KernelKind::gaussian ? "gaussian" : "linear";
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "gaussian" || s == "rbf") return KernelKind::gaussian;
  if (s == "linear") return KernelKind::linear;
  throw Error("unknown kernel '" + s + "'");
}

/// gaussian: exp(-gamma * |x - y|^2); linear: <x, y>.
inline double kernel_eval(const KernelParams& p, std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "kernel dimension mismatch: " + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()));
  if (p.kind == KernelKind::linear) return dot(x, y);
  return std::exp(-p.gamma * squared_distance(x, y));
}

struct GramMatrix {
  Matrix entries;
  std::size_t n() const { return entries.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

/// Upper triangle evaluated once and mirrored, so the result is exactly
/// symmetric.
inline GramMatrix gram_matrix(const KernelParams& p, const Dataset& data) {
  const auto n = data.size();
  GramMatrix g{Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = kernel_eval(p, data.features(i), data.features(j));
      g.entries(i, j) = k;
      g.entries(j, i) = k;
    }
  }
  return g;
}

}  // namespace qsvm
