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
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

/// Centered (optionally standardized) projection onto the leading
/// principal directions of a training set.
struct PcaTransform {
  std::vector<double> mean;
  std::vector<double> scale;                    // 1.0 unless fitted with standardize
  std::vector<std::vector<double>> components;  // target_dim unit rows, length input_dim
  std::vector<double> explained_variance;       // descending, one per component

  std::size_t input_dim() const { return mean.size(); }
  std::size_t target_dim() const { return components.size(); }

  friend bool operator==(const PcaTransform&, const PcaTransform&) = default;
};

/// Covariance uses 1/(N-1). Each component is flipped so its
/// largest-magnitude entry (first one on ties) is nonnegative.
inline PcaTransform fit_pca(const Dataset& data, std::size_t target_dim, bool standardize = false) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  require(n >= 2, "PCA needs at least 2 points");
  require(target_dim >= 1 && target_dim <= d,
          "PCA target dimension " + std::to_string(target_dim) + " outside [1, " +
              std::to_string(d) + "]");

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = data.features(i)[j];

  PcaTransform t;
  Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  Eigen::RowVectorXd sd = Eigen::RowVectorXd::Ones(d);
  if (standardize) {
    for (std::size_t j = 0; j < d; ++j) {
      const double s = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1));
      sd(j) = s > 1e-12 ? s : 1.0;
      x.col(j) /= sd(j);
    }
  }
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  ensure(solver.info() == Eigen::Success, "PCA eigendecomposition failed");

  t.mean.assign(mu.data(), mu.data() + d);
  t.scale.assign(sd.data(), sd.data() + d);
  for (std::size_t c = 0; c < target_dim; ++c) {
    const auto col = static_cast<Eigen::Index>(d - 1 - c);  // eigenvalues ascend
    Eigen::VectorXd v = solver.eigenvectors().col(col).normalized();
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < v.size(); ++j)
      if (std::abs(v(j)) > std::abs(v(arg))) arg = j;
    if (v(arg) < 0) v = -v;
    t.components.emplace_back(v.data(), v.data() + d);
    t.explained_variance.push_back(solver.eigenvalues()(col));
  }
  return t;
}

inline std::vector<double> project(const PcaTransform& t, std::span<const double> x) {
  require(x.size() == t.input_dim(), "PCA input dimension mismatch: transform expects " +
                                         std::to_string(t.input_dim()) + ", got " +
                                         std::to_string(x.size()));
  std::vector<double> centered(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) centered[j] = (x[j] - t.mean[j]) / t.scale[j];
  std::vector<double> y;
  y.reserve(t.target_dim());
  for (const auto& c : t.components) y.push_back(dot(c, centered));
  return y;
}

/// x = mean + scale * (components^T y).
inline std::vector<double> reconstruct(const PcaTransform& t, std::span<const double> y) {
  require(y.size() == t.target_dim(), "PCA reconstruction dimension mismatch");
  std::vector<double> x(t.input_dim(), 0.0);
  for (std::size_t c = 0; c < y.size(); ++c)
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += t.components[c][j] * y[c];
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = t.mean[j] + t.scale[j] * x[j];
  return x;
}

inline Dataset apply_pca(const PcaTransform& t, const Dataset& data) {
  require(data.dim() == t.input_dim(), "PCA input dimension mismatch: transform expects " +
                                           std::to_string(t.input_dim()) + ", data has " +
                                           std::to_string(data.dim()));
  std::vector<LabeledPoint> out;
  out.reserve(data.size());
  for (const auto& p : data.points()) out.push_back({project(t, p.features), p.label});
  std::vector<std::string> names;
  for (std::size_t c = 0; c < t.target_dim(); ++c) names.push_back("pc" + std::to_string(c));
  return Dataset(std::move(out), std::move(names));
}

inline std::string serialize_pca(const PcaTransform& t) {
  std::ostringstream out;
  auto row = [&out](const char* tag, const std::vector<double>& v) {
    out << tag;
    for (double x : v) out << ' ' << format_real(x);
    out << '\n';
  };
  out << "qsvm-pca 1\n";
  out << "input_dim " << t.input_dim() << "\n";
  out << "target_dim " << t.target_dim() << "\n";
  row("mean", t.mean);
  row("scale", t.scale);
  row("variance", t.explained_variance);
  for (const auto& c : t.components) row("component", c);
  return out.str();
}

inline PcaTransform parse_pca(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  PcaTransform t;
  std::size_t input_dim = 0, target_dim = 0;
  bool header = false;
  auto reals = [](const std::vector<std::string>& tok) {
    std::vector<double> v;
    for (std::size_t i = 1; i < tok.size(); ++i) v.push_back(require_real(tok[i], tok[0]));
    return v;
  };
  while (std::getline(in, line)) {
    auto tok = split_whitespace(line);
    if (tok.empty()) continue;
    if (!header) {
      require(tok.size() == 2 && tok[0] == "qsvm-pca" && tok[1] == "1", "not a PCA transform file");
      header = true;
    } else if (tok[0] == "input_dim" && tok.size() == 2) {
      input_dim = static_cast<std::size_t>(require_integer(tok[1], "input_dim"));
    } else if (tok[0] == "target_dim" && tok.size() == 2) {
      target_dim = static_cast<std::size_t>(require_integer(tok[1], "target_dim"));
    } else if (tok[0] == "mean") {
      t.mean = reals(tok);
    } else if (tok[0] == "scale") {
      t.scale = reals(tok);
    } else if (tok[0] == "variance") {
      t.explained_variance = reals(tok);
    } else if (tok[0] == "component") {
      t.components.push_back(reals(tok));
    } else {
      throw Error("PCA transform: unexpected line '" + line + "'");
    }
  }
  require(header, "not a PCA transform file");
  require(t.mean.size() == input_dim && t.scale.size() == input_dim, "PCA transform: bad mean/scale");
  require(t.components.size() == target_dim && target_dim >= 1, "PCA transform: bad component count");
  for (const auto& c : t.components) require(c.size() == input_dim, "PCA transform: bad component length");
  return t;
}

}  // namespace qsvm
