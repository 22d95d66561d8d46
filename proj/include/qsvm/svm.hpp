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

// Binary SVM models: annealing-based training through the QUBO encoding,
// decision functions, ensembles of low-energy solutions, bias scanning and
// a continuous dual baseline solved by pairwise coordinate updates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/kernel.hpp"
#include "qsvm/qubo.hpp"
#include "qsvm/solver.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

/// f(x) = sum_n alpha_n t_n k(x_n, x) + bias.
struct BinaryModel {
  std::vector<double> alphas;
  double bias = 0.0;
  std::shared_ptr<const Dataset> training;
  KernelParams kernel;
  double c_bound = 0.0;
  bool degenerate = false;        // bias denominator vanished
  std::optional<double> energy;   // QUBO energy of the sample it decodes

  std::size_t dim() const { return training->dim(); }
};

struct BiasResult {
  double bias = 0.0;
  bool degenerate = false;
};

inline constexpr double kBiasDenominatorFloor = 1e-12;

/// Weighted mean of the per-point residuals t_n - sum_m alpha_m t_m k(x_m, x_n)
/// with weights alpha_n (C - alpha_n). Falls back to 0 (flagged) when every
/// alpha sits on a box bound.
inline BiasResult compute_bias(std::span<const double> alphas, const Dataset& data,
                               const KernelParams& kernel, double c_bound) {
  require(alphas.size() == data.size(), "alpha count " + std::to_string(alphas.size()) +
                                            " does not match dataset size " +
                                            std::to_string(data.size()));
  for (double a : alphas)
    require(a >= 0.0 && a <= c_bound, "alpha outside the box [0, C]");
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < alphas.size(); ++n) {
    const double weight = alphas[n] * (c_bound - alphas[n]);
    if (weight == 0.0) continue;
    double s = 0.0;
    for (std::size_t m = 0; m < alphas.size(); ++m)
      if (alphas[m] != 0.0)
        s += alphas[m] * data.label(m) * kernel_eval(kernel, data.features(m), data.features(n));
    num += weight * (data.label(n) - s);
    den += weight;
  }
  if (den <= kBiasDenominatorFloor) return {0.0, true};
  return {num / den, false};
}

/// sign with sign(0) = +1.
inline int predict_sign(double decision) { return decision >= 0.0 ? 1 : -1; }

inline void require_dim(const BinaryModel& model, std::span<const double> x) {
  require(x.size() == model.dim(), "feature dimension mismatch: model expects " +
                                       std::to_string(model.dim()) + ", got " +
                                       std::to_string(x.size()));
}

/// sum_n alpha_n t_n k(x_n, x), without the bias.
inline double kernel_sum(const BinaryModel& model, std::span<const double> x) {
  require_dim(model, x);
  double s = 0.0;
  for (std::size_t n = 0; n < model.alphas.size(); ++n)
    if (model.alphas[n] != 0.0)
      s += model.alphas[n] * model.training->label(n) *
           kernel_eval(model.kernel, model.training->features(n), x);
  return s;
}

inline double decision_function(const BinaryModel& model, std::span<const double> x) {
  return kernel_sum(model, x) + model.bias;
}

/// Same value as decision_function given precomputed k(x_n, x) for all n.
inline double decision_from_kernel_column(const BinaryModel& model, std::span<const double> column) {
  require(column.size() == model.alphas.size(), "kernel column length mismatch");
  double s = 0.0;
  for (std::size_t n = 0; n < model.alphas.size(); ++n)
    if (model.alphas[n] != 0.0) s += model.alphas[n] * model.training->label(n) * column[n];
  return s + model.bias;
}

/// Members averaged pointwise: F(x) = mean_i f_i(x).
struct EnsembleModel {
  std::vector<BinaryModel> members;
  std::string trainer = "qsvm";            // "qsvm" or "classical"
  std::optional<EncodingParams> encoding;  // set for qsvm models

  std::size_t dim() const { return members.front().dim(); }
  const Dataset& training() const { return *members.front().training; }

  void validate() const {
    require(!members.empty(), "ensemble has no members");
    for (const auto& m : members) {
      require(m.training != nullptr, "ensemble member has no training points");
      require(*m.training == *members.front().training, "ensemble members must share training points");
      require(m.kernel == members.front().kernel, "ensemble members must share kernel parameters");
      require(m.alphas.size() == m.training->size(), "ensemble member alpha count mismatch");
    }
  }
};

inline double ensemble_decision(const EnsembleModel& model, std::span<const double> x) {
  require(!model.members.empty(), "ensemble has no members");
  double s = 0.0;
  for (const auto& m : model.members) s += decision_function(m, x);
  return s / static_cast<double>(model.members.size());
}

inline int predict(const EnsembleModel& model, std::span<const double> x) {
  return predict_sign(ensemble_decision(model, x));
}

/// Fraction of points whose +-1 label matches sign(F(x)).
inline double training_accuracy(const EnsembleModel& model, const Dataset& data) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    hits += predict(model, data.features(i)) == data.label(i);
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

struct TrainConfig {
  EncodingParams encoding;
  SamplerChoice sampler = AnnealSchedule{};
  std::size_t ensemble_size = 1;
};

inline void require_two_classes(const Dataset& data) {
  require_binary_labels(data);
  const auto cls = data.classes();
  require(cls.size() == 2, "single-class dataset: training needs both -1 and +1 labels");
}

/// Builds the QUBO, samples the ensemble_size lowest distinct states and
/// decodes each into a member with its own bias. Members ascend in energy;
/// fewer distinct states than requested shrink the ensemble.
inline EnsembleModel train_binary(const Dataset& data, const TrainConfig& config) {
  require(config.ensemble_size >= 1, "ensemble size must be >= 1");
  require_two_classes(data);
  const auto qubo = build_qubo(data, config.encoding);
  const auto samples = sample(config.sampler, qubo, config.ensemble_size);
  require(!samples.empty(), "sampler returned no solutions");

  auto training = std::make_shared<const Dataset>(data);
  const double c = config.encoding.c_bound();
  EnsembleModel model;
  model.trainer = "qsvm";
  model.encoding = config.encoding;
  for (const auto& s : samples.samples()) {
    BinaryModel m;
    m.alphas = decode_alphas(s.bits, config.encoding, data.size());
    const auto b = compute_bias(m.alphas, data, config.encoding.kernel, c);
    m.bias = b.bias;
    m.degenerate = b.degenerate;
    m.training = training;
    m.kernel = config.encoding.kernel;
    m.c_bound = c;
    m.energy = s.energy;
    model.members.push_back(std::move(m));
  }
  return model;
}

struct BiasAdjustment {
  double offset = 0.0;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
};

/// Scans offsets i*step for |i*step| <= radius and picks the one with the
/// best training accuracy; ties go to the smallest |offset|, then the
/// smallest offset.
inline BiasAdjustment find_bias_offset(const EnsembleModel& model, const Dataset& train,
                                       double radius, double step) {
  require(radius > 0.0 && step > 0.0, "bias scan radius and step must be positive");
  require(train.size() >= 1, "empty training set");
  model.validate();
  // Per member, per point sums without bias; shifting reuses them with the
  // same arithmetic as evaluating a shifted model.
  std::vector<std::vector<double>> sums(model.members.size());
  for (std::size_t m = 0; m < model.members.size(); ++m)
    for (std::size_t i = 0; i < train.size(); ++i)
      sums[m].push_back(kernel_sum(model.members[m], train.features(i)));

  auto accuracy_at = [&](double offset) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      double f = 0.0;
      for (std::size_t m = 0; m < model.members.size(); ++m)
        f += sums[m][i] + (model.members[m].bias + offset);
      f /= static_cast<double>(model.members.size());
      hits += predict_sign(f) == train.label(i);
    }
    return static_cast<double>(hits) / static_cast<double>(train.size());
  };

  const auto steps = static_cast<long long>(std::floor(radius / step + 1e-9));
  BiasAdjustment best{0.0, accuracy_at(0.0), accuracy_at(0.0)};
  // Visiting 0, -1, +1, -2, +2, ... and requiring strict improvement
  // realizes the tie rule.
  for (long long i = 1; i <= steps; ++i) {
    for (long long s : {-i, i}) {
      const double offset = static_cast<double>(s) * step;
      const double acc = accuracy_at(offset);
      if (acc > best.accuracy_after) {
        best.offset = offset;
        best.accuracy_after = acc;
      }
    }
  }
  return best;
}

inline EnsembleModel shift_bias(EnsembleModel model, double offset) {
  for (auto& m : model.members) m.bias += offset;
  return model;
}

inline EnsembleModel adjust_bias(const EnsembleModel& model, const Dataset& train, double radius = 1.0,
                                 double step = 0.01) {
  return shift_bias(model, find_bias_offset(model, train, radius, step).offset);
}

/// Largest violation of the first-order optimality conditions of the
/// box- and equality-constrained dual: max over I_up of -t G minus min over
/// I_low of -t G, where G = Q alpha - 1. Zero or negative at optimum.
inline double kkt_violation(std::span<const double> alphas, const Dataset& data, const KernelParams& kernel,
                            double c_bound) {
  require(alphas.size() == data.size(), "alpha count does not match dataset size");
  const auto n = data.size();
  double up = -std::numeric_limits<double>::infinity();
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double g = -1.0;
    for (std::size_t j = 0; j < n; ++j)
      g += data.label(i) * data.label(j) * kernel_eval(kernel, data.features(i), data.features(j)) * alphas[j];
    const double t = data.label(i);
    const double v = -t * g;
    const bool in_up = (t > 0 && alphas[i] < c_bound) || (t < 0 && alphas[i] > 0);
    const bool in_low = (t > 0 && alphas[i] > 0) || (t < 0 && alphas[i] < c_bound);
    if (in_up) up = std::max(up, v);
    if (in_low) low = std::min(low, v);
  }
  if (!std::isfinite(up) || !std::isfinite(low)) return 0.0;
  return std::max(0.0, up - low);
}

struct ClassicalOptions {
  double tolerance = 1e-6;
  std::size_t max_iterations = 1'000'000;
};

struct ClassicalFit {
  BinaryModel model;
  std::size_t iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;  // false: best iterate at the iteration cap
};

/// Continuous dual over [0, C] with sum alpha_n t_n = 0, solved by
/// maximal-violating-pair updates; bias by compute_bias.
inline ClassicalFit train_classical(const Dataset& data, const KernelParams& kernel, double c_bound,
                                    const ClassicalOptions& options = {}) {
  require_two_classes(data);
  require(c_bound > 0.0 && std::isfinite(c_bound), "C must be positive");
  const auto n = data.size();
  const auto gram = gram_matrix(kernel, data);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = data.label(i);
  auto q = [&](std::size_t i, std::size_t j) { return t[i] * t[j] * gram(i, j); };

  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  const double c = c_bound;
  ClassicalFit fit;
  for (fit.iterations = 0; fit.iterations < options.max_iterations; ++fit.iterations) {
    std::size_t i = n, j = n;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double v = -t[k] * grad[k];
      if (((t[k] > 0 && alpha[k] < c) || (t[k] < 0 && alpha[k] > 0)) && v > gmax) {
        gmax = v;
        i = k;
      }
      if (((t[k] > 0 && alpha[k] > 0) || (t[k] < 0 && alpha[k] < c)) && v < gmin) {
        gmin = v;
        j = k;
      }
    }
    if (i == n || j == n || gmax - gmin <= options.tolerance) {
      fit.converged = true;
      break;
    }
    const double ai = alpha[i], aj = alpha[j];
    if (t[i] != t[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = 1e-12;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = 1e-12;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - ai, dj = alpha[j] - aj;
    for (std::size_t k = 0; k < n; ++k) grad[k] += q(k, i) * di + q(k, j) * dj;
  }
  for (auto& a : alpha) a = std::clamp(a, 0.0, c);

  auto training = std::make_shared<const Dataset>(data);
  const auto b = compute_bias(alpha, data, kernel, c);
  fit.model = BinaryModel{alpha, b.bias, training, kernel, c, b.degenerate, std::nullopt};
  fit.kkt_residual = kkt_violation(alpha, data, kernel, c);
  return fit;
}

inline EnsembleModel as_ensemble(BinaryModel model) {
  EnsembleModel e;
  e.trainer = "classical";
  e.members.push_back(std::move(model));
  return e;
}

// Model files: a line-oriented text format, reals written to round-trip exactly.

inline std::string serialize_model(const EnsembleModel& model) {
  model.validate();
  const auto& first = model.members.front();
  const auto& data = *first.training;
  std::ostringstream out;
  out << "qsvm-model 1\n";
  out << "trainer " << model.trainer << "\n";
  out << "kernel " << to_string(first.kernel.kind) << "\n";
  out << "gamma " << format_real(first.kernel.gamma) << "\n";
  out << "c_bound " << format_real(first.c_bound) << "\n";
  if (model.encoding) {
    out << "base " << model.encoding->base << "\n";
    out << "bits " << model.encoding->bits << "\n";
    out << "xi " << format_real(model.encoding->xi) << "\n";
  }
  out << "dim " << data.dim() << "\n";
  out << "features";
  for (const auto& name : data.feature_names()) out << ' ' << name;
  out << "\n";
  out << "points " << data.size() << "\n";
  for (const auto& p : data.points()) {
    out << "x " << p.label;
    for (double v : p.features) out << ' ' << format_real(v);
    out << "\n";
  }
  out << "members " << model.members.size() << "\n";
  for (const auto& m : model.members) {
    out << "member bias " << format_real(m.bias) << " degenerate " << (m.degenerate ? 1 : 0) << " energy "
        << (m.energy ? format_real(*m.energy) : std::string("none")) << "\n";
    out << "alphas";
    for (double a : m.alphas) out << ' ' << format_real(a);
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

inline EnsembleModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::vector<std::string>> lines;
  for (std::string line; std::getline(in, line);) {
    auto tok = split_whitespace(line);
    if (!tok.empty()) lines.push_back(std::move(tok));
  }
  std::size_t pos = 0;
  auto next = [&](const std::string& tag) -> const std::vector<std::string>& {
    if (pos >= lines.size() || lines[pos].front() != tag)
      throw Error("model file: expected '" + tag + "' at record " + std::to_string(pos + 1));
    return lines[pos++];
  };
  auto value = [&](const std::string& tag) {
    const auto& l = next(tag);
    if (l.size() != 2) throw Error("model file: malformed '" + tag + "' record");
    return l[1];
  };
  auto peek = [&](const std::string& tag) { return pos < lines.size() && lines[pos].front() == tag; };

  const auto& header = next("qsvm-model");
  require(header.size() == 2 && header[1] == "1", "model file: unsupported version");
  EnsembleModel model;
  model.trainer = value("trainer");
  KernelParams kernel;
  kernel.kind = parse_kernel_kind(value("kernel"));
  kernel.gamma = require_real(value("gamma"), "gamma");
  const double c = require_real(value("c_bound"), "c_bound");
  if (peek("base")) {
    EncodingParams enc;
    enc.base = static_cast<int>(require_integer(value("base"), "base"));
    enc.bits = static_cast<int>(require_integer(value("bits"), "bits"));
    enc.xi = require_real(value("xi"), "xi");
    enc.kernel = kernel;
    model.encoding = enc;
  }
  const auto dim = static_cast<std::size_t>(require_integer(value("dim"), "dim"));
  const auto& names_line = next("features");
  std::vector<std::string> names(names_line.begin() + 1, names_line.end());
  const auto count = require_integer(value("points"), "points");
  require(count >= 1, "model file: no training points");
  std::vector<LabeledPoint> points;
  for (long long i = 0; i < count; ++i) {
    const auto& l = next("x");
    require(l.size() == dim + 2, "model file: training point with wrong dimension");
    LabeledPoint p;
    p.label = static_cast<int>(require_integer(l[1], "label"));
    for (std::size_t j = 0; j < dim; ++j) p.features.push_back(require_real(l[j + 2], "feature"));
    points.push_back(std::move(p));
  }
  auto training = std::make_shared<const Dataset>(std::move(points), std::move(names));
  const auto members = require_integer(value("members"), "members");
  require(members >= 1, "model file: no members");
  for (long long i = 0; i < members; ++i) {
    const auto& m = next("member");
    require(m.size() == 7 && m[1] == "bias" && m[3] == "degenerate" && m[5] == "energy",
            "model file: malformed member record");
    BinaryModel b;
    b.bias = require_real(m[2], "bias");
    b.degenerate = m[4] == "1";
    if (m[6] != "none") b.energy = require_real(m[6], "energy");
    const auto& a = next("alphas");
    require(a.size() == training->size() + 1, "model file: alpha count mismatch");
    for (std::size_t j = 1; j < a.size(); ++j) b.alphas.push_back(require_real(a[j], "alpha"));
    b.training = training;
    b.kernel = kernel;
    b.c_bound = c;
    model.members.push_back(std::move(b));
  }
  next("end");
  model.validate();
  return model;
}

}  // namespace qsvm
