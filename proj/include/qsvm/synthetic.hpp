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

// Synthetic stand-ins for measured data: Gaussian blobs and a family of
// chordwise pressure profiles parameterized by an angle.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

/// Isotropic Gaussian clusters, one per class.
struct BlobSpec {
  std::vector<std::vector<double>> centers;
  std::vector<std::size_t> counts;
  double spread = 1.0;
  std::vector<int> labels;  // empty: default labels
};

/// Pressure profiles sampled at `taps` chordwise positions. Each class has
/// a nominal angle; every point draws its angle uniformly within
/// +-angle_jitter of it and every tap gets Gaussian noise.
struct PressureSpec {
  std::size_t taps = 10;
  std::vector<double> angles;
  std::vector<std::size_t> counts;
  double noise = 0.02;
  double angle_jitter = 0.5;
  std::vector<int> labels;
};

using SyntheticSpec = std::variant<BlobSpec, PressureSpec>;

/// Two classes get -1/+1, more classes get 0..k-1.
inline std::vector<int> default_labels(std::size_t num_classes) {
  std::vector<int> out;
  if (num_classes == 2) return {-1, 1};
  for (std::size_t c = 0; c < num_classes; ++c) out.push_back(static_cast<int>(c));
  return out;
}

/// Chordwise tap positions, clustered toward both edges.
inline std::vector<double> tap_positions(std::size_t taps) {
  std::vector<double> s(taps);
  for (std::size_t i = 0; i < taps; ++i)
    s[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) /
                                 static_cast<double>(taps)));
  return s;
}

/// Noise-free profile value at chord position s for angle `deg`. Strictly
/// decreasing in the angle at every tap: the suction peak deepens and the
/// steep leading-edge slope widens into a flat plateau.
inline double pressure_profile(double s, double deg) {
  const double width = 0.1 + 0.02 * deg;
  return -(0.5 + 0.1 * deg) * std::exp(-s / width) - 0.02 * deg;
}

namespace detail {

inline std::vector<int> resolve_labels(const std::vector<int>& labels, std::size_t k) {
  if (labels.empty()) return default_labels(k);
  require(labels.size() == k, "synthetic spec: label count must match class count");
  return labels;
}

inline void check_counts(const std::vector<std::size_t>& counts, std::size_t k) {
  require(k >= 2, "synthetic spec: at least two classes required");
  require(counts.size() == k, "synthetic spec: one count per class required");
  for (auto c : counts) require(c >= 1, "synthetic spec: every class needs a count >= 1");
}

}  // namespace detail

inline Dataset generate_blobs(const BlobSpec& spec, std::uint64_t seed) {
  const auto k = spec.centers.size();
  detail::check_counts(spec.counts, k);
  require(spec.spread > 0.0 && std::isfinite(spec.spread), "synthetic spec: spread must be positive");
  const auto dim = spec.centers.front().size();
  require(dim >= 1, "synthetic spec: centers need at least one coordinate");
  for (const auto& c : spec.centers)
    require(c.size() == dim, "synthetic spec: centers must share one dimension");
  const auto labels = detail::resolve_labels(spec.labels, k);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, spec.spread);
  std::vector<LabeledPoint> points;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < spec.counts[c]; ++i) {
      LabeledPoint p;
      p.label = labels[c];
      for (double mu : spec.centers[c]) p.features.push_back(mu + gauss(rng));
      points.push_back(std::move(p));
    }
  }
  return Dataset(std::move(points));
}

inline Dataset generate_pressure(const PressureSpec& spec, std::uint64_t seed) {
  const auto k = spec.angles.size();
  detail::check_counts(spec.counts, k);
  require(spec.taps >= 1, "synthetic spec: taps must be >= 1");
  require(spec.noise >= 0.0, "synthetic spec: noise must be nonnegative");
  require(spec.angle_jitter >= 0.0, "synthetic spec: angle jitter must be nonnegative");
  const auto labels = detail::resolve_labels(spec.labels, k);
  const auto s = tap_positions(spec.taps);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::vector<LabeledPoint> points;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < spec.taps; ++i) names.push_back("p" + std::to_string(i));
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < spec.counts[c]; ++i) {
      const double deg = spec.angles[c] + spec.angle_jitter * jitter(rng);
      LabeledPoint p;
      p.label = labels[c];
      for (double pos : s) p.features.push_back(pressure_profile(pos, deg) + spec.noise * gauss(rng));
      points.push_back(std::move(p));
    }
  }
  return Dataset(std::move(points), std::move(names));
}

inline Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  return std::visit(
      [seed](const auto& s) -> Dataset {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, BlobSpec>)
          return generate_blobs(s, seed);
        else
          return generate_pressure(s, seed);
      },
      spec);
}

namespace detail {

inline std::vector<std::size_t> parse_counts(const std::string& text, std::size_t k) {
  auto raw = parse_integer_list(text, "count");
  std::vector<std::size_t> out;
  for (auto c : raw) {
    require(c >= 0, "synthetic spec: counts must be nonnegative");
    out.push_back(static_cast<std::size_t>(c));
  }
  if (out.size() == 1 && k > 1) out.assign(k, out.front());
  return out;
}

inline std::vector<int> parse_labels(const KeyValueConfig& cfg) {
  std::vector<int> out;
  if (auto v = cfg.get("labels"))
    for (auto l : parse_integer_list(*v, "label")) out.push_back(static_cast<int>(l));
  return out;
}

}  // namespace detail

/// Reads a synthetic spec from keys:
///   mode = blobs | pressure
///   blobs:    centers = x,y;x,y   counts = 20,20   spread = 0.5
///   pressure: taps = 10   angles = 14,16,18,20   counts = 16,16,16,15
///             noise = 0.02   angle_jitter = 0.5
///   labels = optional comma list, one per class
inline SyntheticSpec synthetic_spec_from_config(const KeyValueConfig& cfg) {
  const auto mode = cfg.get_or("mode", "blobs");
  if (mode == "blobs") {
    BlobSpec spec;
    auto centers = cfg.get("centers");
    require(centers.has_value(), "synthetic spec: blobs mode requires 'centers'");
    for (const auto& c : split(*centers, ';')) spec.centers.push_back(parse_real_list(c, "center"));
    spec.counts = detail::parse_counts(cfg.get_or("counts", "20"), spec.centers.size());
    spec.spread = cfg.real_or("spread", 1.0);
    spec.labels = detail::parse_labels(cfg);
    return spec;
  }
  if (mode == "pressure") {
    PressureSpec spec;
    auto taps = cfg.integer_or("taps", 10);
    require(taps >= 1, "synthetic spec: taps must be >= 1");
    spec.taps = static_cast<std::size_t>(taps);
    auto angles = cfg.get("angles");
    require(angles.has_value(), "synthetic spec: pressure mode requires 'angles'");
    spec.angles = parse_real_list(*angles, "angle");
    spec.counts = detail::parse_counts(cfg.get_or("counts", "16"), spec.angles.size());
    spec.noise = cfg.real_or("noise", 0.02);
    spec.angle_jitter = cfg.real_or("angle_jitter", 0.5);
    spec.labels = detail::parse_labels(cfg);
    return spec;
  }
  throw Error("synthetic spec: unknown mode '" + mode + "'");
}

}  // namespace qsvm
