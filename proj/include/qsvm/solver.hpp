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

// QUBO samplers returning ensembles of low-energy assignments: exhaustive
// enumeration (exact, small problems) and single-flip simulated annealing.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qsvm/error.hpp"
#include "qsvm/matrix.hpp"
#include "qsvm/qubo.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

struct SolutionSample {
  BitVector bits;
  double energy = 0.0;

  friend bool operator==(const SolutionSample&, const SolutionSample&) = default;
};

/// Ascending energy, ties by lexicographic bit order.
inline bool sample_precedes(const SolutionSample& a, const SolutionSample& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.bits < b.bits;
}

/// Distinct samples sorted by `sample_precedes`.
class SampleSet {
 public:
  SampleSet() = default;

  /// Sorts, drops repeated bit vectors and keeps the first `top_k`.
  static SampleSet collect(std::vector<SolutionSample> candidates, std::size_t top_k) {
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      if (a.bits != b.bits) return a.bits < b.bits;
      return a.energy < b.energy;
    });
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const auto& a, const auto& b) { return a.bits == b.bits; }),
                     candidates.end());
    std::sort(candidates.begin(), candidates.end(), sample_precedes);
    if (candidates.size() > top_k) candidates.resize(top_k);
    SampleSet s;
    s.samples_ = std::move(candidates);
    return s;
  }

  const std::vector<SolutionSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const SolutionSample& operator[](std::size_t i) const { return samples_[i]; }
  const SolutionSample& best() const {
    ensure(!samples_.empty(), "empty sample set has no best sample");
    return samples_.front();
  }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  std::vector<SolutionSample> samples_;
};

/// E(bits with bit i flipped) - E(bits), in O(num_vars).
inline double incremental_energy_delta(const QuboProblem& q, std::span<const std::uint8_t> bits,
                                       std::size_t flip_index) {
  require(bits.size() == q.num_vars(), "bit vector length does not match QUBO size");
  require(flip_index < q.num_vars(), "flip index " + std::to_string(flip_index) + " out of range");
  const auto i = flip_index;
  double s = q(i, i);
  for (std::size_t j = 0; j < i; ++j)
    if (bits[j]) s += q(j, i);
  for (std::size_t j = i + 1; j < bits.size(); ++j)
    if (bits[j]) s += q(i, j);
  return bits[i] ? -s : s;
}

namespace detail {

/// Full symmetric coupling matrix with zero diagonal: W_ij = Q_min(i,j),max(i,j).
inline Matrix symmetric_couplings(const QuboProblem& q) {
  const auto n = q.num_vars();
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w(i, j) = w(j, i) = q(i, j);
  return w;
}

}  // namespace detail

inline constexpr std::size_t kExhaustiveMaxVars = 24;

/// The top_k lowest-energy distinct assignments over all 2^num_vars.
inline SampleSet solve_exhaustive(const QuboProblem& q, std::size_t top_k) {
  const auto n = q.num_vars();
  require(n <= kExhaustiveMaxVars, "exhaustive solver: " + std::to_string(n) +
                                       " variables exceed the enumeration guard of " +
                                       std::to_string(kExhaustiveMaxVars));
  require(top_k >= 1, "top_k must be >= 1");
  const std::uint64_t total = std::uint64_t{1} << n;
  top_k = static_cast<std::size_t>(std::min<std::uint64_t>(top_k, total));

  // Walk a Gray code so each step is one flip. `key` orders assignments
  // lexicographically (bit 0 most significant).
  const auto w = detail::symmetric_couplings(q);
  BitVector x(n, 0);
  std::vector<double> field(n, 0.0);
  double energy = 0.0;
  std::uint64_t key = 0;

  using Entry = std::pair<double, std::uint64_t>;
  std::priority_queue<Entry> worst_first;
  auto offer = [&](double e, std::uint64_t k) {
    if (worst_first.size() < top_k) {
      worst_first.emplace(e, k);
    } else if (Entry{e, k} < worst_first.top()) {
      worst_first.pop();
      worst_first.emplace(e, k);
    }
  };
  offer(energy, key);
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto i = static_cast<std::size_t>(std::countr_zero(step));
    const double sign = x[i] ? -1.0 : 1.0;
    energy += sign * (q(i, i) + field[i]);
    x[i] ^= 1;
    key ^= std::uint64_t{1} << (n - 1 - i);
    const auto wi = w.row(i);
    for (std::size_t j = 0; j < n; ++j) field[j] += sign * wi[j];
    if ((step & 0xFFF) == 0) energy = qubo_energy(q, x);  // bound drift
    offer(energy, key);
  }

  std::vector<SolutionSample> found;
  while (!worst_first.empty()) {
    const auto k = worst_first.top().second;
    worst_first.pop();
    BitVector bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (k >> (n - 1 - i)) & 1U;
    const double e = qubo_energy(q, bits);
    found.push_back({std::move(bits), e});
  }
  return SampleSet::collect(std::move(found), top_k);
}

/// Geometric cooling T_t = T0 (Tf/T0)^(t/sweeps) for t = 0..sweeps-1.
/// Unset temperatures resolve per problem: T0 = max |coeff|, Tf = 1e-3 T0.
/// `threads` only affects wall time; results depend on `seed` alone.
struct AnnealSchedule {
  std::optional<double> initial_temperature;
  std::optional<double> final_temperature;
  std::size_t sweeps = 1000;
  std::size_t num_reads = 64;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Concrete (T0, Tf) for a problem, validated.
  std::pair<double, double> temperatures(const QuboProblem& q) const {
    double t0 = initial_temperature.value_or(q.max_abs_coeff());
    if (!initial_temperature && t0 <= 0.0) t0 = 1.0;
    const double tf = final_temperature.value_or(1e-3 * t0);
    require(t0 > 0.0 && std::isfinite(t0), "initial temperature must be positive");
    require(tf > 0.0 && tf < t0, "final temperature must be positive and below the initial one");
    return {t0, tf};
  }

  void validate() const {
    require(sweeps >= 1, "sweeps must be >= 1");
    require(num_reads >= 1, "num_reads must be >= 1");
    if (initial_temperature) require(*initial_temperature > 0.0, "initial temperature must be positive");
    if (final_temperature) require(*final_temperature > 0.0, "final temperature must be positive");
    if (initial_temperature && final_temperature)
      require(*final_temperature < *initial_temperature, "final temperature must be below the initial one");
  }

  friend bool operator==(const AnnealSchedule&, const AnnealSchedule&) = default;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One annealing read; returns the lowest-energy state it visited.
inline SolutionSample anneal_read(const QuboProblem& q, const Matrix& w,
                                  const std::vector<double>& betas, std::uint64_t seed) {
  const auto n = q.num_vars();
  std::mt19937_64 rng(seed);
  BitVector x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
  std::vector<double> field(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (x[i])
      for (std::size_t j = 0; j < n; ++j) field[j] += w(i, j);

  double energy = qubo_energy(q, x);
  SolutionSample best{x, energy};
  for (double beta : betas) {
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = (x[i] ? -1.0 : 1.0) * (q(i, i) + field[i]);
      if (delta > 0.0) {
        const double arg = beta * delta;
        if (arg > 40.0 || unit_uniform(rng) >= std::exp(-arg)) continue;
      }
      const double sign = x[i] ? -1.0 : 1.0;
      x[i] ^= 1;
      energy += delta;
      const auto wi = w.row(i);
      for (std::size_t j = 0; j < n; ++j) field[j] += sign * wi[j];
      if (energy < best.energy) {
        best.bits = x;
        best.energy = energy;
      }
    }
  }
  best.energy = qubo_energy(q, best.bits);
  return best;
}

}  // namespace detail

/// num_reads independent restarts from uniform random states; the best
/// state of each read competes for the top_k distinct slots. Read r is
/// seeded from mix_seed(seed, r), so any thread count gives the same set.
inline SampleSet solve_anneal(const QuboProblem& q, const AnnealSchedule& schedule, std::size_t top_k) {
  schedule.validate();
  require(top_k >= 1, "top_k must be >= 1");
  if (q.num_vars() == 0) return SampleSet::collect({SolutionSample{}}, top_k);
  const auto [t0, tf] = schedule.temperatures(q);
  std::vector<double> betas(schedule.sweeps);
  for (std::size_t t = 0; t < schedule.sweeps; ++t) {
    const double frac = static_cast<double>(t) / static_cast<double>(schedule.sweeps);
    betas[t] = 1.0 / (t0 * std::pow(tf / t0, frac));
  }
  const auto w = detail::symmetric_couplings(q);

  std::vector<SolutionSample> reads(schedule.num_reads);
  const auto workers = std::clamp<std::size_t>(schedule.threads, 1, schedule.num_reads);
  auto run = [&](std::size_t first) {
    for (std::size_t r = first; r < reads.size(); r += workers)
      reads[r] = detail::anneal_read(q, w, betas, mix_seed(schedule.seed, r));
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run, t);
  }
  return SampleSet::collect(std::move(reads), top_k);
}

struct ExhaustiveSampler {
  friend bool operator==(const ExhaustiveSampler&, const ExhaustiveSampler&) = default;
};

/// Common contract over the samplers: any alternative returns the top_k
/// distinct lowest-energy states it can find.
using SamplerChoice = std::variant<ExhaustiveSampler, AnnealSchedule>;

inline SampleSet sample(const SamplerChoice& sampler, const QuboProblem& q, std::size_t top_k) {
  if (const auto* a = std::get_if<AnnealSchedule>(&sampler)) return solve_anneal(q, *a, top_k);
  return solve_exhaustive(q, top_k);
}

/// Copy of `sampler` whose annealing seed is replaced by `seed`.
inline SamplerChoice reseeded(const SamplerChoice& sampler, std::uint64_t seed) {
  auto out = sampler;
  if (auto* a = std::get_if<AnnealSchedule>(&out)) a->seed = seed;
  return out;
}

inline std::string describe(const SamplerChoice& sampler) {
  if (const auto* a = std::get_if<AnnealSchedule>(&sampler))
    return "anneal(sweeps=" + std::to_string(a->sweeps) + ", reads=" + std::to_string(a->num_reads) +
           ", seed=" + std::to_string(a->seed) + ")";
  return "exhaustive";
}

}  // namespace qsvm
