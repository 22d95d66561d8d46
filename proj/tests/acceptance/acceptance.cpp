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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../cli_runner.hpp"
#include "../oracles.hpp"
#include "qsvm/qsvm.hpp"

using namespace qsvm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> check;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Dataset blobs(const std::vector<std::vector<double>>& centers, std::size_t per_class, double spread,
              std::uint64_t seed) {
  BlobSpec spec;
  spec.centers = centers;
  spec.counts.assign(centers.size(), per_class);
  spec.spread = spread;
  return generate_blobs(spec, seed);
}

// Member decision written out from the model fields with the oracle kernel.
double direct_decision(const BinaryModel& m, const std::vector<double>& x) {
  double s = m.bias;
  for (std::size_t n = 0; n < m.alphas.size(); ++n)
    s += m.alphas[n] * m.training->label(n) * oracle::gaussian(m.kernel.gamma, (*m.training)[n].features, x);
  return s;
}

Outcome qubo_qp_equivalence() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t assignments = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t d = 1 + rng() % 3;
    const int k = 1 + static_cast<int>(rng() % 2);
    const int base = 2 + static_cast<int>(rng() % 2);
    const double xi = static_cast<double>(rng() % 2);
    const double gamma = rng() % 2 ? 1.0 : 0.5;
    const auto data = oracle::random_binary_dataset(n, d, rng);
    const auto q = build_qubo(data, {base, k, xi, KernelParams::gaussian(gamma)});
    const auto vars = n * static_cast<std::size_t>(k);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars); ++m) {
      const auto bits = oracle::bits_of(m, vars);
      const double expected = oracle::penalized_dual(oracle::decode(bits, base, k), data, gamma, xi);
      worst = std::max(worst, std::abs(qubo_energy(q, bits) - expected));
      ++assignments;
    }
  }
  return {worst <= 1e-9, std::to_string(assignments) + " assignments, max |dE| = " + num(worst)};
}

Outcome derive_c_values() {
  const double a = derive_c(2, 2), b = derive_c(4, 3);
  return {a == 3.0 && b == 21.0, "derive_c(2,2) = " + num(a) + ", derive_c(4,3) = " + num(b)};
}

Outcome exhaustive_optimality() {
  std::mt19937_64 rng(77);
  bool ok = true;
  std::string why;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const std::size_t n = 1 + rng() % 14;
    const auto q = oracle::random_qubo(n, rng);
    auto energies = oracle::all_energies(q);
    std::sort(energies.begin(), energies.end());
    const std::size_t k = 8;
    const auto s = solve_exhaustive(q, k);
    if (s.size() != std::min<std::size_t>(k, energies.size())) ok = false, why = "wrong sample count";
    std::set<BitVector> seen;
    for (std::size_t i = 0; ok && i < s.size(); ++i) {
      if (std::abs(s[i].energy - energies[i]) > 1e-9) ok = false, why = "energy rank mismatch";
      if (std::abs(s[i].energy - oracle::energy(q, s[i].bits)) > 1e-12) ok = false, why = "reported energy wrong";
      if (!seen.insert(s[i].bits).second) ok = false, why = "duplicate sample";
      if (i > 0 && !sample_precedes(s[i - 1], s[i])) ok = false, why = "ordering violated";
    }
  }
  return {ok, ok ? "50 instances match enumeration; sorted, distinct" : why};
}

Outcome annealer_quality() {
  std::mt19937_64 rng(16);
  std::size_t worst_hits = 100, total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = oracle::random_qubo(16, rng);
    const double ground = oracle::min_energy(q);
    std::size_t hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      AnnealSchedule sch;
      sch.seed = seed;
      hits += solve_anneal(q, sch, 1).best().energy <= ground + 1e-9;
    }
    worst_hits = std::min(worst_hits, hits);
    total += hits;
  }
  return {worst_hits >= 90, "ground state found in " + std::to_string(total) + "/2000 runs, worst instance " +
                                std::to_string(worst_hits) + "/100"};
}

Outcome ising_equivalence() {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const auto q = oracle::random_qubo(n, rng);
    const auto p = qubo_to_ising(q);
    const auto [back, offset] = ising_to_qubo(p);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto bits = oracle::bits_of(m, n);
      const double e = oracle::energy(q, bits);
      worst = std::max(worst, std::abs(ising_energy(p, bits_to_spins(bits)) - e));
      worst = std::max(worst, std::abs(qubo_energy(back, bits) + offset - e));
    }
  }
  return {worst <= 1e-9, "max |dE| = " + num(worst)};
}

Outcome binary_end_to_end() {
  const auto data = blobs({{-2.0, -2.0}, {2.0, 2.0}}, 30, 0.7, 5);
  const auto linear = train_classical(data, KernelParams::linear(), 1e3);
  if (training_accuracy(as_ensemble(linear.model), data) < 1.0) return {false, "generated blobs not separable"};
  const auto [train, test] = shuffle_split(data, 40.0 / 60.0, 9);
  if (train.size() != 40 || test.size() != 20) return {false, "split is not 40/20"};
  TrainConfig cfg;
  cfg.encoding = {2, 2, 0.0, KernelParams::gaussian(1.0)};
  cfg.sampler = AnnealSchedule{};
  cfg.ensemble_size = 1;
  const auto q = train_binary(train, cfg);
  const auto c = as_ensemble(train_classical(train, KernelParams::gaussian(1.0), cfg.encoding.c_bound()).model);
  const double qa = training_accuracy(q, test), ca = training_accuracy(c, test);
  return {qa >= 0.90 && std::abs(qa - ca) <= 0.10,
          "qsvm test accuracy " + num(qa) + ", classical " + num(ca)};
}

Outcome multiclass_end_to_end() {
  auto base = [] {
    ExperimentSpec spec;
    spec.task = TaskKind::multiclass;
    spec.pca_dim = 3;
    spec.num_shuffles = 10;
    spec.train_fraction = 43.0 / 63.0;
    spec.grid = HyperGrid{{4}, {3}, {0.0}, {0.27}};
    spec.sampler = AnnealSchedule{};
    spec.ensemble_size = 5;
    spec.seed = 3;
    return spec;
  };
  auto pressure = base();
  PressureSpec ps;
  ps.angles = {14.0, 16.0, 18.0, 20.0};
  ps.counts = {16, 16, 16, 15};
  pressure.source.synthetic = ps;
  const auto pr = run_experiment(pressure);

  // Four well-separated blobs laid out along a line in 6 dimensions, so
  // the class order doubles as the adjacency order.
  auto line = base();
  BlobSpec bs;
  for (int c = 0; c < 4; ++c) bs.centers.push_back({3.0 * c, 1.5 * c, 0.0, -1.0 * c, 0.5, 0.0});
  bs.counts = {16, 16, 16, 15};
  bs.spread = 0.5;
  line.source.synthetic = bs;
  line.grid.gammas = {0.27};
  const auto lr = run_experiment(line);

  std::size_t distant = 0;
  for (const auto& s : lr.shuffles) distant += s.qsvm_adjacency.distant;
  const bool parity = pr.qsvm_mean >= pr.classical_mean - 0.05 && lr.qsvm_mean >= lr.classical_mean - 0.05;
  return {parity && distant == 0, "pressure: qsvm mean " + num(pr.qsvm_mean) + " vs classical " +
                                      num(pr.classical_mean) + "; blobs: qsvm mean " + num(lr.qsvm_mean) +
                                      " vs classical " + num(lr.classical_mean) + ", distant errors " +
                                      std::to_string(distant)};
}

Outcome ensemble_identity() {
  const auto data = blobs({{-1.0, 0.0}, {1.0, 0.0}}, 15, 1.5, 12);
  TrainConfig cfg;
  cfg.encoding = {2, 2, 0.0, KernelParams::gaussian(1.0)};
  cfg.ensemble_size = 5;
  const auto model = train_binary(data, cfg);
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    double s = 0.0;
    for (const auto& m : model.members) s += direct_decision(m, x);
    worst = std::max(worst, std::abs(ensemble_decision(model, x) - s / static_cast<double>(model.members.size())));
  }
  return {model.members.size() == 5 && worst <= 1e-12,
          std::to_string(model.members.size()) + " members, max deviation " + num(worst)};
}

Outcome bias_formula() {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double c = trial % 2 ? 3.0 : 21.0;
    std::uniform_real_distribution<double> u(0.01 * c, 0.99 * c);
    const auto data = oracle::random_binary_dataset(2 + rng() % 7, 1 + rng() % 3, rng);
    std::vector<double> alphas(data.size());
    for (auto& a : alphas) a = u(rng);
    const auto r = compute_bias(alphas, data, KernelParams::gaussian(0.5), c);
    if (r.degenerate) return {false, "interior instance flagged degenerate"};
    worst = std::max(worst, std::abs(r.bias - oracle::bias(alphas, data, 0.5, c)));
  }
  const auto data = oracle::random_binary_dataset(4, 2, rng);
  const auto bound = compute_bias(std::vector<double>{0.0, 3.0, 3.0, 0.0}, data, KernelParams::gaussian(1.0), 3.0);
  const auto zero = compute_bias(std::vector<double>(4, 0.0), data, KernelParams::gaussian(1.0), 3.0);
  const bool fallback = bound.degenerate && bound.bias == 0.0 && zero.degenerate && zero.bias == 0.0;
  return {worst <= 1e-12 && fallback,
          "max |db| = " + num(worst) + (fallback ? ", bound-only alphas give b = 0 (flagged)" : ", fallback missing")};
}

Outcome bias_adjustment() {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(0.0, 3.0), b(-1.5, 1.5);
  std::size_t improved = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = oracle::random_binary_dataset(10, 2, rng);
    auto training = std::make_shared<const Dataset>(data);
    EnsembleModel m;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> alphas(data.size());
      for (auto& a : alphas) a = u(rng);
      m.members.push_back({alphas, b(rng), training, KernelParams::gaussian(1.0), 3.0, false, std::nullopt});
    }
    const double before = training_accuracy(m, data);
    const double after = training_accuracy(adjust_bias(m, data), data);
    if (after < before) return {false, "accuracy dropped on random model " + std::to_string(trial)};
    improved += after > before;
  }
  // f(x) = x with the class boundary at 0.35 instead of 0.
  const Dataset train({{{0.1}, -1}, {{0.2}, -1}, {{0.5}, 1}, {{0.6}, 1}});
  EnsembleModel shifted;
  shifted.members.push_back({{1.0}, 0.0, std::make_shared<const Dataset>(Dataset({{{1.0}, 1}})),
                             KernelParams::linear(), 1.0, false, std::nullopt});
  const double before = training_accuracy(shifted, train);
  const double after = training_accuracy(adjust_bias(shifted, train), train);
  return {after > before, "never decreased on 20 models (" + std::to_string(improved) +
                              " improved); constructed instance " + num(before) + " -> " + num(after)};
}

Outcome metrics_identities() {
  ConfusionMatrix cm(2);
  cm.add(0, 0, 3);
  cm.add(0, 1, 1);
  cm.add(1, 0, 1);
  cm.add(1, 1, 5);
  const auto r = binary_report(cm);
  const bool worked = std::abs(r.accuracy - 0.8) <= 1e-12 && std::abs(r.precision - 0.75) <= 1e-12 &&
                      std::abs(r.recall - 0.75) <= 1e-12 && std::abs(r.f1 - 0.75) <= 1e-12;
  std::mt19937_64 rng(100);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ConfusionMatrix m(2);
    m.add(0, 0, 1 + rng() % 40);
    m.add(0, 1, rng() % 40);
    m.add(1, 0, rng() % 40);
    m.add(1, 1, rng() % 40);
    const auto rep = binary_report(m);
    const double harmonic = 2.0 / (1.0 / rep.precision + 1.0 / rep.recall);
    worst = std::max(worst, std::abs(rep.f1 - harmonic));
  }
  return {worked && worst <= 1e-12, std::string(worked ? "worked example exact" : "worked example wrong") +
                                        ", F1 identity max deviation " + num(worst)};
}

Outcome classical_baseline() {
  const Dataset two({{{1.0, 0.0}, 1}, {{-1.0, 0.0}, -1}});
  const auto fit = train_classical(two, KernelParams::linear(), 10.0);
  const bool analytic = std::abs(fit.model.alphas[0] - 0.5) <= 1e-9 && std::abs(fit.model.alphas[1] - 0.5) <= 1e-9 &&
                        std::abs(fit.model.bias) <= 1e-9;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = blobs({{-2.0, -1.0}, {2.0, 1.0}}, 12, 0.8, 500 + seed);
    const auto f = train_classical(data, KernelParams::gaussian(1.0), 3.0);
    if (!f.converged) return {false, "did not converge on instance " + std::to_string(seed)};
    worst = std::max(worst, kkt_violation(f.model.alphas, data, f.model.kernel, 3.0));
  }
  return {analytic && worst <= 1e-6, "two-point alpha = (" + num(fit.model.alphas[0]) + ", " +
                                         num(fit.model.alphas[1]) + "), b = " + num(fit.model.bias) +
                                         "; max KKT residual " + num(worst)};
}

Outcome cli_determinism() {
  const std::vector<std::string> commands = {
      "datagen --mode blobs '--centers=-2,-2;2,2' --counts 20,20 --seed 8 --out blobs.csv",
      "datagen --mode pressure --angles 14,16,18,20 --counts 10 --seed 8 --out p.csv",
      "pca --data p.csv --dim 3 --transform-out p.pca --out p3.csv",
      "train --data blobs.csv --ensemble 3 --seed 8 --out b.model",
      "train --data blobs.csv --classical --out c.model",
      "train --data p3.csv --multiclass --B 4 --K 3 --gamma 0.27 --ensemble 5 --seed 8 --out mc.model",
      "predict --model b.model --data blobs.csv --out b.pred",
      "predict --model mc.model --data p3.csv --format csv --out mc.pred",
      "evaluate --model mc.model --data p3.csv --out mc.eval",
      "solve-qubo --qubo t.qubo --solver anneal --top-k 4 --seed 8 --out t.sol",
      "experiment --config e.cfg --csv e.csv --report e.txt",
  };
  const std::string qubo = "vars 3\n0 0 -1\n0 1 2\n1 1 -1\n1 2 -0.5\n2 2 0.25\n";
  const std::string cfg =
      "synthetic.mode = blobs\nsynthetic.centers = -2,0;2,0\nsynthetic.counts = 12,12\nshuffles = 3\n"
      "sweeps = 200\nreads = 16\nseed = 8\n";
  std::vector<std::filesystem::path> dirs{testing::scratch_dir("det_a"), testing::scratch_dir("det_b")};
  std::vector<std::vector<std::string>> stdouts(2);
  for (std::size_t d = 0; d < 2; ++d) {
    write_file_atomic(dirs[d] / "t.qubo", qubo);
    write_file_atomic(dirs[d] / "e.cfg", cfg);
    for (const auto& c : commands) {
      const auto r = testing::run_cli(dirs[d], c);
      if (r.status != 0) return {false, "command failed: " + c + ": " + r.err};
      stdouts[d].push_back(r.out);
    }
  }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dirs[0])) {
    const auto name = e.path().filename();
    if (name == "stdout.txt" || name == "stderr.txt") continue;
    if (!std::filesystem::exists(dirs[1] / name) || read_file(e.path()) != read_file(dirs[1] / name))
      return {false, "output differs: " + name.string()};
    ++files;
  }
  if (stdouts[0] != stdouts[1]) return {false, "standard output differs"};
  for (const auto& d : dirs) std::filesystem::remove_all(d);
  return {true, std::to_string(commands.size()) + " commands, " + std::to_string(files) +
                    " files byte-identical across runs"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"QUBO-QP energy equivalence", 1.0, qubo_qp_equivalence},
      {"derive_c values", 1.0, derive_c_values},
      {"exhaustive solver optimality", 5.0, exhaustive_optimality},
      {"annealer quality", 60.0, annealer_quality},
      {"Ising-QUBO equivalence", 1.0, ising_equivalence},
      {"binary classification end-to-end", 30.0, binary_end_to_end},
      {"multiclass end-to-end", 300.0, multiclass_end_to_end},
      {"ensemble identity", 5.0, ensemble_identity},
      {"bias formula", 1.0, bias_formula},
      {"bias adjustment", 5.0, bias_adjustment},
      {"metrics identities", 1.0, metrics_identities},
      {"classical baseline", 5.0, classical_baseline},
      {"CLI determinism", 60.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s  %s: %s [%.2fs, limit %gs%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                c.time_limit, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
