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

// Shuffle-and-split experiments: optional PCA, repeated train/test splits,
// hyperparameter grid search on training accuracy, the annealing SVM and
// the continuous baseline on identical splits, aggregated accuracies.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/metrics.hpp"
#include "qsvm/model_io.hpp"
#include "qsvm/multiclass.hpp"
#include "qsvm/pca.hpp"
#include "qsvm/svm.hpp"
#include "qsvm/synthetic.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

enum class TaskKind { automatic, binary, multiclass };
enum class PcaFit { train, pooled };

struct DataSource {
  std::optional<std::filesystem::path> csv;
  std::string label_column = "label";
  std::optional<SyntheticSpec> synthetic;
};

struct HyperGrid {
  std::vector<int> bases{2};
  std::vector<int> bits{2};
  std::vector<double> xis{0.0};
  std::vector<double> gammas{1.0};
};

struct HyperBundle {
  int base = 2;
  int bits = 2;
  double xi = 0.0;
  double gamma = 1.0;

  EncodingParams encoding() const { return {base, bits, xi, KernelParams::gaussian(gamma)}; }
  friend bool operator==(const HyperBundle&, const HyperBundle&) = default;
};

/// Grid points in nested order: base, then bits, then xi, then gamma.
inline std::vector<HyperBundle> expand_grid(const HyperGrid& g) {
  std::vector<HyperBundle> out;
  for (int b : g.bases)
    for (int k : g.bits)
      for (double xi : g.xis)
        for (double gamma : g.gammas) out.push_back({b, k, xi, gamma});
  return out;
}

struct ExperimentSpec {
  DataSource source;
  TaskKind task = TaskKind::automatic;
  std::size_t pca_dim = 0;  // 0 disables PCA
  PcaFit pca_fit = PcaFit::train;
  bool standardize = false;
  std::size_t num_shuffles = 10;
  double train_fraction = 0.7;
  HyperGrid grid;
  SamplerChoice sampler = AnnealSchedule{};
  std::size_t ensemble_size = 1;
  std::uint64_t seed = 0;
  bool bias_adjust = false;
  double bias_radius = 1.0;
  double bias_step = 0.01;
  std::optional<double> classical_c;      // default: C of the chosen bundle
  std::optional<double> classical_gamma;  // default: gamma of the chosen bundle

  void validate() const {
    require(num_shuffles >= 1, "num_shuffles must be >= 1");
    require(!grid.bases.empty() && !grid.bits.empty() && !grid.xis.empty() && !grid.gammas.empty(),
            "hyperparameter grid lists must be nonempty");
    require(ensemble_size >= 1, "ensemble size must be >= 1");
    require(source.csv.has_value() != source.synthetic.has_value(),
            "experiment needs exactly one data source (csv or synthetic)");
  }
};

struct Split {
  Dataset train;
  Dataset test;
};

struct ShuffleOutcome {
  double qsvm_accuracy = 0.0;
  double classical_accuracy = 0.0;
  double qsvm_train_accuracy = 0.0;
  double bias_offset = 0.0;
  ConfusionMatrix qsvm_confusion{2};
  ConfusionMatrix classical_confusion{2};
  AdjacencyErrors qsvm_adjacency;
  AdjacencyErrors classical_adjacency;
};

struct ExperimentResult {
  bool multiclass = false;
  std::vector<int> classes;
  HyperBundle chosen;
  double chosen_train_accuracy = 0.0;
  std::vector<ShuffleOutcome> shuffles;
  double qsvm_mean = 0.0, qsvm_stddev = 0.0;
  double classical_mean = 0.0, classical_stddev = 0.0;

  std::vector<double> qsvm_accuracies() const {
    std::vector<double> v;
    for (const auto& s : shuffles) v.push_back(s.qsvm_accuracy);
    return v;
  }
  std::vector<double> classical_accuracies() const {
    std::vector<double> v;
    for (const auto& s : shuffles) v.push_back(s.classical_accuracy);
    return v;
  }
};

inline Dataset load_source(const DataSource& source, std::uint64_t seed) {
  if (source.csv) return load_csv(*source.csv, source.label_column);
  require(source.synthetic.has_value(), "experiment has no data source");
  return generate_synthetic(*source.synthetic, mix_seed(seed, 0xDA7A));
}

inline bool resolve_multiclass(TaskKind task, const Dataset& data) {
  if (task == TaskKind::binary) {
    require_binary_labels(data);
    return false;
  }
  if (task == TaskKind::multiclass) return true;
  return !(data.is_binary() && data.classes().size() == 2);
}

/// Splits the data num_shuffles times; PCA is fit on each training part,
/// or once on the pooled data under PcaFit::pooled.
inline std::vector<Split> make_splits(const ExperimentSpec& spec, const Dataset& data) {
  std::optional<PcaTransform> pooled;
  if (spec.pca_dim > 0 && spec.pca_fit == PcaFit::pooled) pooled = fit_pca(data, spec.pca_dim, spec.standardize);
  std::vector<Split> splits;
  for (std::size_t s = 0; s < spec.num_shuffles; ++s) {
    auto [train, test] = shuffle_split(data, spec.train_fraction, mix_seed(spec.seed, 1000 + s));
    if (spec.pca_dim > 0) {
      const auto t = pooled ? *pooled : fit_pca(train, spec.pca_dim, spec.standardize);
      splits.push_back({apply_pca(t, train), apply_pca(t, test)});
    } else {
      splits.push_back({std::move(train), std::move(test)});
    }
  }
  return splits;
}

inline double accuracy_of(const AnyModel& model, const Dataset& data) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hits += predict_any(model, data.features(i)) == data.label(i);
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

struct TrainedSplit {
  AnyModel model;
  double train_accuracy = 0.0;
  double bias_offset = 0.0;
};

/// Trains the annealing SVM for one split and grid point. Bias adjustment,
/// when enabled, sees only the training part.
inline TrainedSplit train_split(const ExperimentSpec& spec, bool multiclass, const Dataset& train,
                                const HyperBundle& bundle, std::uint64_t seed) {
  TrainConfig cfg{bundle.encoding(), reseeded(spec.sampler, seed), spec.ensemble_size};
  TrainedSplit out{EnsembleModel{}, 0.0, 0.0};
  if (!multiclass) {
    auto model = train_binary(train, cfg);
    if (spec.bias_adjust) {
      const auto adj = find_bias_offset(model, train, spec.bias_radius, spec.bias_step);
      model = shift_bias(std::move(model), adj.offset);
      out.bias_offset = adj.offset;
    }
    out.model = std::move(model);
  } else {
    auto model = train_multiclass(train, cfg);
    if (spec.bias_adjust) {
      for (std::size_t c = 0; c < model.classes.size(); ++c) {
        const auto relabeled = one_against_all(train, model.classes[c]);
        model.classifiers[c] = adjust_bias(model.classifiers[c], relabeled, spec.bias_radius, spec.bias_step);
      }
    }
    out.model = std::move(model);
  }
  out.train_accuracy = accuracy_of(out.model, train);
  return out;
}

inline std::uint64_t train_seed(std::uint64_t master, std::size_t grid_index, std::size_t split_index) {
  return mix_seed(mix_seed(master, 0x5EED0000ULL + grid_index), split_index);
}

struct GridChoice {
  HyperBundle bundle;
  std::size_t index = 0;
  double mean_train_accuracy = 0.0;
};

struct GridSearchOutcome {
  GridChoice choice;
  std::vector<TrainedSplit> models;  // trained with the chosen bundle, one per split
};

/// Scores every grid point by mean training accuracy over the splits; the
/// earliest point wins ties. Points whose training fails are skipped.
inline GridSearchOutcome search_grid(const ExperimentSpec& spec, bool multiclass, const std::vector<Split>& splits) {
  require(!splits.empty(), "grid search needs at least one split");
  const auto grid = expand_grid(spec.grid);
  require(!grid.empty(), "hyperparameter grid is empty");
  std::optional<GridSearchOutcome> best;
  std::string last_error;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<TrainedSplit> models;
    double sum = 0.0;
    try {
      for (std::size_t s = 0; s < splits.size(); ++s) {
        models.push_back(train_split(spec, multiclass, splits[s].train, grid[g], train_seed(spec.seed, g, s)));
        sum += models.back().train_accuracy;
      }
    } catch (const Error& e) {
      last_error = e.what();
      continue;
    }
    const double m = sum / static_cast<double>(splits.size());
    if (!best || m > best->choice.mean_train_accuracy)
      best = GridSearchOutcome{GridChoice{grid[g], g, m}, std::move(models)};
  }
  if (!best) throw Error("grid exhausted: no grid point trained successfully (last error: " + last_error + ")");
  return std::move(*best);
}

inline GridChoice grid_search(const ExperimentSpec& spec, const std::vector<Split>& splits) {
  spec.validate();
  bool multiclass = spec.task == TaskKind::multiclass;
  if (spec.task == TaskKind::automatic) multiclass = resolve_multiclass(spec.task, splits.front().train);
  return search_grid(spec, multiclass, splits).choice;
}

namespace detail {

inline std::pair<ConfusionMatrix, AdjacencyErrors> evaluate_split(const AnyModel& model, const Dataset& test,
                                                                  bool multiclass, const std::vector<int>& classes) {
  std::vector<int> actual, predicted;
  for (std::size_t i = 0; i < test.size(); ++i) {
    actual.push_back(test.label(i));
    predicted.push_back(predict_any(model, test.features(i)));
  }
  if (!multiclass) return {binary_confusion(actual, predicted), AdjacencyErrors{}};
  auto index_of = [&classes](int label) {
    auto it = std::find(classes.begin(), classes.end(), label);
    require(it != classes.end(), "test label " + std::to_string(label) + " unseen in the data");
    return static_cast<int>(it - classes.begin());
  };
  for (auto& a : actual) a = index_of(a);
  for (auto& p : predicted) p = index_of(p);
  auto cm = confusion(actual, predicted, classes.size());
  const auto adj = adjacency_errors(cm, natural_ordering(classes.size()));
  return {std::move(cm), adj};
}

}  // namespace detail

/// Runs the whole protocol; deterministic given spec.seed.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto data = load_source(spec.source, spec.seed);
  ExperimentResult result;
  result.multiclass = resolve_multiclass(spec.task, data);
  result.classes = data.classes();
  const auto splits = make_splits(spec, data);

  auto search = search_grid(spec, result.multiclass, splits);
  result.chosen = search.choice.bundle;
  result.chosen_train_accuracy = search.choice.mean_train_accuracy;

  const double c = spec.classical_c.value_or(derive_c(result.chosen.base, result.chosen.bits));
  const auto kernel = KernelParams::gaussian(spec.classical_gamma.value_or(result.chosen.gamma));
  for (std::size_t s = 0; s < splits.size(); ++s) {
    const auto& split = splits[s];
    const auto& trained = search.models[s];
    AnyModel classical = result.multiclass
                             ? AnyModel{train_multiclass_classical(split.train, kernel, c)}
                             : AnyModel{as_ensemble(train_classical(split.train, kernel, c).model)};
    ShuffleOutcome out;
    out.qsvm_train_accuracy = trained.train_accuracy;
    out.bias_offset = trained.bias_offset;
    auto [qcm, qadj] = detail::evaluate_split(trained.model, split.test, result.multiclass, result.classes);
    auto [ccm, cadj] = detail::evaluate_split(classical, split.test, result.multiclass, result.classes);
    out.qsvm_accuracy = multiclass_accuracy(qcm);
    out.classical_accuracy = multiclass_accuracy(ccm);
    out.qsvm_confusion = std::move(qcm);
    out.classical_confusion = std::move(ccm);
    out.qsvm_adjacency = qadj;
    out.classical_adjacency = cadj;
    result.shuffles.push_back(std::move(out));
  }
  const auto q = result.qsvm_accuracies();
  const auto cl = result.classical_accuracies();
  result.qsvm_mean = mean(q);
  result.qsvm_stddev = population_stddev(q);
  result.classical_mean = mean(cl);
  result.classical_stddev = population_stddev(cl);
  return result;
}

namespace detail {

template <typename T, typename Parse>
std::vector<T> parse_list(const KeyValueConfig& cfg, const std::string& key, std::vector<T> fallback, Parse parse) {
  auto v = cfg.get(key);
  if (!v) return fallback;
  std::vector<T> out;
  for (const auto& tok : split(*v, ',')) out.push_back(parse(tok));
  return out;
}

}  // namespace detail

/// Reads an experiment spec from a flat config. Relative data paths resolve
/// against `base_dir`. Recognized keys:
///   data, label, synthetic.<key> (see synthetic_spec_from_config), task,
///   pca_dim, pca_fit, standardize, shuffles, train_fraction, grid.B,
///   grid.K, grid.xi, grid.gamma, sampler, sweeps, reads, t0, tf, threads,
///   ensemble, seed, bias_adjust, bias_radius, bias_step, classical_c,
///   classical_gamma
inline ExperimentSpec experiment_spec_from_config(const KeyValueConfig& cfg,
                                                  const std::filesystem::path& base_dir = {}) {
  static const std::vector<std::string> known = {
      "data", "label", "task", "pca_dim", "pca_fit", "standardize", "shuffles", "train_fraction",
      "grid.B", "grid.K", "grid.xi", "grid.gamma", "sampler", "sweeps", "reads", "t0", "tf", "threads",
      "ensemble", "seed", "bias_adjust", "bias_radius", "bias_step", "classical_c", "classical_gamma"};
  for (const auto& [k, v] : cfg.values())
    require(k.rfind("synthetic.", 0) == 0 || std::find(known.begin(), known.end(), k) != known.end(),
            "experiment config: unknown key '" + k + "'");

  ExperimentSpec spec;
  if (auto d = cfg.get("data")) {
    std::filesystem::path p(*d);
    spec.source.csv = p.is_relative() ? base_dir / p : p;
  }
  spec.source.label_column = cfg.get_or("label", "label");
  const auto synth = cfg.subset("synthetic.");
  if (!synth.values().empty()) spec.source.synthetic = synthetic_spec_from_config(synth);

  const auto task = cfg.get_or("task", "auto");
  if (task == "auto") spec.task = TaskKind::automatic;
  else if (task == "binary") spec.task = TaskKind::binary;
  else if (task == "multiclass") spec.task = TaskKind::multiclass;
  else throw Error("experiment config: unknown task '" + task + "'");

  const auto pca_dim = cfg.integer_or("pca_dim", 0);
  require(pca_dim >= 0, "pca_dim must be nonnegative");
  spec.pca_dim = static_cast<std::size_t>(pca_dim);
  const auto fit = cfg.get_or("pca_fit", "train");
  require(fit == "train" || fit == "pooled", "pca_fit must be 'train' or 'pooled'");
  spec.pca_fit = fit == "train" ? PcaFit::train : PcaFit::pooled;
  spec.standardize = cfg.flag_or("standardize", false);

  const auto shuffles = cfg.integer_or("shuffles", 10);
  require(shuffles >= 1, "shuffles must be >= 1");
  spec.num_shuffles = static_cast<std::size_t>(shuffles);
  spec.train_fraction = cfg.real_or("train_fraction", 0.7);

  auto as_int = [](const std::string& s) { return static_cast<int>(require_integer(s, "grid value")); };
  auto as_real = [](const std::string& s) { return require_real(s, "grid value"); };
  spec.grid.bases = detail::parse_list<int>(cfg, "grid.B", {2}, as_int);
  spec.grid.bits = detail::parse_list<int>(cfg, "grid.K", {2}, as_int);
  spec.grid.xis = detail::parse_list<double>(cfg, "grid.xi", {0.0}, as_real);
  spec.grid.gammas = detail::parse_list<double>(cfg, "grid.gamma", {1.0}, as_real);

  const auto seed = cfg.integer_or("seed", 0);
  spec.seed = static_cast<std::uint64_t>(seed);
  const auto sampler = cfg.get_or("sampler", "anneal");
  if (sampler == "exhaustive") {
    spec.sampler = ExhaustiveSampler{};
  } else if (sampler == "anneal") {
    AnnealSchedule a;
    a.sweeps = static_cast<std::size_t>(cfg.integer_or("sweeps", 1000));
    a.num_reads = static_cast<std::size_t>(cfg.integer_or("reads", 64));
    a.threads = static_cast<std::size_t>(cfg.integer_or("threads", 1));
    if (cfg.has("t0")) a.initial_temperature = cfg.real_or("t0", 1.0);
    if (cfg.has("tf")) a.final_temperature = cfg.real_or("tf", 1.0);
    a.seed = spec.seed;
    a.validate();
    spec.sampler = a;
  } else {
    throw Error("experiment config: unknown sampler '" + sampler + "'");
  }
  const auto ensemble = cfg.integer_or("ensemble", 1);
  require(ensemble >= 1, "ensemble must be >= 1");
  spec.ensemble_size = static_cast<std::size_t>(ensemble);
  spec.bias_adjust = cfg.flag_or("bias_adjust", false);
  spec.bias_radius = cfg.real_or("bias_radius", 1.0);
  spec.bias_step = cfg.real_or("bias_step", 0.01);
  if (cfg.has("classical_c")) spec.classical_c = cfg.real_or("classical_c", 1.0);
  if (cfg.has("classical_gamma")) spec.classical_gamma = cfg.real_or("classical_gamma", 1.0);
  spec.validate();
  return spec;
}

inline std::string experiment_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "shuffle,qsvm_accuracy,classical_accuracy,qsvm_train_accuracy,bias_offset\n";
  for (std::size_t s = 0; s < r.shuffles.size(); ++s) {
    const auto& o = r.shuffles[s];
    out << s << "," << format_real(o.qsvm_accuracy) << "," << format_real(o.classical_accuracy) << ","
        << format_real(o.qsvm_train_accuracy) << "," << format_real(o.bias_offset) << "\n";
  }
  return out.str();
}

inline std::string experiment_report(const ExperimentResult& r) {
  std::ostringstream out;
  out << "task            " << (r.multiclass ? "multiclass (one-against-all)" : "binary") << "\n";
  out << "chosen bundle   B=" << r.chosen.base << " K=" << r.chosen.bits << " xi=" << format_real(r.chosen.xi)
      << " gamma=" << format_real(r.chosen.gamma) << " C=" << format_real(derive_c(r.chosen.base, r.chosen.bits))
      << "\n";
  out << "grid train acc  " << format_fixed(r.chosen_train_accuracy) << "\n";
  out << "\nshuffle   qsvm    classical   adjacent  distant\n";
  for (std::size_t s = 0; s < r.shuffles.size(); ++s) {
    const auto& o = r.shuffles[s];
    out << "  " << s << (s < 10 ? " " : "") << "     " << format_fixed(o.qsvm_accuracy) << "  "
        << format_fixed(o.classical_accuracy) << "      " << o.qsvm_adjacency.adjacent << "         "
        << o.qsvm_adjacency.distant << "\n";
  }
  out << "\nqsvm       mean " << format_fixed(r.qsvm_mean) << "  stddev " << format_fixed(r.qsvm_stddev) << "\n";
  out << "classical  mean " << format_fixed(r.classical_mean) << "  stddev " << format_fixed(r.classical_stddev)
      << "\n";
  return out.str();
}

}  // namespace qsvm
