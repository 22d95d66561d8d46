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

// qsvm command-line tool: datagen, pca, train, predict, evaluate,
// experiment and solve-qubo subcommands over the header-only library.
//
// Exit codes: 0 success, 1 user or data error, 2 internal invariant
// violation. The resolved configuration of every run goes to stderr.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsvm/qsvm.hpp"

namespace {

using namespace qsvm;

struct Resolved {
  std::vector<std::pair<std::string, std::string>> entries;
  template <typename T>
  void add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    entries.emplace_back(key, s.str());
  }
  void print(const std::string& command) const {
    std::cerr << "# qsvm " << command << "\n";
    for (const auto& [k, v] : entries) std::cerr << "#   " << k << " = " << v << "\n";
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QSVM_SEED")) {
    auto v = parse_integer(env);
    require(v.has_value() && *v >= 0, "QSVM_SEED must be a nonnegative integer");
    return static_cast<std::uint64_t>(*v);
  }
  return 0;
}

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path)
    write_file_atomic(*path, text);
  else
    std::cout << text;
}

std::string join(const std::vector<double>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + format_real(v[i]);
  return out;
}

struct AnnealFlags {
  std::size_t sweeps = 1000;
  std::size_t reads = 64;
  std::optional<double> t0, tf;
  std::size_t threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--sweeps", sweeps, "Annealing sweeps per read")->check(CLI::PositiveNumber);
    app->add_option("--reads", reads, "Independent annealing reads")->check(CLI::PositiveNumber);
    app->add_option("--t0", t0, "Initial temperature (default: max |coefficient|)");
    app->add_option("--tf", tf, "Final temperature (default: 1e-3 * t0)");
    app->add_option("--threads", threads, "Worker cap; results do not depend on it")->check(CLI::PositiveNumber);
  }

  AnnealSchedule schedule(std::uint64_t seed) const {
    AnnealSchedule a;
    a.sweeps = sweeps;
    a.num_reads = reads;
    a.initial_temperature = t0;
    a.final_temperature = tf;
    a.seed = seed;
    a.threads = threads;
    a.validate();
    return a;
  }

  void describe(Resolved& r) const {
    r.add("sweeps", sweeps);
    r.add("reads", reads);
    r.add("t0", t0 ? format_real(*t0) : "auto");
    r.add("tf", tf ? format_real(*tf) : "auto");
    r.add("threads", threads);
  }
};

// ---------------------------------------------------------------- datagen

struct DatagenCmd {
  std::optional<std::string> config, mode, centers, counts, angles, labels;
  std::optional<double> spread, noise, angle_jitter;
  std::optional<long long> taps;
  std::optional<std::uint64_t> seed;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Key-value synthetic spec file")->check(CLI::ExistingFile);
    app->add_option("--mode", mode, "blobs | pressure");
    app->add_option("--centers", centers, "Blob centers, e.g. -5,0;5,0");
    app->add_option("--counts", counts, "Points per class, e.g. 20,20");
    app->add_option("--spread", spread, "Blob standard deviation");
    app->add_option("--taps", taps, "Pressure taps per profile");
    app->add_option("--angles", angles, "Nominal angle per class, e.g. 14,16,18,20");
    app->add_option("--noise", noise, "Per-tap noise standard deviation");
    app->add_option("--angle-jitter", angle_jitter, "Uniform angle jitter half-width");
    app->add_option("--labels", labels, "Label per class");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--out", out, "Output CSV")->required();
  }

  int run() const {
    auto cfg = config ? KeyValueConfig::load(*config) : KeyValueConfig{};
    if (mode) cfg.set("mode", *mode);
    if (centers) cfg.set("centers", *centers);
    if (counts) cfg.set("counts", *counts);
    if (spread) cfg.set("spread", format_real(*spread));
    if (taps) cfg.set("taps", std::to_string(*taps));
    if (angles) cfg.set("angles", *angles);
    if (noise) cfg.set("noise", format_real(*noise));
    if (angle_jitter) cfg.set("angle_jitter", format_real(*angle_jitter));
    if (labels) cfg.set("labels", *labels);
    const auto s = seed.value_or(default_seed());
    Resolved r;
    for (const auto& [k, v] : cfg.values()) r.add(k, v);
    r.add("seed", s);
    r.add("out", out);
    r.print("datagen");
    const auto data = generate_synthetic(synthetic_spec_from_config(cfg), s);
    write_file_atomic(out, to_csv(data));
    std::cout << "wrote " << data.size() << " points of dimension " << data.dim() << " to " << out << "\n";
    return 0;
  }
};

// -------------------------------------------------------------------- pca

struct PcaCmd {
  std::string data, label = "label", out;
  std::size_t dim = 2;
  bool standardize = false;
  std::optional<std::string> apply, transform_out;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Input CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--label", label, "Label column name");
    app->add_option("--dim", dim, "Target dimension")->check(CLI::PositiveNumber);
    app->add_flag("--standardize", standardize, "Scale features to unit variance before PCA");
    app->add_option("--apply", apply, "Reuse a saved transform instead of fitting")->check(CLI::ExistingFile);
    app->add_option("--transform-out", transform_out, "Save the fitted transform");
    app->add_option("--out", out, "Projected CSV")->required();
  }

  int run() const {
    Resolved r;
    r.add("data", data);
    r.add("label", label);
    r.add("dim", apply ? std::string("from transform") : std::to_string(dim));
    r.add("standardize", standardize);
    r.add("apply", apply.value_or("none"));
    r.add("transform_out", transform_out.value_or("none"));
    r.add("out", out);
    r.print("pca");
    const auto ds = load_csv(data, label);
    const auto t = apply ? parse_pca(read_file(*apply)) : fit_pca(ds, dim, standardize);
    const auto projected = apply_pca(t, ds);
    write_file_atomic(out, to_csv(projected, label));
    if (transform_out) write_file_atomic(*transform_out, serialize_pca(t));
    std::cout << "projected " << ds.size() << " points from " << t.input_dim() << " to " << t.target_dim()
              << " dimensions\nexplained variance";
    for (double v : t.explained_variance) std::cout << ' ' << format_fixed(v, 6);
    std::cout << "\n";
    return 0;
  }
};

// ------------------------------------------------------------------ train

struct TrainCmd {
  std::string data, label = "label", out, kernel = "gaussian", sampler = "anneal", format = "text";
  double gamma = 1.0, xi = 0.0;
  int base = 2, bits = 2;
  std::size_t ensemble = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> c_bound;
  bool multiclass = false, classical = false, bias_adjust = false;
  double bias_radius = 1.0, bias_step = 0.01;
  AnnealFlags anneal;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Training CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--label", label, "Label column name");
    app->add_option("--kernel", kernel, "gaussian | linear")->check(CLI::IsMember({"gaussian", "linear"}));
    app->add_option("--gamma", gamma, "Gaussian kernel width parameter");
    app->add_option("--B", base, "Encoding base");
    app->add_option("--K", bits, "Bits per coefficient");
    app->add_option("--xi", xi, "Equality-constraint penalty multiplier");
    app->add_option("--ensemble", ensemble, "Lowest-energy solutions averaged per classifier")
        ->check(CLI::PositiveNumber);
    app->add_option("--sampler", sampler, "anneal | exhaustive")->check(CLI::IsMember({"anneal", "exhaustive"}));
    app->add_option("--seed", seed, "Random seed");
    app->add_flag("--multiclass", multiclass, "Train one-against-all over all classes");
    app->add_flag("--classical", classical, "Train the continuous dual baseline instead");
    app->add_option("--C", c_bound, "Box bound for --classical (default: derived from B and K)");
    app->add_flag("--bias-adjust", bias_adjust, "Shift biases to maximize training accuracy");
    app->add_option("--bias-radius", bias_radius, "Bias scan half-width");
    app->add_option("--bias-step", bias_step, "Bias scan step");
    app->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    app->add_option("--out", out, "Model file (multiclass: manifest)")->required();
    anneal.attach(app);
  }

  KernelParams kernel_params() const {
    return kernel == "linear" ? KernelParams::linear() : KernelParams::gaussian(gamma);
  }

  int run() const {
    const auto s = seed.value_or(default_seed());
    Resolved r;
    r.add("data", data);
    r.add("label", label);
    r.add("kernel", kernel);
    r.add("gamma", format_real(gamma));
    r.add("B", base);
    r.add("K", bits);
    r.add("xi", format_real(xi));
    r.add("C", format_real(c_bound.value_or(derive_c(base, bits))));
    r.add("trainer", classical ? "classical" : "qsvm");
    r.add("multiclass", multiclass);
    r.add("ensemble", ensemble);
    r.add("sampler", sampler);
    anneal.describe(r);
    r.add("seed", s);
    r.add("bias_adjust", bias_adjust);
    r.add("out", out);
    r.print("train");

    auto ds = load_csv(data, label);
    const EncodingParams enc{base, bits, xi, kernel_params()};
    enc.validate();
    const double c = c_bound.value_or(enc.c_bound());
    TrainConfig cfg{enc, sampler == "exhaustive" ? SamplerChoice{ExhaustiveSampler{}} : SamplerChoice{anneal.schedule(s)},
                    ensemble};

    std::map<std::string, std::string> summary;
    auto note = [&summary](const std::string& k, const std::string& v) { summary[k] = v; };
    AnyModel model = EnsembleModel{};
    std::vector<std::string> stats;
    auto describe_ensemble = [&](const EnsembleModel& m, const std::string& prefix) {
      if (classical) return;
      note(prefix + "qubo_vars", std::to_string(static_cast<std::size_t>(bits) * m.training().size()));
      note(prefix + "best_energy", format_real(*m.members.front().energy));
      note(prefix + "distinct_solutions", std::to_string(m.members.size()));
      std::size_t degenerate = 0;
      for (const auto& mem : m.members) degenerate += mem.degenerate;
      note(prefix + "degenerate_members", std::to_string(degenerate));
    };

    if (multiclass) {
      MulticlassModel mc = classical ? train_multiclass_classical(ds, enc.kernel, c) : train_multiclass(ds, cfg);
      if (bias_adjust)
        for (std::size_t i = 0; i < mc.classes.size(); ++i)
          mc.classifiers[i] = adjust_bias(mc.classifiers[i], one_against_all(ds, mc.classes[i]), bias_radius, bias_step);
      for (std::size_t i = 0; i < mc.classes.size(); ++i)
        describe_ensemble(mc.classifiers[i], "class" + std::to_string(mc.classes[i]) + ".");
      note("classes", std::to_string(mc.classes.size()));
      model = std::move(mc);
    } else {
      EnsembleModel e;
      if (classical) {
        auto fit = train_classical(ds, enc.kernel, c);
        note("kkt_residual", format_real(fit.kkt_residual));
        note("iterations", std::to_string(fit.iterations));
        note("converged", fit.converged ? "1" : "0");
        if (!fit.converged) std::cerr << "warning: classical solver hit the iteration cap\n";
        e = as_ensemble(std::move(fit.model));
      } else {
        e = train_binary(ds, cfg);
      }
      if (bias_adjust) {
        const auto adj = find_bias_offset(e, ds, bias_radius, bias_step);
        e = shift_bias(std::move(e), adj.offset);
        note("bias_offset", format_real(adj.offset));
      }
      describe_ensemble(e, "");
      model = std::move(e);
    }
    note("training_accuracy", format_real(accuracy_of(model, ds)));
    note("points", std::to_string(ds.size()));
    save_any_model(model, out);

    for (const auto& [k, v] : summary) std::cout << k << (format == "csv" ? "=" : "  ") << v << "\n";
    return 0;
  }
};

// ---------------------------------------------------------------- predict

struct PredictCmd {
  std::string model, data, label = "label", format = "text";
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "Model file or multiclass manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--data", data, "Feature CSV (label column ignored if present)")->required()->check(CLI::ExistingFile);
    app->add_option("--label", label, "Label column to skip");
    app->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    app->add_option("--out", out, "Write predictions to a file");
  }

  int run() const {
    Resolved r;
    r.add("model", model);
    r.add("data", data);
    r.add("label", label);
    r.add("format", format);
    r.add("out", out.value_or("stdout"));
    r.print("predict");
    const auto m = load_any_model(model);
    const auto rows = load_feature_rows(data, label);
    const auto dim = model_dim(m);
    std::string text;
    const std::string sep = format == "csv" ? "," : " ";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == dim, "feature dimension mismatch: model expects " + std::to_string(dim) +
                                         ", data has " + std::to_string(rows[i].size()));
      text += std::to_string(predict_any(m, rows[i])) + sep + join(decisions_any(m, rows[i]), sep) + "\n";
    }
    emit(out, text);
    return 0;
  }
};

// --------------------------------------------------------------- evaluate

struct EvaluateCmd {
  std::string model, data, label = "label", format = "text";
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "Model file or multiclass manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--data", data, "Labeled CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--label", label, "Label column name");
    app->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    app->add_option("--out", out, "Write the report to a file");
  }

  int run() const {
    Resolved r;
    r.add("model", model);
    r.add("data", data);
    r.add("label", label);
    r.add("format", format);
    r.print("evaluate");
    const auto m = load_any_model(model);
    const auto ds = load_csv(data, label);
    require(ds.dim() == model_dim(m), "feature dimension mismatch: model expects " + std::to_string(model_dim(m)) +
                                          ", data has " + std::to_string(ds.dim()));
    std::vector<int> actual = ds.labels(), predicted;
    for (std::size_t i = 0; i < ds.size(); ++i) predicted.push_back(predict_any(m, ds.features(i)));
    std::ostringstream text;
    if (!is_multiclass(m)) {
      const auto cm = binary_confusion(actual, predicted);
      const auto rep = binary_report(cm);
      if (format == "csv") {
        text << "task=binary\npoints=" << ds.size() << "\n" << binary_report_kv(rep);
      } else {
        const std::vector<std::string> names{"+1", "-1"};
        text << format_confusion(cm, names) << "\n" << format_binary_report(rep);
      }
    } else {
      const auto& mc = std::get<MulticlassModel>(m);
      auto index_of = [&mc](int label) {
        auto it = std::find(mc.classes.begin(), mc.classes.end(), label);
        require(it != mc.classes.end(), "label " + std::to_string(label) + " is not a model class");
        return static_cast<int>(it - mc.classes.begin());
      };
      for (auto& a : actual) a = index_of(a);
      for (auto& p : predicted) p = index_of(p);
      const auto cm = confusion(actual, predicted, mc.classes.size());
      const auto acc = multiclass_accuracy(cm);
      const auto adj = adjacency_errors(cm, natural_ordering(cm.k()));
      if (format == "csv") {
        text << "task=multiclass\npoints=" << ds.size() << "\naccuracy=" << format_real(acc)
             << "\nadjacent_errors=" << adj.adjacent << "\ndistant_errors=" << adj.distant << "\n";
        for (std::size_t a = 0; a < cm.k(); ++a)
          for (std::size_t p = 0; p < cm.k(); ++p)
            text << "confusion." << mc.classes[a] << "." << mc.classes[p] << "=" << cm(a, p) << "\n";
      } else {
        std::vector<std::string> names;
        for (int c : mc.classes) names.push_back(std::to_string(c));
        text << format_confusion(cm, names) << "\naccuracy        " << format_fixed(acc)
             << "\nadjacent errors " << adj.adjacent << "\ndistant errors  " << adj.distant << "\n";
      }
    }
    emit(out, text.str());
    return 0;
  }
};

// ------------------------------------------------------------- experiment

struct ExperimentCmd {
  std::string config, format = "text";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> report, csv;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Override the config seed");
    app->add_option("--report", report, "Write the text report to a file");
    app->add_option("--csv", csv, "Write per-shuffle accuracies as CSV");
    app->add_option("--format", format, "Standard output format: text | csv")->check(CLI::IsMember({"text", "csv"}));
  }

  int run() const {
    auto cfg = KeyValueConfig::load(config);
    if (seed) cfg.set("seed", std::to_string(*seed));
    else if (!cfg.has("seed")) cfg.set("seed", std::to_string(default_seed()));
    const auto spec = experiment_spec_from_config(cfg, std::filesystem::path(config).parent_path());
    Resolved r;
    for (const auto& [k, v] : cfg.values()) r.add(k, v);
    r.add("report", report.value_or("stdout"));
    r.add("csv", csv.value_or("none"));
    r.print("experiment");
    const auto result = run_experiment(spec);
    const auto rep = experiment_report(result);
    const auto table = experiment_csv(result);
    if (report) write_file_atomic(*report, rep);
    if (csv) write_file_atomic(*csv, table);
    std::cout << (format == "csv" ? table : rep);
    return 0;
  }
};

// ------------------------------------------------------------- solve-qubo

struct SolveQuboCmd {
  std::string qubo, solver = "exhaustive", format = "text";
  std::size_t top_k = 5;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  AnnealFlags anneal;

  void attach(CLI::App* app) {
    app->add_option("--qubo", qubo, "QUBO file in 'vars N' / 'i j value' format")->required()->check(CLI::ExistingFile);
    app->add_option("--solver", solver, "exhaustive | anneal")->check(CLI::IsMember({"exhaustive", "anneal"}));
    app->add_option("--top-k", top_k, "Number of distinct lowest-energy states")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));
    app->add_option("--out", out, "Write the listing to a file");
    anneal.attach(app);
  }

  int run() const {
    const auto s = seed.value_or(default_seed());
    Resolved r;
    r.add("qubo", qubo);
    r.add("solver", solver);
    r.add("top_k", top_k);
    if (solver == "anneal") anneal.describe(r);
    r.add("seed", s);
    r.print("solve-qubo");
    const auto q = parse_qubo(read_file(qubo));
    const auto set = solver == "anneal" ? solve_anneal(q, anneal.schedule(s), top_k) : solve_exhaustive(q, top_k);
    std::string text = format == "csv" ? "rank,bits,energy\n" : "";
    for (std::size_t i = 0; i < set.size(); ++i) {
      std::string bits;
      for (auto b : set[i].bits) bits += b ? '1' : '0';
      if (format == "csv")
        text += std::to_string(i) + "," + bits + "," + format_real(set[i].energy) + "\n";
      else
        text += bits + " " + format_real(set[i].energy) + "\n";
    }
    emit(out, text);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsvm: SVM training through QUBO sampling"};
  app.require_subcommand(1);
  DatagenCmd datagen;
  PcaCmd pca;
  TrainCmd train;
  PredictCmd predict;
  EvaluateCmd evaluate;
  ExperimentCmd experiment;
  SolveQuboCmd solve;
  auto* c_datagen = app.add_subcommand("datagen", "Generate a synthetic dataset");
  auto* c_pca = app.add_subcommand("pca", "Fit or apply a PCA projection");
  auto* c_train = app.add_subcommand("train", "Train a binary or multiclass model");
  auto* c_predict = app.add_subcommand("predict", "Predict classes for a feature file");
  auto* c_evaluate = app.add_subcommand("evaluate", "Confusion matrix and indicators on labeled data");
  auto* c_experiment = app.add_subcommand("experiment", "Run a shuffle/split experiment from a config");
  auto* c_solve = app.add_subcommand("solve-qubo", "Sample low-energy states of a QUBO file");
  datagen.attach(c_datagen);
  pca.attach(c_pca);
  train.attach(c_train);
  predict.attach(c_predict);
  evaluate.attach(c_evaluate);
  experiment.attach(c_experiment);
  solve.attach(c_solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*c_datagen) return datagen.run();
    if (*c_pca) return pca.run();
    if (*c_train) return train.run();
    if (*c_predict) return predict.run();
    if (*c_evaluate) return evaluate.run();
    if (*c_experiment) return experiment.run();
    if (*c_solve) return solve.run();
  } catch (const qsvm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
