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

// One-against-all multiclass classification over binary ensembles.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/svm.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

/// classifiers[c] separates classes[c] (+1) from the rest (-1).
struct MulticlassModel {
  std::vector<int> classes;
  std::vector<EnsembleModel> classifiers;

  std::size_t dim() const { return classifiers.front().dim(); }

  void validate() const {
    require(classes.size() >= 2, "multiclass model needs at least two classes");
    require(classes.size() == classifiers.size(), "multiclass model: one classifier per class required");
    for (const auto& c : classifiers) c.validate();
  }
};

/// +1 for points of `positive`, -1 for the rest.
inline Dataset one_against_all(const Dataset& data, int positive) {
  std::vector<int> labels;
  for (const auto& p : data.points()) labels.push_back(p.label == positive ? 1 : -1);
  return data.with_labels(labels);
}

/// Seed of the classifier for `class_id` under master seed `seed`.
inline std::uint64_t class_seed(std::uint64_t seed, int class_id) {
  return mix_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(class_id)));
}

using BinaryTrainer = std::function<EnsembleModel(const Dataset& relabeled, int class_id)>;

/// Trains one classifier per class in ascending class order. When
/// `expected_classes` is given every listed class must occur in the data.
inline MulticlassModel train_one_against_all(const Dataset& data, const BinaryTrainer& trainer,
                                             const std::optional<std::vector<int>>& expected_classes = {}) {
  auto classes = data.classes();
  if (expected_classes) {
    for (int c : *expected_classes)
      require(std::find(classes.begin(), classes.end(), c) != classes.end(),
              "class " + std::to_string(c) + " has no points");
    classes = *expected_classes;
    std::sort(classes.begin(), classes.end());
  }
  require(classes.size() >= 2, "multiclass training needs at least 2 classes, found " +
                                   std::to_string(classes.size()));
  MulticlassModel model;
  model.classes = classes;
  for (int c : classes) model.classifiers.push_back(trainer(one_against_all(data, c), c));
  return model;
}

inline MulticlassModel train_multiclass(const Dataset& data, const TrainConfig& config,
                                        const std::optional<std::vector<int>>& expected_classes = {}) {
  std::uint64_t master = 0;
  if (const auto* a = std::get_if<AnnealSchedule>(&config.sampler)) master = a->seed;
  return train_one_against_all(
      data,
      [&](const Dataset& relabeled, int c) {
        auto cfg = config;
        cfg.sampler = reseeded(config.sampler, class_seed(master, c));
        return train_binary(relabeled, cfg);
      },
      expected_classes);
}

inline MulticlassModel train_multiclass_classical(const Dataset& data, const KernelParams& kernel, double c_bound,
                                                  const ClassicalOptions& options = {}) {
  return train_one_against_all(data, [&](const Dataset& relabeled, int) {
    return as_ensemble(train_classical(relabeled, kernel, c_bound, options).model);
  });
}

/// Index of the largest value; the earliest index wins ties.
inline std::size_t argmax_first(std::span<const double> values) {
  require(!values.empty(), "argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

inline std::vector<double> multiclass_decisions(const MulticlassModel& model, std::span<const double> x) {
  std::vector<double> out;
  for (const auto& c : model.classifiers) out.push_back(ensemble_decision(c, x));
  return out;
}

/// Class with the largest F(x); ties go to the lowest class id.
inline int predict_multiclass(const MulticlassModel& model, std::span<const double> x) {
  require(!model.classifiers.empty(), "multiclass model has no classifiers");
  const auto values = multiclass_decisions(model, x);
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best] || (values[i] == values[best] && model.classes[i] < model.classes[best]))
      best = i;
  return model.classes[best];
}

// Manifest: "qsvm-multiclass 1", "classes k", then "class <id> <file>" with
// files relative to the manifest's directory.

inline std::string member_file_name(const std::filesystem::path& manifest, int class_id) {
  return manifest.stem().string() + ".class" + std::to_string(class_id) + ".model";
}

inline void save_multiclass(const MulticlassModel& model, const std::filesystem::path& manifest) {
  model.validate();
  const auto dir = manifest.parent_path();
  std::ostringstream out;
  out << "qsvm-multiclass 1\nclasses " << model.classes.size() << "\n";
  for (std::size_t i = 0; i < model.classes.size(); ++i) {
    const auto name = member_file_name(manifest, model.classes[i]);
    write_file_atomic(dir / name, serialize_model(model.classifiers[i]));
    out << "class " << model.classes[i] << " " << name << "\n";
  }
  write_file_atomic(manifest, out.str());
}

inline MulticlassModel load_multiclass(const std::filesystem::path& manifest) {
  std::istringstream in(read_file(manifest));
  std::string line;
  std::vector<std::vector<std::string>> recs;
  while (std::getline(in, line)) {
    auto tok = split_whitespace(line);
    if (!tok.empty()) recs.push_back(std::move(tok));
  }
  require(recs.size() >= 2 && recs[0].size() == 2 && recs[0][0] == "qsvm-multiclass" && recs[0][1] == "1",
          "not a multiclass manifest: " + manifest.string());
  require(recs[1].size() == 2 && recs[1][0] == "classes", "manifest: missing class count");
  const auto k = static_cast<std::size_t>(require_integer(recs[1][1], "classes"));
  require(recs.size() == k + 2, "manifest: class count does not match entries");
  MulticlassModel model;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& r = recs[i + 2];
    require(r.size() == 3 && r[0] == "class", "manifest: malformed class entry");
    model.classes.push_back(static_cast<int>(require_integer(r[1], "class id")));
    model.classifiers.push_back(parse_model(read_file(manifest.parent_path() / r[2])));
  }
  require(std::is_sorted(model.classes.begin(), model.classes.end()), "manifest: classes must ascend");
  model.validate();
  return model;
}

}  // namespace qsvm
