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

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qsvm/multiclass.hpp"
#include "qsvm/svm.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

/// Either a binary ensemble (labels -1/+1) or a one-against-all model.
using AnyModel = std::variant<EnsembleModel, MulticlassModel>;

inline std::size_t model_dim(const AnyModel& m) {
  return std::visit([](const auto& v) { return v.dim(); }, m);
}

inline bool is_multiclass(const AnyModel& m) { return std::holds_alternative<MulticlassModel>(m); }

inline int predict_any(const AnyModel& m, std::span<const double> x) {
  if (const auto* e = std::get_if<EnsembleModel>(&m)) return predict(*e, x);
  return predict_multiclass(std::get<MulticlassModel>(m), x);
}

/// One value for a binary model, one per class for a multiclass model.
inline std::vector<double> decisions_any(const AnyModel& m, std::span<const double> x) {
  if (const auto* e = std::get_if<EnsembleModel>(&m)) return {ensemble_decision(*e, x)};
  return multiclass_decisions(std::get<MulticlassModel>(m), x);
}

/// Dispatches on the file header.
inline AnyModel load_any_model(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (text.rfind("qsvm-multiclass", 0) == 0) return load_multiclass(path);
  if (text.rfind("qsvm-model", 0) == 0) return parse_model(text);
  throw Error("unreadable model file: " + path.string());
}

inline void save_any_model(const AnyModel& m, const std::filesystem::path& path) {
  if (const auto* e = std::get_if<EnsembleModel>(&m))
    write_file_atomic(path, serialize_model(*e));
  else
    save_multiclass(std::get<MulticlassModel>(m), path);
}

}  // namespace qsvm
