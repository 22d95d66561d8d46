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

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/kernel.hpp"
#include "qsvm/metrics.hpp"
#include "qsvm/model_io.hpp"
#include "qsvm/multiclass.hpp"
#include "qsvm/pca.hpp"
#include "qsvm/pipeline.hpp"
#include "qsvm/qubo.hpp"
#include "qsvm/solver.hpp"
#include "qsvm/svm.hpp"
#include "qsvm/synthetic.hpp"
#include "qsvm/text.hpp"
