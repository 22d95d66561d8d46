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

#include <catch_amalgamated.hpp>

#include <numeric>

#include "qsvm/pipeline.hpp"

using namespace qsvm;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

ExperimentSpec blob_experiment(std::size_t shuffles) {
  BlobSpec blobs;
  blobs.centers = {{-2.0, -2.0}, {2.0, 2.0}};
  blobs.counts = {30, 30};
  blobs.spread = 0.8;
  ExperimentSpec spec;
  spec.source.synthetic = blobs;
  spec.num_shuffles = shuffles;
  spec.train_fraction = 2.0 / 3.0;
  AnnealSchedule sch;
  sch.sweeps = 300;
  sch.num_reads = 32;
  spec.sampler = sch;
  spec.seed = 11;
  return spec;
}

}  // namespace

TEST_CASE("grid expansion order", "[pipeline]") {
  HyperGrid g;
  g.bases = {2, 4};
  g.bits = {2, 3};
  g.xis = {0.0};
  g.gammas = {0.1, 1.0};
  const auto pts = expand_grid(g);
  REQUIRE(pts.size() == 8);
  CHECK(pts[0] == HyperBundle{2, 2, 0.0, 0.1});
  CHECK(pts[1] == HyperBundle{2, 2, 0.0, 1.0});
  CHECK(pts[2] == HyperBundle{2, 3, 0.0, 0.1});
  CHECK(pts[7] == HyperBundle{4, 3, 0.0, 1.0});
  CHECK(pts[7].encoding().c_bound() == 21.0);
}

TEST_CASE("binary experiment on separable blobs", "[pipeline][slow]") {
  const auto spec = blob_experiment(10);
  const auto r = run_experiment(spec);
  CHECK_FALSE(r.multiclass);
  REQUIRE(r.shuffles.size() == 10);
  for (const auto& s : r.shuffles) {
    CHECK(s.qsvm_accuracy >= 0.9);
    CHECK(std::abs(s.qsvm_accuracy - s.classical_accuracy) <= 0.1);
    CHECK(s.qsvm_confusion.total() == 20);
  }
  const auto q = r.qsvm_accuracies();
  CHECK_THAT(r.qsvm_mean, WithinAbs(std::accumulate(q.begin(), q.end(), 0.0) / 10.0, 1e-12));
  CHECK_THAT(experiment_csv(r), ContainsSubstring("shuffle,qsvm_accuracy"));
  CHECK_THAT(experiment_report(r), ContainsSubstring("binary"));
}

TEST_CASE("experiment protocol details", "[pipeline]") {
  SECTION("one shuffle has zero spread") {
    const auto r = run_experiment(blob_experiment(1));
    CHECK(r.qsvm_stddev == 0.0);
    CHECK(r.classical_stddev == 0.0);
  }
  SECTION("same seed, same result") {
    const auto spec = blob_experiment(2);
    CHECK(experiment_csv(run_experiment(spec)) == experiment_csv(run_experiment(spec)));
  }
  SECTION("split sizes") {
    auto spec = blob_experiment(3);
    const auto data = load_source(spec.source, spec.seed);
    const auto splits = make_splits(spec, data);
    REQUIRE(splits.size() == 3);
    for (const auto& s : splits) {
      CHECK(s.train.size() == 40);
      CHECK(s.test.size() == 20);
    }
    CHECK_FALSE(splits[0].train == splits[1].train);
  }
  SECTION("PCA inside the split") {
    auto spec = blob_experiment(2);
    spec.pca_dim = 1;
    const auto data = load_source(spec.source, spec.seed);
    for (const auto& s : make_splits(spec, data)) {
      CHECK(s.train.dim() == 1);
      CHECK(s.test.dim() == 1);
    }
  }
}

TEST_CASE("grid search selection", "[pipeline]") {
  auto spec = blob_experiment(2);
  BlobSpec small;
  small.centers = {{-1.0, 0.0}, {1.0, 0.0}};
  small.counts = {5, 5};
  small.spread = 1.0;
  spec.source.synthetic = small;
  spec.train_fraction = 0.6;
  spec.sampler = ExhaustiveSampler{};
  const auto data = load_source(spec.source, spec.seed);
  const auto splits = make_splits(spec, data);
  SECTION("a single grid point is chosen") {
    const auto c = grid_search(spec, splits);
    CHECK(c.index == 0);
    CHECK(c.bundle == HyperBundle{});
  }
  SECTION("ties go to the earliest point") {
    spec.grid.gammas = {1.0, 1.0, 1.0};
    CHECK(grid_search(spec, splits).index == 0);
  }
  SECTION("failing points are skipped") {
    spec.grid.bases = {1, 2};
    const auto c = grid_search(spec, splits);
    CHECK(c.bundle.base == 2);
  }
  SECTION("all points failing is an error") {
    spec.grid.bases = {1};
    CHECK_THROWS_WITH(grid_search(spec, splits), ContainsSubstring("grid exhausted"));
  }
}

TEST_CASE("experiment configuration", "[pipeline][config]") {
  const auto cfg = KeyValueConfig::parse(
      "synthetic.mode = pressure\n"
      "synthetic.angles = 14,16,18,20\n"
      "synthetic.counts = 16\n"
      "pca_dim = 3\n"
      "shuffles = 4\n"
      "grid.B = 4\n"
      "grid.K = 3\n"
      "grid.xi = 0\n"
      "grid.gamma = 0.27\n"
      "ensemble = 5\n"
      "sweeps = 200\n"
      "seed = 7\n");
  const auto spec = experiment_spec_from_config(cfg);
  CHECK(spec.pca_dim == 3);
  CHECK(spec.num_shuffles == 4);
  CHECK(spec.ensemble_size == 5);
  REQUIRE(expand_grid(spec.grid).size() == 1);
  CHECK(expand_grid(spec.grid)[0] == HyperBundle{4, 3, 0.0, 0.27});
  const auto& sch = std::get<AnnealSchedule>(spec.sampler);
  CHECK(sch.sweeps == 200);
  CHECK(sch.seed == 7);
  CHECK(load_source(spec.source, spec.seed).classes().size() == 4);

  CHECK_THROWS_WITH(experiment_spec_from_config(KeyValueConfig::parse("synthetic.mode = blobs\nbogus = 1\n")),
                    ContainsSubstring("unknown key 'bogus'"));
  CHECK_THROWS_AS(experiment_spec_from_config(KeyValueConfig::parse("shuffles = 2\n")), Error);
  const auto csv = experiment_spec_from_config(KeyValueConfig::parse("data = d.csv\n"), "/tmp/x");
  CHECK(*csv.source.csv == std::filesystem::path("/tmp/x/d.csv"));
}
