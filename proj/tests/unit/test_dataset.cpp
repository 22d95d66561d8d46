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

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "qsvm/dataset.hpp"
#include "qsvm/svm.hpp"
#include "qsvm/synthetic.hpp"

using namespace qsvm;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& contents) {
  auto p = std::filesystem::temp_directory_path() / ("qsvm_test_" + name);
  std::ofstream(p) << contents;
  return p;
}

std::vector<LabeledPoint> sorted_points(const Dataset& d) {
  auto pts = d.points();
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return std::tie(a.features, a.label) < std::tie(b.features, b.label);
  });
  return pts;
}

}  // namespace

TEST_CASE("load_csv parses rows in order", "[dataset]") {
  auto p = write_temp("ok.csv", "f1,f2,label\n0,0,-1\n1,1,1\n2,2,1\n");
  const auto d = load_csv(p, "label");
  REQUIRE(d.size() == 3);
  REQUIRE(d.dim() == 2);
  CHECK(d.label(0) == -1);
  CHECK(d.features(2)[1] == 2.0);
  CHECK(d.feature_names() == std::vector<std::string>{"f1", "f2"});
}

TEST_CASE("label column can sit anywhere", "[dataset]") {
  const auto d = parse_csv("label,a,b\n3,1.5,-2e-3\n", "label");
  CHECK(d.label(0) == 3);
  CHECK(d.features(0)[0] == 1.5);
  CHECK(d.features(0)[1] == -2e-3);
}

TEST_CASE("load_csv errors", "[dataset]") {
  SECTION("unparseable cell names row and column") {
    try {
      parse_csv("f1,f2,label\na,b,1\n", "label");
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 1") != std::string::npos);
      CHECK(msg.find("f1") != std::string::npos);
    }
  }
  SECTION("empty file") {
    CHECK_THROWS_WITH(parse_csv("", "label"), Catch::Matchers::ContainsSubstring("empty dataset"));
    CHECK_THROWS_WITH(parse_csv("f1,label\n", "label"), Catch::Matchers::ContainsSubstring("empty dataset"));
  }
  SECTION("ragged rows") {
    CHECK_THROWS_WITH(parse_csv("f1,f2,label\n1,2,1\n1,1\n", "label"), Catch::Matchers::ContainsSubstring("row 2"));
  }
  SECTION("non-finite values") {
    CHECK_THROWS_AS(parse_csv("f1,label\nnan,1\n", "label"), Error);
    CHECK_THROWS_AS(parse_csv("f1,label\ninf,1\n", "label"), Error);
  }
  SECTION("non-integer label") { CHECK_THROWS_AS(parse_csv("f1,label\n1,0.5\n", "label"), Error); }
  SECTION("missing file") { CHECK_THROWS_WITH(load_csv("/nonexistent/x.csv", "label"), Catch::Matchers::ContainsSubstring("not found")); }
  SECTION("missing label column") { CHECK_THROWS_AS(parse_csv("f1,y\n1,1\n", "label"), Error); }
}

TEST_CASE("CSV round trip through to_csv is exact", "[dataset]") {
  std::vector<LabeledPoint> pts{{{0.1, 1.0 / 3.0}, 1}, {{-1e-17, 12345.678901234567}, -1}};
  const Dataset d(pts);
  CHECK(parse_csv(to_csv(d), "label") == d);
}

TEST_CASE("shuffle_split sizes follow ceil(fraction * N)", "[dataset]") {
  std::mt19937_64 rng(1);
  std::vector<LabeledPoint> pts;
  for (int i = 0; i < 63; ++i) pts.push_back({{static_cast<double>(i)}, i % 4});
  const Dataset d63(pts);
  const Dataset d45(std::vector<LabeledPoint>(pts.begin(), pts.begin() + 45));

  auto [a, b] = shuffle_split(d45, 34.0 / 45.0, 7);
  CHECK(a.size() == 34);
  CHECK(b.size() == 11);
  auto [c, e] = shuffle_split(d63, 43.0 / 63.0, 7);
  CHECK(c.size() == 43);
  CHECK(e.size() == 20);

  SECTION("partition preserves the multiset") {
    std::vector<LabeledPoint> joined = c.points();
    joined.insert(joined.end(), e.points().begin(), e.points().end());
    CHECK(sorted_points(Dataset(joined)) == sorted_points(d63));
  }
  SECTION("same seed, same split; different seed, different order") {
    auto [c2, e2] = shuffle_split(d63, 43.0 / 63.0, 7);
    CHECK(c2 == c);
    CHECK(e2 == e);
    auto [c3, e3] = shuffle_split(d63, 43.0 / 63.0, 8);
    CHECK_FALSE(c3 == c);
  }
  SECTION("empty part rejected") {
    CHECK_THROWS_AS(shuffle_split(d45, 0.9999, 1), Error);
    CHECK_THROWS_AS(shuffle_split(d45, 0.0, 1), Error);
    CHECK_THROWS_AS(shuffle_split(d45, 1.0, 1), Error);
  }
}

TEST_CASE("shuffle_split partition property over random sizes", "[dataset][property]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<LabeledPoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({{static_cast<double>(rng() % 5)}, static_cast<int>(i)});
    const Dataset d(pts);
    const double f = (1.0 + static_cast<double>(rng() % (n - 1))) / static_cast<double>(n);
    auto [tr, te] = shuffle_split(d, f, rng());
    REQUIRE(tr.size() + te.size() == n);
    std::vector<LabeledPoint> joined = tr.points();
    joined.insert(joined.end(), te.points().begin(), te.points().end());
    REQUIRE(sorted_points(Dataset(joined)) == sorted_points(d));
  }
}

TEST_CASE("synthetic blobs", "[dataset][synthetic]") {
  BlobSpec spec{{{-5.0, 0.0}, {5.0, 0.0}}, {20, 20}, 0.5, {}};
  const auto d = generate_synthetic(spec, 11);
  REQUIRE(d.size() == 40);
  CHECK(d.classes() == std::vector<int>{-1, 1});
  CHECK(generate_synthetic(spec, 11) == d);
  CHECK_FALSE(generate_synthetic(spec, 12) == d);

  SECTION("separable: the classical baseline makes no training errors") {
    const auto fit = train_classical(d, KernelParams::gaussian(1.0), 3.0);
    CHECK(training_accuracy(as_ensemble(fit.model), d) == 1.0);
  }
  SECTION("invalid specs") {
    auto zero = spec;
    zero.counts = {20, 0};
    CHECK_THROWS_AS(generate_synthetic(zero, 1), Error);
    auto flat = spec;
    flat.spread = 0.0;
    CHECK_THROWS_AS(generate_synthetic(flat, 1), Error);
    auto single = spec;
    single.centers.pop_back();
    single.counts.pop_back();
    CHECK_THROWS_AS(generate_synthetic(single, 1), Error);
  }
}

TEST_CASE("synthetic pressure profiles", "[dataset][synthetic]") {
  PressureSpec spec;
  spec.taps = 10;
  spec.angles = {14, 16, 18, 20};
  spec.counts = {5, 5, 5, 4};
  const auto d = generate_synthetic(spec, 3);
  CHECK(d.size() == 19);
  CHECK(d.dim() == 10);
  CHECK(d.classes() == std::vector<int>{0, 1, 2, 3});

  SECTION("profile is strictly decreasing in the angle at every tap") {
    for (double s : tap_positions(10))
      for (double a = 0.0; a < 25.0; a += 0.5) CHECK(pressure_profile(s, a + 0.5) < pressure_profile(s, a));
  }
  SECTION("config parsing") {
    auto cfg = KeyValueConfig::parse("mode = pressure\ntaps = 6\nangles = 14, 20\ncounts = 3\n");
    const auto parsed = generate_synthetic(synthetic_spec_from_config(cfg), 1);
    CHECK(parsed.size() == 6);
    CHECK(parsed.dim() == 6);
    CHECK(parsed.classes() == std::vector<int>{-1, 1});
  }
}
