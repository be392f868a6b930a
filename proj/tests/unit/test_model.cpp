// Copyright 2026 The Spillover Authors
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

#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "spillover/model.hpp"
#include "spillover/model_zoo.hpp"
#include "test_util.hpp"

using spillover::ErrorCode;
using spillover::InterferenceGraph;
using spillover::NoiseSpec;
using spillover::OutcomeModel;
using spillover::TreatmentVector;

namespace {

OutcomeModel own_treatment_model(std::size_t n) {
  return OutcomeModel::general(
      "own", InterferenceGraph(n),
      [](std::size_t i, const TreatmentVector& w) { return double(w[i]); });
}

}  // namespace

TEST_CASE("evaluate_outcomes without noise") {
  spillover::Rng rng(1);
  const auto y = spillover::evaluate_outcomes(own_treatment_model(2),
                                              TreatmentVector{1, 0},
                                              NoiseSpec::none(), rng);
  CHECK(y == std::vector<double>{1.0, 0.0});
  CHECK_ERROR_CODE(spillover::evaluate_outcomes(own_treatment_model(2),
                                                TreatmentVector{1, 0, 1},
                                                NoiseSpec::none(), rng),
                   ErrorCode::kInvalidArgument);
}

TEST_CASE("gaussian noise is reproducible from the seed") {
  const auto model = own_treatment_model(5);
  const TreatmentVector w{1, 0, 1, 0, 1};
  auto draw = [&](std::uint64_t seed) {
    spillover::Rng rng = spillover::stream_rng(seed, 0);
    return spillover::evaluate_outcomes(model, w, NoiseSpec::gaussian(1.0), rng);
  };
  const auto a = draw(42);
  CHECK(a == draw(42));
  CHECK(a != draw(43));
  bool moved = false;
  for (std::size_t i = 0; i < 5; ++i) moved = moved || a[i] != double(w[i]);
  CHECK(moved);
}

TEST_CASE("locality check passes for honest models") {
  const auto lim = spillover::make_linear_in_means(
      {InterferenceGraph::circulant(8, 2), 1.0, 0.5, 0.3});
  CHECK(spillover::check_locality(lim, 500, 3).passed);

  // Saturated model: zero coefficients drop out of the dependency set.
  spillover::SaturatedLinearSpec spec;
  spec.alpha = {0.0, 1.0, 2.0, 3.0};
  spec.beta = {1.0, 1.0, 1.0, 1.0};
  spec.nu = {{0, 0.5, 0, 0}, {0, 0, 0, 0}, {0.2, 0, 0, 0.1}, {0, 0, 0, 0}};
  const auto sat = spillover::make_saturated_linear(spec);
  CHECK(sat.dependencies().edge_count() == 3);
  const auto report = spillover::check_locality(sat, 1000, 9);
  CHECK(report.passed);
  CHECK(report.probes > 0);
}

TEST_CASE("locality check finds a hidden dependency") {
  // Unit 1 claims no dependencies but reads unit 2.
  const auto liar = OutcomeModel::general(
      "liar", InterferenceGraph(3),
      [](std::size_t i, const TreatmentVector& w) {
        return i == 0 ? double(w[1]) : 0.0;
      });
  const auto report = spillover::check_locality(liar, 2000, 5);
  REQUIRE_FALSE(report.passed);
  REQUIRE(report.violation.has_value());
  CHECK(report.violation->kind == spillover::LocalityViolation::Kind::kDependency);
  CHECK(report.violation->unit == 0);
  CHECK(report.violation->other == 1);
  CHECK(report.violation->assignment.size() == 3);
  CHECK_FALSE(report.describe().empty());
}

TEST_CASE("locality check against a smaller claimed graph") {
  const auto lim = spillover::make_linear_in_means(
      {InterferenceGraph::circulant(6, 1), 0.0, 1.0, 1.0});
  CHECK(spillover::check_locality_against(lim, InterferenceGraph::complete(6),
                                          500, 1)
            .passed);
  CHECK_FALSE(
      spillover::check_locality_against(lim, InterferenceGraph(6), 500, 1).passed);
}

TEST_CASE("anonymous shortcut agrees with a general wrapper") {
  const auto g = InterferenceGraph::circulant(9, 2);
  const auto anon = spillover::make_fig1_setting({2, g});
  const auto general = OutcomeModel::general(
      "wrapped", g, [&anon](std::size_t i, const TreatmentVector& w) {
        return anon.outcome(i, w);
      });
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> bits(9);
    for (auto& b : bits) b = rng() & 1u;
    const auto w = oracle::tv(bits);
    for (std::size_t i = 0; i < 9; ++i) {
      std::size_t treated = 0;
      for (auto j : g.neighbors(i)) treated += w[j];
      CHECK(anon.outcome(i, w) == general.outcome(i, w));
      CHECK(anon.outcome(i, w) == anon.response(i, w[i], treated));
    }
  }
}
