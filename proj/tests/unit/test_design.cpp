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

#include <map>

#include "doctest.h"
#include "oracle.hpp"
#include "spillover/design.hpp"
#include "test_util.hpp"

using doctest::Approx;
using spillover::BernoulliDesign;
using spillover::Design;
using spillover::ErrorCode;
using spillover::ProbabilityVector;
using spillover::TreatmentVector;
using spillover::TwoStageClusteredDesign;

namespace {

Design bernoulli(std::vector<double> pi) {
  return BernoulliDesign{ProbabilityVector(std::move(pi))};
}

std::map<std::string, double> as_map(const spillover::DesignSupport& s) {
  std::map<std::string, double> out;
  for (const auto& pt : s) out[pt.w.to_string()] += pt.probability;
  return out;
}

std::map<std::string, double> as_map(const std::vector<oracle::Point>& s) {
  std::map<std::string, double> out;
  for (const auto& pt : s) out[oracle::tv(pt.w).to_string()] += pt.p;
  return out;
}

// Pearson statistic of sampled frequencies against the oracle support.
double chi_square(const Design& design, const std::vector<oracle::Point>& law,
                  std::size_t draws, std::uint64_t seed) {
  std::map<std::string, double> counts;
  spillover::Rng rng = spillover::stream_rng(seed, 0);
  for (std::size_t r = 0; r < draws; ++r) {
    counts[spillover::sample_assignment(design, rng).to_string()] += 1.0;
  }
  double stat = 0.0;
  std::size_t seen = 0;
  for (const auto& [key, p] : as_map(law)) {
    const double expected = p * static_cast<double>(draws);
    const double observed = counts.count(key) ? counts[key] : 0.0;
    seen += counts.count(key);
    stat += (observed - expected) * (observed - expected) / expected;
  }
  CHECK(seen == counts.size());  // no draws outside the support
  return stat;
}

}  // namespace

TEST_CASE("Bernoulli support is the product law") {
  const auto s = spillover::enumerate_support(bernoulli({0.5, 0.5}));
  REQUIRE(s.size() == 4);
  for (const auto& pt : s) CHECK(pt.probability == Approx(0.25));

  const auto m = as_map(spillover::enumerate_support(bernoulli({0.1, 0.2, 0.3})));
  CHECK(m.at("111") == Approx(0.006));
  CHECK(m.at("000") == Approx(0.9 * 0.8 * 0.7));
}

TEST_CASE("two-stage support for n=4, m=2, rho=1/2") {
  const Design d = TwoStageClusteredDesign(4, 2, 0.5);
  const auto m = as_map(spillover::enumerate_support(d));
  REQUIRE(m.size() == 4);
  for (const char* key : {"1000", "0100", "0010", "0001"}) {
    CHECK(m.at(key) == Approx(0.25));
  }
}

TEST_CASE("enumerated supports agree with the independent oracle") {
  const std::vector<double> pi = oracle::random_pi(7, 5);
  const auto lib = as_map(spillover::enumerate_support(bernoulli(pi)));
  const auto ref = as_map(oracle::bernoulli_support(pi));
  REQUIRE(lib.size() == ref.size());
  for (const auto& [k, p] : ref) CHECK(lib.at(k) == Approx(p).epsilon(1e-14));

  for (auto [n, m, rho] : {std::tuple{6, 2, 2.0 / 3.0}, std::tuple{9, 3, 1.0 / 3.0},
                           std::tuple{8, 4, 1.0}, std::tuple{6, 3, 0.0}}) {
    const Design d = TwoStageClusteredDesign(n, m, rho);
    const auto a = as_map(spillover::enumerate_support(d));
    const auto b = as_map(oracle::two_stage_support(n, m, rho));
    REQUIRE(a.size() == b.size());
    double total = 0.0;
    for (const auto& [k, p] : b) {
      CHECK(a.at(k) == Approx(p).epsilon(1e-14));
      total += a.at(k);
    }
    CHECK(total == Approx(1.0));
  }
}

TEST_CASE("two-stage construction checks") {
  CHECK_ERROR_CODE(TwoStageClusteredDesign(5, 2, 0.5), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(TwoStageClusteredDesign(6, 2, 0.5), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(TwoStageClusteredDesign(4, 2, 1.5), ErrorCode::kOutOfRange);
  CHECK_ERROR_CODE(TwoStageClusteredDesign(4, 2, 0.5, {0, 0, 0, 1}),
                   ErrorCode::kInvalidArgument);
  const TwoStageClusteredDesign labelled(4, 2, 0.5, {9, 4, 4, 9});
  CHECK(labelled.cluster_count() == 2);
  CHECK(labelled.cluster_of(0) == labelled.cluster_of(3));
  CHECK(labelled.cluster_of(1) != labelled.cluster_of(0));
}

TEST_CASE("two-stage draws treat one unit per treated cluster") {
  const Design d = TwoStageClusteredDesign(4, 2, 0.5);
  spillover::Rng rng = spillover::stream_rng(8, 0);
  for (int r = 0; r < 1000; ++r) {
    CHECK(spillover::sample_assignment(d, rng).count_treated() == 1);
  }
}

TEST_CASE("Bernoulli treated fraction concentrates") {
  const Design d = BernoulliDesign{ProbabilityVector::constant(20, 0.5)};
  spillover::Rng rng = spillover::stream_rng(21, 0);
  double treated = 0.0;
  for (int r = 0; r < 10000; ++r) {
    treated += static_cast<double>(spillover::sample_assignment(d, rng).count_treated());
  }
  CHECK(treated / (20.0 * 10000.0) == Approx(0.5).epsilon(0.02));
}

TEST_CASE("sampling frequencies pass a chi-square test") {
  // Critical values at the 0.1% level: 24.32 for 7 and 31.26 for 11
  // degrees of freedom.
  const std::vector<double> pi{0.2, 0.5, 0.7};
  CHECK(chi_square(bernoulli(pi), oracle::bernoulli_support(pi), 20000, 3) < 24.32);
  CHECK(chi_square(TwoStageClusteredDesign(6, 2, 2.0 / 3.0),
                   oracle::two_stage_support(6, 2, 2.0 / 3.0), 24000, 4) < 31.26);
}

TEST_CASE("sampling is reproducible per stream") {
  const Design d = TwoStageClusteredDesign(12, 3, 0.5);
  auto draw = [&](std::uint64_t stream) {
    spillover::Rng rng = spillover::stream_rng(99, stream);
    return spillover::sample_assignment(d, rng);
  };
  CHECK(draw(3) == draw(3));
  bool differs = false;
  for (std::uint64_t s = 4; s < 20; ++s) differs = differs || !(draw(s) == draw(3));
  CHECK(differs);
}

TEST_CASE("threshold assignment") {
  const std::vector<double> u{0.1, 0.5, 0.9};
  CHECK(spillover::threshold_assignment(u, ProbabilityVector({0.2, 0.5, 0.95})) ==
        TreatmentVector{1, 0, 1});
  CHECK_ERROR_CODE(spillover::threshold_assignment(u, ProbabilityVector({0.2})),
                   ErrorCode::kInvalidArgument);
}

TEST_CASE("marginal treatment probabilities") {
  CHECK(spillover::marginal_treatment_probability(bernoulli({0.3, 0.7}), 1) == 0.7);
  CHECK(spillover::marginal_treatment_probability(
            TwoStageClusteredDesign(8, 4, 0.5), 0) == Approx(0.125));
  CHECK(spillover::marginal_treatment_probability(
            TwoStageClusteredDesign(4, 2, 1.0), 3) == Approx(0.5));
  CHECK_ERROR_CODE(spillover::marginal_treatment_probability(bernoulli({0.3}), 1),
                   ErrorCode::kOutOfRange);
  // Cross-check against the enumerated support.
  const Design d = TwoStageClusteredDesign(8, 4, 0.5);
  double p = 0.0;
  for (const auto& pt : spillover::enumerate_support(d)) {
    if (pt.w[5]) p += pt.probability;
  }
  CHECK(p == Approx(0.125));
}

TEST_CASE("law of a unit's cluster mates") {
  {
    const auto law = spillover::neighbor_marginal_law(
        TwoStageClusteredDesign(4, 2, 0.5), 0);
    REQUIRE(law.mates == std::vector<std::uint32_t>{1});
    std::map<std::string, double> m;
    for (const auto& [w, p] : law.outcomes) m[w.to_string()] = p;
    CHECK(m.at("0") == Approx(0.75));
    CHECK(m.at("1") == Approx(0.25));
  }
  {
    const auto law = spillover::neighbor_marginal_law(
        TwoStageClusteredDesign(4, 2, 0.0), 2);
    REQUIRE(law.outcomes.size() == 1);
    CHECK(law.outcomes[0].first.to_string() == "0");
    CHECK(law.outcomes[0].second == 1.0);
  }
  {
    const auto law = spillover::neighbor_marginal_law(
        TwoStageClusteredDesign(6, 3, 1.0), 4);
    REQUIRE(law.outcomes.size() == 3);
    std::map<std::string, double> m;
    for (const auto& [w, p] : law.outcomes) m[w.to_string()] = p;
    CHECK(m.at("00") == Approx(1.0 / 3.0));
    CHECK(m.at("10") == Approx(1.0 / 3.0));
    CHECK(m.at("01") == Approx(1.0 / 3.0));
  }
}

TEST_CASE("enumeration limits") {
  CHECK(spillover::support_enumerable(BernoulliDesign{ProbabilityVector::constant(20, 0.5)}));
  CHECK_FALSE(
      spillover::support_enumerable(BernoulliDesign{ProbabilityVector::constant(21, 0.5)}));
  CHECK_ERROR_CODE(spillover::enumerate_support(
                       BernoulliDesign{ProbabilityVector::constant(30, 0.5)}),
                   ErrorCode::kInfeasible);
  CHECK(spillover::describe(TwoStageClusteredDesign(4, 2, 0.5)) ==
        "two_stage:m=2:rho=0.5");
}
