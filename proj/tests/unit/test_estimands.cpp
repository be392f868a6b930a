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
#include "spillover/estimands.hpp"
#include "spillover/model_zoo.hpp"
#include "test_util.hpp"

using doctest::Approx;
using spillover::BernoulliDesign;
using spillover::Design;
using spillover::ErrorCode;
using spillover::InterferenceGraph;
using spillover::Method;
using spillover::MethodChoice;
using spillover::OutcomeModel;
using spillover::ProbabilityVector;
using spillover::TreatmentVector;
using spillover::TwoStageClusteredDesign;

namespace {

Design bernoulli(const std::vector<double>& pi) {
  return BernoulliDesign{ProbabilityVector(pi)};
}

Design bernoulli(std::size_t n, double p) {
  return BernoulliDesign{ProbabilityVector::constant(n, p)};
}

OutcomeModel constant_model(std::size_t n, double c) {
  return OutcomeModel::general("constant", InterferenceGraph(n),
                               [c](std::size_t, const TreatmentVector&) { return c; });
}

OutcomeModel own_model(std::size_t n) {
  return OutcomeModel::general(
      "own", InterferenceGraph(n),
      [](std::size_t i, const TreatmentVector& w) { return double(w[i]); });
}

// Generic wrapper that hides the anonymous structure from the engine.
OutcomeModel as_general(const OutcomeModel& m) {
  return OutcomeModel::general(
      "wrapped", m.dependencies(),
      [m](std::size_t i, const TreatmentVector& w) { return m.outcome(i, w); });
}

}  // namespace

TEST_CASE("exact estimands match the definitional oracle on random models") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t n = 4 + seed % 4;
    const auto model = oracle::random_general_model(n, 0.4, seed);
    const auto pi = oracle::random_pi(n, seed + 100);
    const auto support = oracle::bernoulli_support(pi);
    const auto r = spillover::estimands_exact(model, bernoulli(pi));
    CHECK(r.method == Method::kExact);
    CHECK(r.ade == Approx(oracle::ade(model, support)).epsilon(1e-12));
    CHECK(r.aie == Approx(oracle::aie(model, support)).epsilon(1e-12));
    CHECK(r.aoe == r.ade + r.aie);
    CHECK(r.inf == Approx(oracle::inf(model, pi)).epsilon(1e-10));
    CHECK(spillover::ade_exact(model, bernoulli(pi)) == Approx(r.ade).epsilon(1e-14));
    CHECK(spillover::aie_exact(model, bernoulli(pi)) == Approx(r.aie).epsilon(1e-14));
    CHECK(spillover::mean_outcome_exact(model, bernoulli(pi)) ==
          Approx(oracle::mean_outcome(model, support)).epsilon(1e-12));
  }
}

TEST_CASE("exact estimands under the two-stage design") {
  const auto model = oracle::random_general_model(6, 0.5, 77);
  const Design d = TwoStageClusteredDesign(6, 2, 2.0 / 3.0);
  const auto support = oracle::two_stage_support(6, 2, 2.0 / 3.0);
  const auto r = spillover::estimands_exact(model, d);
  CHECK(r.ade == Approx(oracle::ade(model, support)).epsilon(1e-12));
  CHECK(r.aie == Approx(oracle::aie(model, support)).epsilon(1e-12));
  CHECK(std::isnan(r.inf));

  const auto lim = spillover::make_linear_in_means(
      {InterferenceGraph::circulant(4, 1), 1.0, 0.7, 0.3});
  CHECK(spillover::ade_exact(lim, TwoStageClusteredDesign(4, 2, 0.5)) == Approx(0.7));
}

TEST_CASE("named estimand examples") {
  CHECK(spillover::ade_exact(own_model(3), TwoStageClusteredDesign(3, 3, 1.0)) == 1.0);
  CHECK(spillover::aie_exact(own_model(3), bernoulli({0.2, 0.5, 0.6})) == 0.0);

  spillover::SaturatedLinearSpec pair;
  pair.alpha = {0.0, 0.0};
  pair.beta = {0.0, 0.0};
  pair.nu = {{0.0, 0.5}, {0.5, 0.0}};
  CHECK(spillover::aie_exact(spillover::make_saturated_linear(pair),
                             bernoulli({0.1, 0.9})) == Approx(0.5));

  const auto div = spillover::make_diverging_anonymous({0.5}, 4);
  const auto r = spillover::estimands_exact(div, bernoulli(4, 0.5));
  CHECK(r.ade == Approx(1.0));
  CHECK(r.aie == Approx(3.0));
  CHECK(r.inf == Approx(4.0));

  const auto lim = spillover::make_linear_in_means(
      {InterferenceGraph::circulant(6, 1), 1.0, 0.7, 0.3});
  CHECK(spillover::inf_analytic(lim, BernoulliDesign{ProbabilityVector(
                                         oracle::random_pi(6, 2))}) == Approx(1.0));
}

TEST_CASE("worker count does not change exact results") {
  const auto model = oracle::random_general_model(12, 0.3, 5);
  const auto d = bernoulli(oracle::random_pi(12, 6));
  const auto a = spillover::estimands_exact(model, d, {1});
  const auto b = spillover::estimands_exact(model, d, {4});
  CHECK(a.ade == b.ade);
  CHECK(a.aie == b.aie);
  CHECK(a.inf == b.inf);
}

TEST_CASE("anonymous shortcut agrees with generic enumeration") {
  for (int setting = 1; setting <= 3; ++setting) {
    const auto model =
        spillover::make_fig1_setting({setting, InterferenceGraph::circulant(7, 2)});
    const auto d = bernoulli(oracle::random_pi(7, setting));
    const auto fast = spillover::estimands_exact(model, d);
    const auto slow = spillover::estimands_exact(as_general(model), d);
    CHECK(fast.ade == Approx(slow.ade).epsilon(1e-13));
    CHECK(fast.aie == Approx(slow.aie).epsilon(1e-13));
  }
}

TEST_CASE("binomial fast path agrees with enumeration") {
  const auto g = InterferenceGraph::circulant(6, 2);
  for (int setting = 1; setting <= 3; ++setting) {
    const auto model = spillover::make_fig1_setting({setting, g});
    for (double p : {0.2, 0.5, 0.8}) {
      const auto fast = spillover::estimands_anonymous_binomial(model, p);
      const auto exact = spillover::estimands_exact(model, bernoulli(6, p));
      CHECK(fast.method == Method::kAnonymousBinomial);
      CHECK(fast.ade == Approx(exact.ade).epsilon(1e-12));
      CHECK(fast.aie == Approx(exact.aie).epsilon(1e-12));
      CHECK(fast.inf == Approx(exact.inf).epsilon(1e-12));
      CHECK(spillover::mean_outcome_anonymous_binomial(model, p) ==
            Approx(spillover::mean_outcome_exact(model, bernoulli(6, p))).epsilon(1e-12));
    }
  }
  // Pairs graph, d = 1.
  const auto pairs = spillover::make_fig1_setting({3, InterferenceGraph::circulant(6, 1)});
  const auto support = oracle::bernoulli_support(std::vector<double>(6, 0.5));
  const auto r = spillover::estimands_anonymous_binomial(pairs, 0.5);
  CHECK(r.ade == Approx(oracle::ade(pairs, support)).epsilon(1e-12));
  CHECK(r.aie == Approx(oracle::aie(pairs, support)).epsilon(1e-12));
}

TEST_CASE("setting 2 direct effect is a five-term binomial sum") {
  const auto model =
      spillover::make_fig1_setting({2, InterferenceGraph::circulant(6, 2)});
  const double pmf[] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  double expected = 0.0;
  for (int b = 0; b <= 4; ++b) {
    const double gap = 1.0 - b / 4.0;
    expected += pmf[b] * gap * gap / 2.0;
  }
  CHECK(spillover::estimands_anonymous_binomial(model, 0.5).ade ==
        Approx(expected).epsilon(1e-14));
  CHECK(spillover::ade_exact(model, bernoulli(6, 0.5)) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("binomial pmf") {
  const auto pmf = spillover::binomial_pmf(4, 0.5);
  REQUIRE(pmf.size() == 5);
  CHECK(pmf[2] == Approx(0.375));
  const auto big = spillover::binomial_pmf(2000, 0.3);
  double total = 0.0;
  for (double x : big) total += x;
  CHECK(total == Approx(1.0).epsilon(1e-12));
  CHECK(big[600] == Approx(0.01946).epsilon(1e-3));
}

TEST_CASE("binomial path availability") {
  const auto g = InterferenceGraph::circulant(6, 1);
  const auto anon = spillover::make_fig1_setting({2, g});
  CHECK(spillover::binomial_path_unavailable(anon, bernoulli(6, 0.4)).empty());
  CHECK_FALSE(spillover::binomial_path_unavailable(as_general(anon), bernoulli(6, 0.4)).empty());
  CHECK_FALSE(spillover::binomial_path_unavailable(anon, bernoulli(oracle::random_pi(6, 1))).empty());
  CHECK_FALSE(spillover::binomial_path_unavailable(
                  anon, TwoStageClusteredDesign(6, 2, 1.0 / 3.0))
                  .empty());
  const std::vector<std::pair<std::uint32_t, std::uint32_t>> edges{
      {0, 1}, {0, 2}, {1, 0}, {2, 0}};
  const auto irregular = spillover::make_peer_count(3);
  CHECK(spillover::binomial_path_unavailable(irregular, bernoulli(3, 0.4)).empty());
  spillover::AnonymousTable table(3, {std::vector<double>{0, 1}, std::vector<double>{1, 2}});
  table[0] = {std::vector<double>{0, 1, 2}, std::vector<double>{1, 2, 3}};
  const auto ragged = spillover::make_anonymous_table(
      InterferenceGraph::from_edges(3, edges), table);
  CHECK_FALSE(spillover::binomial_path_unavailable(ragged, bernoulli(3, 0.4)).empty());
}

TEST_CASE("Monte Carlo estimands cover the exact values") {
  const auto model = spillover::make_fig1_setting({2, InterferenceGraph::circulant(8, 2)});
  const auto d = bernoulli(8, 0.5);
  const auto exact = spillover::estimands_anonymous_binomial(model, 0.5);
  const auto mc = spillover::estimands_monte_carlo(model, d, 10000, 12);
  CHECK(mc.method == Method::kMonteCarlo);
  CHECK(mc.replications == 10000);
  CHECK(std::abs(mc.ade - exact.ade) <= 4.0 * mc.se_ade);
  CHECK(std::abs(mc.aie - exact.aie) <= 4.0 * mc.se_aie);
  CHECK(mc.inf == mc.aoe);

  const auto lim = spillover::make_linear_in_means(
      {InterferenceGraph::circulant(10, 2), 1.0, 0.7, 0.3});
  const auto mc2 = spillover::estimands_monte_carlo(lim, bernoulli(10, 0.4), 10000, 3);
  CHECK(std::abs(mc2.aie - 0.3) <= 4.0 * mc2.se_aie + 1e-12);

  // Contrasts that do not depend on W give an exact estimate and zero SE.
  spillover::SaturatedLinearSpec spec;
  spec.alpha = {0.0, 1.0, 2.0};
  spec.beta = {1.0, 2.0, 3.0};
  spec.nu = {{0, 1, 0}, {0, 0, 2}, {0.5, 0, 0}};
  const auto sat = spillover::make_saturated_linear(spec);
  const auto mc3 = spillover::estimands_monte_carlo(sat, bernoulli(3, 0.5), 2, 1);
  CHECK(mc3.ade == Approx(2.0));
  CHECK(mc3.aie == Approx(3.5 / 3.0));
  CHECK(mc3.se_ade == 0.0);
  CHECK(mc3.se_aie == 0.0);
  CHECK_ERROR_CODE(spillover::estimands_monte_carlo(sat, bernoulli(3, 0.5), 1, 1),
                   ErrorCode::kInvalidArgument);
}

TEST_CASE("Monte Carlo output does not depend on the worker count") {
  const auto model = oracle::random_general_model(9, 0.4, 8);
  const auto d = bernoulli(oracle::random_pi(9, 8));
  const auto a = spillover::estimands_monte_carlo(model, d, 3000, 5, {1});
  const auto b = spillover::estimands_monte_carlo(model, d, 3000, 5, {4});
  CHECK(a.ade == b.ade);
  CHECK(a.aie == b.aie);
  CHECK(a.se_aie == b.se_aie);
}

TEST_CASE("finite difference derivative") {
  spillover::SaturatedLinearSpec spec;
  spec.alpha = {0.3, 0.1, 0.0, 1.0};
  spec.beta = {1.0, 2.0, -1.0, 0.5};
  spec.nu = {{0, 0.4, 0, 0.2}, {0, 0, 0, 0}, {0.1, 0.3, 0, 0}, {0, 0, -0.6, 0}};
  const auto sat = spillover::make_saturated_linear(spec);
  const double expected = (2.5 + 0.4) / 4.0;
  for (double h : {1e-4, 1e-2, 0.05}) {
    spillover::FiniteDifferenceOptions o;
    o.step = h;
    CHECK(spillover::inf_finite_difference(sat, ProbabilityVector(oracle::random_pi(4, 9)), o)
              .value == Approx(expected).epsilon(1e-10));
  }
  CHECK(spillover::inf_finite_difference(constant_model(3, 2.5),
                                         ProbabilityVector::constant(3, 0.5))
            .value == Approx(0.0));

  const auto s2 = spillover::make_fig1_setting({2, InterferenceGraph::circulant(6, 2)});
  const auto fd = spillover::inf_finite_difference(s2, ProbabilityVector::constant(6, 0.5));
  CHECK(std::abs(fd.value - spillover::estimands_exact(s2, bernoulli(6, 0.5)).aoe) <= 1e-6);

  spillover::FiniteDifferenceOptions too_big;
  too_big.step = 0.2;
  CHECK_ERROR_CODE(spillover::inf_finite_difference(
                       s2, ProbabilityVector::constant(6, 0.85), too_big),
                   ErrorCode::kOutOfRange);
}

TEST_CASE("Monte Carlo finite difference with common random numbers") {
  const auto s2 = spillover::make_fig1_setting({2, InterferenceGraph::circulant(8, 2)});
  const double target = spillover::estimands_anonymous_binomial(s2, 0.5).inf;
  spillover::FiniteDifferenceOptions o;
  o.mode = spillover::DifferenceMode::kMonteCarlo;
  o.step = 0.05;
  o.replications = 20000;
  o.seed = 4;
  const auto r = spillover::inf_finite_difference(s2, ProbabilityVector::constant(8, 0.5), o);
  CHECK(r.standard_error > 0.0);
  // Step bias is O(h^2); allow it on top of sampling noise.
  CHECK(std::abs(r.value - target) <= 4.0 * r.standard_error + 0.01);
}

TEST_CASE("AOE equals the policy derivative under Bernoulli designs") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const auto model = oracle::random_general_model(6, 0.5, seed);
    const auto pi = oracle::random_pi(6, seed);
    const auto r = spillover::estimands_exact(model, bernoulli(pi));
    CHECK(r.aoe == Approx(oracle::inf(model, pi)).epsilon(1e-10));
    CHECK(spillover::inf_analytic(model, BernoulliDesign{ProbabilityVector(pi)}) ==
          Approx(r.aoe).epsilon(1e-12));
  }
}

TEST_CASE("HH direct effect equals ADE under Bernoulli designs") {
  for (std::uint64_t seed = 30; seed < 34; ++seed) {
    const auto model = oracle::random_general_model(6, 0.5, seed);
    const auto d = bernoulli(oracle::random_pi(6, seed));
    CHECK(spillover::hh_de(model, d) ==
          Approx(spillover::ade_exact(model, d)).epsilon(1e-12));
  }
  CHECK(spillover::hh_de(constant_model(4, 7.0), bernoulli(4, 0.3)) == 0.0);
}

TEST_CASE("HH direct effect differs from ADE under two-stage designs") {
  const auto peer = spillover::make_peer_count(4);
  const Design d = TwoStageClusteredDesign(4, 2, 0.5);
  CHECK(spillover::ade_exact(peer, d) == 0.0);
  // Given W_i = 0 exactly one of the other three units is treated.
  const double hh = spillover::hh_de(peer, d);
  CHECK(hh == Approx(-1.0));
  CHECK(hh == Approx(oracle::hh_de(peer, oracle::two_stage_support(4, 2, 0.5))));
  CHECK_ERROR_CODE(spillover::hh_de(peer, TwoStageClusteredDesign(4, 2, 0.0)),
                   ErrorCode::kPrecondition);
}

TEST_CASE("indirect effect between two Bernoulli laws") {
  const auto lim = spillover::make_linear_in_means(
      {InterferenceGraph::circulant(6, 1), 1.0, 0.7, 0.3});
  const auto p = ProbabilityVector::constant(6, 0.3);
  const auto q = ProbabilityVector::constant(6, 0.6);
  CHECK(spillover::ie_two_bernoulli(lim, p, q) == Approx(0.3 * 0.3));
  CHECK(spillover::ie_two_bernoulli(lim, p, p) == 0.0);
  CHECK(spillover::ie_two_bernoulli(own_model(3), ProbabilityVector::constant(3, 0.1),
                                    ProbabilityVector::constant(3, 0.9)) == 0.0);
  const auto model = oracle::random_general_model(5, 0.5, 41);
  const auto a = oracle::random_pi(5, 1);
  const auto b = oracle::random_pi(5, 2);
  CHECK(spillover::ie_two_bernoulli(model, ProbabilityVector(a), ProbabilityVector(b)) ==
        Approx(oracle::ie(model, a, b)).epsilon(1e-12));
  CHECK_ERROR_CODE(spillover::ie_two_bernoulli(model, ProbabilityVector(a),
                                               ProbabilityVector::constant(4, 0.5)),
                   ErrorCode::kInvalidArgument);
}

TEST_CASE("method dispatch") {
  const auto s2 = spillover::make_fig1_setting({2, InterferenceGraph::circulant(30, 2)});
  const auto big = bernoulli(30, 0.5);
  CHECK(spillover::compute_estimands(s2, big, MethodChoice::kAuto, 100, 1).method ==
        Method::kAnonymousBinomial);
  CHECK_ERROR_CODE(spillover::compute_estimands(s2, big, MethodChoice::kExact, 100, 1),
                   ErrorCode::kInfeasible);
  const auto general = as_general(s2);
  const auto r = spillover::compute_estimands(general, big, MethodChoice::kAuto, 200, 1);
  CHECK(r.method == Method::kMonteCarlo);
  CHECK(r.replications == 200);
  CHECK_ERROR_CODE(spillover::compute_estimands(general, big,
                                                MethodChoice::kAnonymousBinomial, 100, 1),
                   ErrorCode::kInfeasible);
  const auto small = spillover::make_peer_count(5);
  CHECK(spillover::compute_estimands(small, bernoulli(5, 0.5), MethodChoice::kAuto, 10, 1)
            .method == Method::kExact);
  CHECK(spillover::to_string(Method::kMonteCarlo) == "monte_carlo");
}
