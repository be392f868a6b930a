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

// Exercises the library only through its C interface.

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "spillover/spillover.h"

namespace {

double own_outcome(void*, size_t unit, const uint8_t* w, size_t) {
  return w[unit - 1];
}

double count_response(void* scale, size_t, int own, size_t treated) {
  return *static_cast<double*>(scale) * static_cast<double>(treated) + own;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(sp_version()) > 0);
  CHECK(std::string(sp_status_name(SP_ERR_INFEASIBLE)) == "infeasible");
}

TEST_CASE("graphs use 1-based unit numbers") {
  const uint32_t edges[] = {1, 2, 2, 3};
  sp_graph* g = nullptr;
  REQUIRE(sp_graph_create_from_edges(3, edges, 2, &g) == SP_OK);
  CHECK(sp_graph_size(g) == 3);
  CHECK(sp_graph_edge_count(g) == 2);
  int has = -1;
  REQUIRE(sp_graph_has_edge(g, 1, 2, &has) == SP_OK);
  CHECK(has == 1);
  REQUIRE(sp_graph_has_edge(g, 2, 1, &has) == SP_OK);
  CHECK(has == 0);
  size_t degree = 0;
  CHECK(sp_graph_degree(g, 0, &degree) == SP_ERR_OUT_OF_RANGE);
  CHECK(std::string(sp_last_error_message()).find("unit 0") != std::string::npos);
  REQUIRE(sp_graph_degree(g, 2, &degree) == SP_OK);
  CHECK(degree == 1);

  const uint32_t bad[] = {1, 4};
  sp_graph* g2 = nullptr;
  CHECK(sp_graph_create_from_edges(3, bad, 1, &g2) == SP_ERR_OUT_OF_RANGE);
  CHECK(g2 == nullptr);

  sp_graph* k = nullptr;
  REQUIRE(sp_graph_create_complete(3, &k) == SP_OK);
  int contains = 0;
  REQUIRE(sp_graph_contains(k, g, &contains) == SP_OK);
  CHECK(contains == 1);
  sp_graph_free(k);
  sp_graph_free(g);
  CHECK(sp_graph_load("/nonexistent", &g2) == SP_ERR_IO);
}

TEST_CASE("zoo models and estimands") {
  sp_graph* ring = nullptr;
  REQUIRE(sp_graph_create_circulant(6, 1, &ring) == SP_OK);
  sp_model* lim = nullptr;
  REQUIRE(sp_model_linear_in_means(ring, 1.0, 0.7, 0.3, &lim) == SP_OK);
  CHECK(std::string(sp_model_name(lim)) == "linear_in_means");
  int available = 0;
  double ade = 0, aie = 0;
  REQUIRE(sp_model_closed_form(lim, &available, &ade, &aie) == SP_OK);
  CHECK(available == 1);
  CHECK(aie == 0.3);

  sp_design* d = nullptr;
  REQUIRE(sp_design_bernoulli_constant(6, 0.4, &d) == SP_OK);
  CHECK(std::string(sp_design_describe(d)) == "bernoulli:pi=0.40000000000000002");
  sp_estimands est{};
  REQUIRE(sp_estimands_compute(lim, d, SP_METHOD_EXACT, 0, 1, 2, &est) == SP_OK);
  CHECK(est.method == SP_METHOD_EXACT);
  CHECK(est.ade == doctest::Approx(0.7));
  CHECK(est.aie == doctest::Approx(0.3));
  CHECK(est.inf == doctest::Approx(1.0));

  double hh = 0;
  REQUIRE(sp_hh_de(lim, d, 1, &hh) == SP_OK);
  CHECK(hh == doctest::Approx(0.7));

  const std::vector<double> p(6, 0.3), q(6, 0.6);
  double ie = 0;
  REQUIRE(sp_ie(lim, p.data(), q.data(), 6, 1, &ie) == SP_OK);
  CHECK(ie == doctest::Approx(0.09));
  CHECK(sp_ie(lim, p.data(), q.data(), 5, 1, &ie) == SP_ERR_INVALID_ARGUMENT);

  double fd = 0, se = -1;
  REQUIRE(sp_inf_finite_difference(lim, p.data(), 6, 1e-4, 0, 0, 0, 1, &fd, &se) == SP_OK);
  CHECK(fd == doctest::Approx(1.0));
  double analytic = 0;
  REQUIRE(sp_inf_analytic(lim, p.data(), 6, 1, &analytic) == SP_OK);
  CHECK(analytic == doctest::Approx(1.0));

  double v = 0;
  REQUIRE(sp_mean_outcome(lim, d, &v) == SP_OK);
  CHECK(v == doctest::Approx(1.0 + 0.7 * 0.4 + 0.3 * 0.4));

  sp_design* two = nullptr;
  REQUIRE(sp_design_two_stage(6, 2, 2.0 / 3.0, nullptr, &two) == SP_OK);
  CHECK(sp_estimands_compute(lim, two, SP_METHOD_BINOMIAL, 0, 1, 1, &est) ==
        SP_ERR_INFEASIBLE);
  REQUIRE(sp_estimands_compute(lim, two, SP_METHOD_AUTO, 0, 1, 1, &est) == SP_OK);
  CHECK(std::isnan(est.inf));
  double marginal = 0;
  REQUIRE(sp_design_marginal(two, 3, &marginal) == SP_OK);
  CHECK(marginal == doctest::Approx(1.0 / 3.0));
  CHECK(sp_replicate(lim, two, nullptr, 0.0, 100, 1, 10, 1, nullptr) ==
        SP_ERR_INVALID_ARGUMENT);
  sp_replication rep{};
  CHECK(sp_replicate(lim, two, nullptr, 0.0, 100, 1, 10, 1, &rep) == SP_ERR_PRECONDITION);

  sp_design_free(two);
  sp_design_free(d);
  sp_model_free(lim);
  sp_graph_free(ring);
}

TEST_CASE("custom callbacks and locality") {
  sp_graph* empty = nullptr;
  REQUIRE(sp_graph_create_empty(3, &empty) == SP_OK);
  sp_model* own = nullptr;
  REQUIRE(sp_model_create_general("own", empty, own_outcome, nullptr, &own) == SP_OK);
  const uint8_t w[] = {1, 0, 1};
  double y[3] = {};
  REQUIRE(sp_model_evaluate(own, w, 3, 0.0, 0, y) == SP_OK);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.0);
  sp_locality_result loc{};
  REQUIRE(sp_check_locality(own, nullptr, 200, 1, &loc) == SP_OK);
  CHECK(loc.passed == 1);

  sp_graph* k = nullptr;
  REQUIRE(sp_graph_create_complete(3, &k) == SP_OK);
  double scale = 2.0;
  sp_model* count = nullptr;
  REQUIRE(sp_model_create_anonymous("count", k, count_response, &scale, &count) == SP_OK);
  REQUIRE(sp_model_evaluate(count, w, 3, 0.0, 0, y) == SP_OK);
  CHECK(y[1] == 4.0);
  REQUIRE(sp_check_locality(count, empty, 500, 1, &loc) == SP_OK);
  CHECK(loc.passed == 0);
  CHECK(loc.violation == SP_VIOLATION_DEPENDENCY);
  CHECK(loc.unit >= 1);
  CHECK(loc.unit <= 3);
  CHECK(loc.other != loc.unit);

  sp_model_free(count);
  sp_model_free(own);
  sp_graph_free(k);
  sp_graph_free(empty);
}

TEST_CASE("estimators through the C interface") {
  const uint8_t w[] = {1, 0};
  const double y[] = {2.0, 4.0};
  const double pi[] = {0.5, 0.5};
  double out = 0;
  REQUIRE(sp_ht_ade(w, y, pi, 2, &out) == SP_OK);
  CHECK(out == doctest::Approx(-2.0));
  sp_graph* k = nullptr;
  REQUIRE(sp_graph_create_complete(2, &k) == SP_OK);
  REQUIRE(sp_ht_aie(w, y, pi, 2, k, &out) == SP_OK);
  CHECK(out == doctest::Approx(2.0));
  const double bad_pi[] = {0.5, 1.0};
  CHECK(sp_ht_ade(w, y, bad_pi, 2, &out) == SP_ERR_OUT_OF_RANGE);
  sp_graph_free(k);
}

TEST_CASE("sampling through the C interface") {
  sp_design* d = nullptr;
  REQUIRE(sp_design_two_stage(4, 2, 0.5, nullptr, &d) == SP_OK);
  uint8_t a[4], b[4];
  REQUIRE(sp_design_sample(d, 5, 2, a, 4) == SP_OK);
  REQUIRE(sp_design_sample(d, 5, 2, b, 4) == SP_OK);
  CHECK(std::memcmp(a, b, 4) == 0);
  CHECK(a[0] + a[1] + a[2] + a[3] == 1);
  CHECK(sp_design_sample(d, 5, 2, a, 3) == SP_ERR_INVALID_ARGUMENT);
  sp_design_free(d);
  CHECK(sp_design_two_stage(5, 2, 0.5, nullptr, &d) == SP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("tasks by name") {
  sp_task t;
  REQUIRE(sp_task_from_name("fig1", &t) == SP_OK);
  CHECK(t == SP_TASK_FIG1);
  CHECK(sp_task_from_name("plot", &t) == SP_ERR_INVALID_ARGUMENT);
  CHECK(sp_validate_config("/nonexistent.json") == SP_ERR_CONFIG);
  CHECK(sp_run_task(SP_TASK_ESTIMANDS, nullptr) == SP_ERR_INVALID_ARGUMENT);
}
