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

#include "spillover/spillover.h"

#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "spillover/design.hpp"
#include "spillover/error.hpp"
#include "spillover/estimands.hpp"
#include "spillover/estimators.hpp"
#include "spillover/graph.hpp"
#include "spillover/model.hpp"
#include "spillover/model_zoo.hpp"
#include "spillover/runner.hpp"

struct sp_graph {
  spillover::InterferenceGraph graph;
};

struct sp_model {
  spillover::OutcomeModel model;
};

struct sp_design {
  spillover::Design design;
};

namespace {

using spillover::ErrorCode;

thread_local std::string g_last_error;
thread_local std::string g_last_summary;
thread_local std::string g_scratch;

sp_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return SP_ERR_INVALID_ARGUMENT;
    case ErrorCode::kOutOfRange:
      return SP_ERR_OUT_OF_RANGE;
    case ErrorCode::kInfeasible:
      return SP_ERR_INFEASIBLE;
    case ErrorCode::kPrecondition:
      return SP_ERR_PRECONDITION;
    case ErrorCode::kConfig:
      return SP_ERR_CONFIG;
    case ErrorCode::kIo:
      return SP_ERR_IO;
  }
  return SP_ERR_INTERNAL;
}

sp_status fail(sp_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body` with every C++ exception translated to a status code.
template <typename F>
sp_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SP_OK;
  } catch (const spillover::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SP_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) {
    spillover::Fail(ErrorCode::kInvalidArgument,
                    std::string(what) + " must not be NULL");
  }
}

// Converts a 1-based unit number to a 0-based index below n.
std::size_t unit_index(std::size_t unit, std::size_t n) {
  if (unit < 1 || unit > n) {
    spillover::Fail(ErrorCode::kOutOfRange,
                    "unit " + std::to_string(unit) + " outside 1.." +
                        std::to_string(n));
  }
  return unit - 1;
}

spillover::ExecPolicy policy(unsigned workers) {
  return spillover::ExecPolicy{workers == 0 ? 1u : workers};
}

std::vector<double> copy(const double* p, std::size_t n) {
  return std::vector<double>(p, p + n);
}

std::vector<std::uint32_t> labels(const std::uint32_t* p, std::size_t n) {
  return p ? std::vector<std::uint32_t>(p, p + n) : std::vector<std::uint32_t>{};
}

spillover::TreatmentVector treatment(const uint8_t* w, std::size_t n) {
  return spillover::TreatmentVector(std::span<const std::uint8_t>(w, n));
}

spillover::ProbabilityVector probabilities(const double* pi, std::size_t n) {
  return spillover::ProbabilityVector(copy(pi, n));
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    spillover::Fail(ErrorCode::kInvalidArgument,
                    std::string(what) + " has " + std::to_string(got) +
                        " units, expected " + std::to_string(want));
  }
}

spillover::MethodChoice method_choice(sp_method m) {
  switch (m) {
    case SP_METHOD_AUTO:
      return spillover::MethodChoice::kAuto;
    case SP_METHOD_EXACT:
      return spillover::MethodChoice::kExact;
    case SP_METHOD_BINOMIAL:
      return spillover::MethodChoice::kAnonymousBinomial;
    case SP_METHOD_MONTE_CARLO:
      return spillover::MethodChoice::kMonteCarlo;
  }
  spillover::Fail(ErrorCode::kInvalidArgument, "unknown method");
}

sp_method method_code(spillover::Method m) {
  switch (m) {
    case spillover::Method::kExact:
      return SP_METHOD_EXACT;
    case spillover::Method::kAnonymousBinomial:
      return SP_METHOD_BINOMIAL;
    case spillover::Method::kMonteCarlo:
      return SP_METHOD_MONTE_CARLO;
  }
  return SP_METHOD_AUTO;
}

template <typename T, typename... Args>
void emit(T** out, Args&&... args) {
  need(out, "out");
  *out = new T{std::forward<Args>(args)...};
}

}  // namespace

extern "C" {

const char* sp_version(void) { return SPILLOVER_VERSION; }

const char* sp_status_name(sp_status status) {
  switch (status) {
    case SP_OK:
      return "ok";
    case SP_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case SP_ERR_OUT_OF_RANGE:
      return "out_of_range";
    case SP_ERR_INFEASIBLE:
      return "infeasible";
    case SP_ERR_PRECONDITION:
      return "precondition";
    case SP_ERR_CONFIG:
      return "config";
    case SP_ERR_IO:
      return "io";
    case SP_ERR_VERIFICATION_FAILED:
      return "verification_failed";
    case SP_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* sp_last_error_message(void) { return g_last_error.c_str(); }

// ---- graphs ----------------------------------------------------------------

sp_status sp_graph_create_empty(size_t n, sp_graph** out) {
  return guarded([&] { emit(out, spillover::InterferenceGraph(n)); });
}

sp_status sp_graph_create_from_edges(size_t n, const uint32_t* edges,
                                     size_t count, sp_graph** out) {
  return guarded([&] {
    if (count > 0) need(edges, "edges");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(count);
    for (size_t k = 0; k < count; ++k) {
      pairs.emplace_back(
          static_cast<std::uint32_t>(unit_index(edges[2 * k], n)),
          static_cast<std::uint32_t>(unit_index(edges[2 * k + 1], n)));
    }
    emit(out, spillover::InterferenceGraph::from_edges(n, pairs));
  });
}

sp_status sp_graph_create_circulant(size_t n, size_t half_width,
                                    sp_graph** out) {
  return guarded([&] {
    emit(out, spillover::InterferenceGraph::circulant(n, half_width));
  });
}

sp_status sp_graph_create_complete(size_t n, sp_graph** out) {
  return guarded(
      [&] { emit(out, spillover::InterferenceGraph::complete(n)); });
}

sp_status sp_graph_load(const char* path, sp_graph** out) {
  return guarded([&] {
    need(path, "path");
    emit(out, spillover::load_edge_list(path));
  });
}

void sp_graph_free(sp_graph* graph) { delete graph; }

size_t sp_graph_size(const sp_graph* graph) {
  return graph ? graph->graph.size() : 0;
}

size_t sp_graph_edge_count(const sp_graph* graph) {
  return graph ? graph->graph.edge_count() : 0;
}

sp_status sp_graph_degree(const sp_graph* graph, size_t unit, size_t* out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    *out = graph->graph.degree(unit_index(unit, graph->graph.size()));
  });
}

sp_status sp_graph_has_edge(const sp_graph* graph, size_t unit,
                            size_t neighbor, int* out) {
  return guarded([&] {
    need(graph, "graph");
    need(out, "out");
    const std::size_t n = graph->graph.size();
    *out = graph->graph.has_edge(unit_index(unit, n), unit_index(neighbor, n))
               ? 1
               : 0;
  });
}

sp_status sp_graph_contains(const sp_graph* outer, const sp_graph* inner,
                            int* out) {
  return guarded([&] {
    need(outer, "outer");
    need(inner, "inner");
    need(out, "out");
    *out = outer->graph.contains(inner->graph) ? 1 : 0;
  });
}

// ---- models ----------------------------------------------------------------

sp_status sp_model_create_general(const char* name,
                                  const sp_graph* dependencies,
                                  sp_outcome_fn fn, void* user,
                                  sp_model** out) {
  return guarded([&] {
    need(dependencies, "dependencies");
    need(reinterpret_cast<const void*>(fn), "fn");
    emit(out, spillover::OutcomeModel::general(
                  name ? name : "custom", dependencies->graph,
                  [fn, user](std::size_t i, const spillover::TreatmentVector& w) {
                    return fn(user, i + 1, w.bits().data(), w.size());
                  }));
  });
}

sp_status sp_model_create_anonymous(const char* name,
                                    const sp_graph* dependencies,
                                    sp_response_fn fn, void* user,
                                    sp_model** out) {
  return guarded([&] {
    need(dependencies, "dependencies");
    need(reinterpret_cast<const void*>(fn), "fn");
    emit(out, spillover::OutcomeModel::anonymous(
                  name ? name : "custom_anonymous", dependencies->graph,
                  [fn, user](std::size_t i, int own, std::size_t b) {
                    return fn(user, i + 1, own, b);
                  }));
  });
}

sp_status sp_model_linear_in_means(const sp_graph* graph, double beta1,
                                   double beta2, double beta3,
                                   sp_model** out) {
  return guarded([&] {
    need(graph, "graph");
    emit(out, spillover::make_linear_in_means(
                  {graph->graph, beta1, beta2, beta3}));
  });
}

sp_status sp_model_saturated_linear(size_t n, const double* alpha,
                                    const double* beta, const double* nu,
                                    sp_model** out) {
  return guarded([&] {
    need(alpha, "alpha");
    need(beta, "beta");
    spillover::SaturatedLinearSpec spec;
    spec.alpha = copy(alpha, n);
    spec.beta = copy(beta, n);
    spec.nu.assign(n, std::vector<double>(n, 0.0));
    if (nu) {
      for (size_t i = 0; i < n; ++i) spec.nu[i] = copy(nu + i * n, n);
    }
    emit(out, spillover::make_saturated_linear(spec));
  });
}

sp_status sp_model_four_type(size_t n, size_t m, const double* treated_exposed,
                             const double* treated, const double* exposed,
                             const double* none, const uint32_t* clusters,
                             sp_model** out) {
  return guarded([&] {
    need(treated_exposed, "treated_exposed");
    need(treated, "treated");
    need(exposed, "exposed");
    need(none, "none");
    spillover::FourTypeExposureSpec spec;
    spec.cluster_size = m;
    spec.clusters = labels(clusters, n);
    spec.treated_exposed = copy(treated_exposed, n);
    spec.treated = copy(treated, n);
    spec.exposed = copy(exposed, n);
    spec.none = copy(none, n);
    emit(out, spillover::make_four_type_exposure(spec).model);
  });
}

sp_status sp_model_fig1_setting(int setting, const sp_graph* graph,
                                sp_model** out) {
  return guarded([&] {
    spillover::Fig1SettingSpec spec;
    spec.setting = setting;
    spec.graph = graph ? graph->graph : spillover::fig1_default_graph();
    emit(out, spillover::make_fig1_setting(spec));
  });
}

sp_status sp_model_diverging(size_t n, double pi0, sp_model** out) {
  return guarded([&] {
    emit(out, spillover::make_diverging_anonymous({pi0}, n));
  });
}

sp_status sp_model_peer_count(size_t n, sp_model** out) {
  return guarded([&] { emit(out, spillover::make_peer_count(n)); });
}

void sp_model_free(sp_model* model) { delete model; }

size_t sp_model_size(const sp_model* model) {
  return model ? model->model.size() : 0;
}

const char* sp_model_name(const sp_model* model) {
  return model ? model->model.name().c_str() : "";
}

sp_status sp_model_dependencies(const sp_model* model, sp_graph** out) {
  return guarded([&] {
    need(model, "model");
    emit(out, model->model.dependencies());
  });
}

sp_status sp_model_closed_form(const sp_model* model, int* available,
                               double* ade, double* aie) {
  return guarded([&] {
    need(model, "model");
    need(available, "available");
    const auto& closed = model->model.closed_form();
    *available = closed ? 1 : 0;
    if (closed) {
      if (ade) *ade = closed->ade;
      if (aie) *aie = closed->aie;
    }
  });
}

sp_status sp_model_evaluate(const sp_model* model, const uint8_t* w, size_t n,
                            double sigma, uint64_t seed, double* y_out) {
  return guarded([&] {
    need(model, "model");
    need(w, "w");
    need(y_out, "y_out");
    check_size(n, model->model.size(), "w");
    const auto noise = sigma > 0.0 ? spillover::NoiseSpec::gaussian(sigma)
                                   : spillover::NoiseSpec::none();
    spillover::Rng rng = spillover::stream_rng(seed, 0);
    const auto y = spillover::evaluate_outcomes(model->model, treatment(w, n),
                                                noise, rng);
    std::copy(y.begin(), y.end(), y_out);
  });
}

sp_status sp_check_locality(const sp_model* model, const sp_graph* claimed,
                            size_t probes, uint64_t seed,
                            sp_locality_result* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const spillover::LocalityReport report =
        claimed ? spillover::check_locality_against(model->model,
                                                    claimed->graph, probes, seed)
                : spillover::check_locality(model->model, probes, seed);
    sp_locality_result r{};
    r.passed = report.passed ? 1 : 0;
    r.probes = report.probes;
    r.violation = SP_VIOLATION_NONE;
    if (report.violation) {
      r.violation =
          report.violation->kind == spillover::LocalityViolation::Kind::kDependency
              ? SP_VIOLATION_DEPENDENCY
              : SP_VIOLATION_ANONYMITY;
      r.unit = report.violation->unit + 1;
      r.other = report.violation->other + 1;
    }
    *out = r;
  });
}

// ---- designs ---------------------------------------------------------------

sp_status sp_design_bernoulli(size_t n, const double* pi, sp_design** out) {
  return guarded([&] {
    need(pi, "pi");
    emit(out, spillover::Design{spillover::BernoulliDesign{probabilities(pi, n)}});
  });
}

sp_status sp_design_bernoulli_constant(size_t n, double pi, sp_design** out) {
  return guarded([&] {
    emit(out, spillover::Design{spillover::BernoulliDesign{
                  spillover::ProbabilityVector::constant(n, pi)}});
  });
}

sp_status sp_design_two_stage(size_t n, size_t m, double rho,
                              const uint32_t* clusters, sp_design** out) {
  return guarded([&] {
    if (clusters) {
      emit(out, spillover::Design{spillover::TwoStageClusteredDesign(
                    n, m, rho, labels(clusters, n))});
    } else {
      emit(out,
           spillover::Design{spillover::TwoStageClusteredDesign(n, m, rho)});
    }
  });
}

void sp_design_free(sp_design* design) { delete design; }

size_t sp_design_size(const sp_design* design) {
  return design ? spillover::design_size(design->design) : 0;
}

const char* sp_design_describe(const sp_design* design) {
  g_scratch = design ? spillover::describe(design->design) : std::string();
  return g_scratch.c_str();
}

sp_status sp_design_sample(const sp_design* design, uint64_t seed,
                           uint64_t stream, uint8_t* w_out, size_t n) {
  return guarded([&] {
    need(design, "design");
    need(w_out, "w_out");
    check_size(n, spillover::design_size(design->design), "w_out");
    spillover::Rng rng = spillover::stream_rng(seed, stream);
    const auto w = spillover::sample_assignment(design->design, rng);
    std::copy(w.bits().begin(), w.bits().end(), w_out);
  });
}

sp_status sp_design_marginal(const sp_design* design, size_t unit,
                             double* out) {
  return guarded([&] {
    need(design, "design");
    need(out, "out");
    *out = spillover::marginal_treatment_probability(
        design->design,
        unit_index(unit, spillover::design_size(design->design)));
  });
}

// ---- estimands -------------------------------------------------------------

sp_status sp_estimands_compute(const sp_model* model, const sp_design* design,
                               sp_method method, uint64_t replications,
                               uint64_t seed, unsigned workers,
                               sp_estimands* out) {
  return guarded([&] {
    need(model, "model");
    need(design, "design");
    need(out, "out");
    const auto r = spillover::compute_estimands(
        model->model, design->design, method_choice(method), replications,
        seed, policy(workers));
    *out = sp_estimands{r.ade,    r.aie,    r.aoe,    r.inf,
                        r.se_ade, r.se_aie, r.se_aoe, r.replications,
                        method_code(r.method)};
  });
}

sp_status sp_mean_outcome(const sp_model* model, const sp_design* design,
                          double* out) {
  return guarded([&] {
    need(model, "model");
    need(design, "design");
    need(out, "out");
    *out = spillover::mean_outcome_exact(model->model, design->design);
  });
}

sp_status sp_hh_de(const sp_model* model, const sp_design* design,
                   unsigned workers, double* out) {
  return guarded([&] {
    need(model, "model");
    need(design, "design");
    need(out, "out");
    *out = spillover::hh_de(model->model, design->design, policy(workers));
  });
}

sp_status sp_ie(const sp_model* model, const double* pi,
                const double* pi_prime, size_t n, unsigned workers,
                double* out) {
  return guarded([&] {
    need(model, "model");
    need(pi, "pi");
    need(pi_prime, "pi_prime");
    need(out, "out");
    check_size(n, model->model.size(), "pi");
    *out = spillover::ie_two_bernoulli(model->model, probabilities(pi, n),
                                       probabilities(pi_prime, n),
                                       policy(workers));
  });
}

sp_status sp_inf_analytic(const sp_model* model, const double* pi, size_t n,
                          unsigned workers, double* out) {
  return guarded([&] {
    need(model, "model");
    need(pi, "pi");
    need(out, "out");
    check_size(n, model->model.size(), "pi");
    *out = spillover::inf_analytic(
        model->model, spillover::BernoulliDesign{probabilities(pi, n)},
        policy(workers));
  });
}

sp_status sp_inf_finite_difference(const sp_model* model, const double* pi,
                                   size_t n, double step, int monte_carlo,
                                   uint64_t replications, uint64_t seed,
                                   unsigned workers, double* value,
                                   double* standard_error) {
  return guarded([&] {
    need(model, "model");
    need(pi, "pi");
    need(value, "value");
    check_size(n, model->model.size(), "pi");
    spillover::FiniteDifferenceOptions options;
    options.step = step;
    options.mode = monte_carlo ? spillover::DifferenceMode::kMonteCarlo
                               : spillover::DifferenceMode::kExact;
    options.replications = replications;
    options.seed = seed;
    options.exec = policy(workers);
    const auto r = spillover::inf_finite_difference(
        model->model, probabilities(pi, n), options);
    *value = r.value;
    if (standard_error) *standard_error = r.standard_error;
  });
}

// ---- estimators ------------------------------------------------------------

sp_status sp_ht_ade(const uint8_t* w, const double* y, const double* pi,
                    size_t n, double* out) {
  return guarded([&] {
    need(w, "w");
    need(y, "y");
    need(pi, "pi");
    need(out, "out");
    *out = spillover::ht_ade(treatment(w, n), std::span<const double>(y, n),
                             probabilities(pi, n));
  });
}

sp_status sp_ht_aie(const uint8_t* w, const double* y, const double* pi,
                    size_t n, const sp_graph* graph, double* out) {
  return guarded([&] {
    need(w, "w");
    need(y, "y");
    need(pi, "pi");
    need(graph, "graph");
    need(out, "out");
    *out = spillover::ht_aie(treatment(w, n), std::span<const double>(y, n),
                             probabilities(pi, n), graph->graph);
  });
}

sp_status sp_replicate(const sp_model* model, const sp_design* design,
                       const sp_graph* analyst_graph, double sigma,
                       uint64_t replications, uint64_t seed,
                       size_t locality_probes, unsigned workers,
                       sp_replication* out) {
  return guarded([&] {
    need(model, "model");
    need(design, "design");
    need(out, "out");
    spillover::ReplicationOptions options;
    options.replications = replications;
    options.seed = seed;
    options.locality_probes = locality_probes;
    options.exec = policy(workers);
    const auto noise = sigma > 0.0 ? spillover::NoiseSpec::gaussian(sigma)
                                   : spillover::NoiseSpec::none();
    const auto r = spillover::replicate_unbiasedness(
        model->model, noise, design->design,
        analyst_graph ? analyst_graph->graph : model->model.dependencies(),
        options);
    sp_replication c{};
    c.target_ade = r.target_ade;
    c.target_aie = r.target_aie;
    c.mean_ade = r.mean_ade;
    c.sd_ade = r.sd_ade;
    c.se_ade = r.se_ade;
    c.mean_aie = r.mean_aie;
    c.sd_aie = r.sd_aie;
    c.se_aie = r.se_aie;
    c.replications = r.replications;
    c.seed = r.seed;
    for (const auto& w : r.warnings) {
      if (w == spillover::kWarnGraphNotSuperset) c.graph_not_superset = 1;
      if (w == spillover::kWarnTargetMonteCarlo) c.target_monte_carlo = 1;
    }
    *out = c;
  });
}

// ---- tasks -----------------------------------------------------------------

sp_status sp_task_from_name(const char* name, sp_task* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto task = spillover::runner::parse_task(name);
    if (!task) {
      spillover::Fail(ErrorCode::kInvalidArgument,
                      std::string("unknown task '") + name + "'");
    }
    *out = static_cast<sp_task>(*task);
  });
}

sp_status sp_run_task(sp_task task, const sp_run_options* options) {
  g_last_summary.clear();
  bool verified = true;
  const sp_status status = guarded([&] {
    need(options, "options");
    need(options->config_path, "options->config_path");
    if (task < SP_TASK_ESTIMANDS || task > SP_TASK_VALIDATE_CONFIG) {
      spillover::Fail(ErrorCode::kInvalidArgument, "unknown task");
    }
    spillover::runner::Overrides o;
    if (options->has_seed) o.seed = options->seed;
    if (options->output) o.output = options->output;
    if (options->method) o.method = options->method;
    if (options->replications) o.replications = options->replications;
    if (options->workers) o.workers = options->workers;
    const auto result = spillover::runner::run_task(
        static_cast<spillover::runner::Task>(task), options->config_path, o,
        std::cout);
    std::cout.flush();
    g_last_summary = result.summary;
    verified = result.verification_passed;
  });
  if (status == SP_OK && !verified) {
    return fail(SP_ERR_VERIFICATION_FAILED, g_last_summary);
  }
  return status;
}

const char* sp_last_run_summary(void) { return g_last_summary.c_str(); }

sp_status sp_validate_config(const char* config_path) {
  sp_run_options options{};
  options.config_path = config_path;
  return sp_run_task(SP_TASK_VALIDATE_CONFIG, &options);
}

}  // extern "C"
