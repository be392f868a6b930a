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

#include "spillover/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "spillover/error.hpp"
#include "spillover/io.hpp"
#include "spillover/model_zoo.hpp"
#include "spillover/random.hpp"

namespace spillover::runner {

using nlohmann::json;
namespace fs = std::filesystem;

std::optional<Task> parse_task(std::string_view name) {
  if (name == "estimands") return Task::kEstimands;
  if (name == "estimators") return Task::kEstimators;
  if (name == "fig1") return Task::kFig1;
  if (name == "verify-theorem1") return Task::kVerifyTheorem1;
  if (name == "validate-config") return Task::kValidateConfig;
  return std::nullopt;
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kEstimands:
      return "estimands";
    case Task::kEstimators:
      return "estimators";
    case Task::kFig1:
      return "fig1";
    case Task::kVerifyTheorem1:
      return "verify-theorem1";
    case Task::kValidateConfig:
      return "validate-config";
  }
  return "unknown";
}

std::vector<double> Sweep::points() const {
  if (steps == 1) return {start};
  std::vector<double> out(steps);
  const double width = stop - start;
  for (std::size_t k = 0; k < steps; ++k) {
    out[k] = start + width * static_cast<double>(k) /
                         static_cast<double>(steps - 1);
  }
  return out;
}

namespace {

// ---- key-path aware JSON access -------------------------------------------

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string element(const std::string& path, std::size_t k) {
  return path + "[" + std::to_string(k) + "]";
}

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  Fail(ErrorCode::kConfig, path + ": " + message);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) bad(child(path, key), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) bad(child(path, key), "required");
  return *v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "must be finite");
  return x;
}

std::uint64_t as_count(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) bad(path, "must be >= 0");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  bad(path, "expected a nonnegative integer");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(as_number(v[k], element(path, k)));
  }
  return out;
}

double open_probability(const json& v, const std::string& path) {
  const double p = as_number(v, path);
  if (!(p > 0.0 && p < 1.0)) bad(path, "must be strictly inside (0,1)");
  return p;
}

// Runs a core constructor, re-labelling its errors with the key path.
template <typename F>
auto build_at(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, path + ": " + e.what());
  }
}

std::string resolve(const std::string& base_dir, const std::string& file) {
  fs::path p(file);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p.string();
}

MethodChoice parse_method(const std::string& s, const std::string& path) {
  if (s == "auto") return MethodChoice::kAuto;
  if (s == "exact") return MethodChoice::kExact;
  if (s == "mc" || s == "monte_carlo") return MethodChoice::kMonteCarlo;
  if (s == "binomial" || s == "anonymous_binomial") {
    return MethodChoice::kAnonymousBinomial;
  }
  bad(path, "unknown method '" + s + "' (auto, exact, mc, binomial)");
}

// ---- sections --------------------------------------------------------------

InterferenceGraph parse_graph(const json& v, const std::string& path,
                              const std::string& base_dir) {
  if (v.is_string()) {
    const std::string file = resolve(base_dir, v.get<std::string>());
    return build_at(path, [&] { return load_edge_list(file); });
  }
  require_object(v, path);
  if (const json* file = find(v, "file")) {
    check_keys(v, path, {"file"});
    const std::string f = resolve(base_dir, as_string(*file, child(path, "file")));
    return build_at(path, [&] { return load_edge_list(f); });
  }
  const std::string kind = as_string(require(v, path, "kind"), child(path, "kind"));
  const std::size_t n = as_count(require(v, path, "n"), child(path, "n"));
  if (n == 0) bad(child(path, "n"), "must be >= 1");
  if (kind == "circulant") {
    check_keys(v, path, {"kind", "n", "half_width"});
    const std::size_t w =
        as_count(require(v, path, "half_width"), child(path, "half_width"));
    return build_at(path, [&] { return InterferenceGraph::circulant(n, w); });
  }
  if (kind == "complete") {
    check_keys(v, path, {"kind", "n"});
    return InterferenceGraph::complete(n);
  }
  if (kind == "empty") {
    check_keys(v, path, {"kind", "n"});
    return InterferenceGraph(n);
  }
  if (kind == "edges") {
    check_keys(v, path, {"kind", "n", "edges"});
    const json& edges = require(v, path, "edges");
    const std::string epath = child(path, "edges");
    if (!edges.is_array()) bad(epath, "expected an array of [i, j] pairs");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string p = element(epath, k);
      if (!edges[k].is_array() || edges[k].size() != 2) bad(p, "expected [i, j]");
      const auto i = as_count(edges[k][0], p);
      const auto j = as_count(edges[k][1], p);
      if (i < 1 || i > n || j < 1 || j > n) {
        bad(p, "unit index outside 1.." + std::to_string(n));
      }
      pairs.emplace_back(static_cast<std::uint32_t>(i - 1),
                         static_cast<std::uint32_t>(j - 1));
    }
    return build_at(path, [&] { return InterferenceGraph::from_edges(n, pairs); });
  }
  bad(child(path, "kind"),
      "unknown graph kind '" + kind + "' (circulant, complete, empty, edges)");
}

std::vector<std::vector<double>> parse_matrix(const json& v,
                                              const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < v.size(); ++k) {
    rows.push_back(as_numbers(v[k], element(path, k)));
  }
  return rows;
}

OutcomeModel parse_model(const json& v, const std::string& base_dir,
                         const json* design_section) {
  const std::string path = "model";
  require_object(v, path);
  const std::string kind =
      as_string(require(v, path, "kind"), child(path, "kind"));

  if (kind == "linear_in_means") {
    check_keys(v, path, {"kind", "graph", "beta"});
    const auto beta = as_numbers(require(v, path, "beta"), child(path, "beta"));
    if (beta.size() != 3) bad(child(path, "beta"), "expected [beta1, beta2, beta3]");
    LinearInMeansSpec spec{
        parse_graph(require(v, path, "graph"), child(path, "graph"), base_dir),
        beta[0], beta[1], beta[2]};
    return build_at(path, [&] { return make_linear_in_means(spec); });
  }

  if (kind == "saturated_linear") {
    check_keys(v, path,
               {"kind", "alpha", "beta", "nu", "params_file", "nu_file"});
    SaturatedLinearSpec spec;
    if (const json* f = find(v, "params_file")) {
      const std::string file = resolve(base_dir, as_string(*f, child(path, "params_file")));
      build_at(child(path, "params_file"),
               [&] { load_saturated_params(file, spec.alpha, spec.beta); });
    } else {
      spec.alpha = as_numbers(require(v, path, "alpha"), child(path, "alpha"));
      spec.beta = as_numbers(require(v, path, "beta"), child(path, "beta"));
    }
    if (const json* f = find(v, "nu_file")) {
      const std::string file = resolve(base_dir, as_string(*f, child(path, "nu_file")));
      spec.nu = build_at(child(path, "nu_file"), [&] { return load_nu_matrix(file); });
    } else if (const json* nu = find(v, "nu")) {
      spec.nu = parse_matrix(*nu, child(path, "nu"));
    } else {
      spec.nu.assign(spec.alpha.size(), std::vector<double>(spec.alpha.size()));
    }
    return build_at(path, [&] { return make_saturated_linear(spec); });
  }

  if (kind == "four_type") {
    check_keys(v, path, {"kind", "m", "outcomes_file", "clusters_file",
                         "treated_exposed", "treated", "exposed", "none"});
    FourTypeExposureSpec spec;
    spec.cluster_size = as_count(require(v, path, "m"), child(path, "m"));
    if (const json* f = find(v, "outcomes_file")) {
      const std::string file =
          resolve(base_dir, as_string(*f, child(path, "outcomes_file")));
      build_at(child(path, "outcomes_file"),
               [&] { load_four_type_outcomes(file, spec); });
    } else {
      spec.treated_exposed = as_numbers(require(v, path, "treated_exposed"),
                                        child(path, "treated_exposed"));
      spec.treated = as_numbers(require(v, path, "treated"), child(path, "treated"));
      spec.exposed = as_numbers(require(v, path, "exposed"), child(path, "exposed"));
      spec.none = as_numbers(require(v, path, "none"), child(path, "none"));
    }
    std::string clusters_file;
    std::string clusters_path;
    if (const json* f = find(v, "clusters_file")) {
      clusters_path = child(path, "clusters_file");
      clusters_file = resolve(base_dir, as_string(*f, clusters_path));
    } else if (design_section && design_section->is_object()) {
      // Share the design's explicit partition when the model has none.
      if (const json* f = find(*design_section, "clusters")) {
        clusters_path = "design.clusters";
        clusters_file = resolve(base_dir, as_string(*f, clusters_path));
      }
    }
    if (!clusters_file.empty()) {
      spec.clusters = build_at(clusters_path,
                               [&] { return load_cluster_partition(clusters_file); });
    }
    return build_at(path, [&] { return make_four_type_exposure(spec).model; });
  }

  if (kind == "fig1_setting") {
    check_keys(v, path, {"kind", "setting", "graph"});
    Fig1SettingSpec spec;
    spec.setting = static_cast<int>(
        as_count(require(v, path, "setting"), child(path, "setting")));
    if (spec.setting < 1 || spec.setting > 3) {
      bad(child(path, "setting"), "must be 1, 2 or 3");
    }
    if (const json* g = find(v, "graph")) {
      spec.graph = parse_graph(*g, child(path, "graph"), base_dir);
    } else {
      spec.graph = fig1_default_graph();
    }
    return build_at(path, [&] { return make_fig1_setting(spec); });
  }

  if (kind == "diverging") {
    check_keys(v, path, {"kind", "n", "pi0"});
    const std::size_t n = as_count(require(v, path, "n"), child(path, "n"));
    if (n == 0) bad(child(path, "n"), "must be >= 1");
    DivergingAnonymousSpec spec{
        open_probability(require(v, path, "pi0"), child(path, "pi0"))};
    return build_at(path, [&] { return make_diverging_anonymous(spec, n); });
  }

  if (kind == "peer_count") {
    check_keys(v, path, {"kind", "n"});
    const std::size_t n = as_count(require(v, path, "n"), child(path, "n"));
    if (n < 2) bad(child(path, "n"), "must be >= 2");
    return make_peer_count(n);
  }

  bad(child(path, "kind"),
      "unknown model kind '" + kind +
          "' (linear_in_means, saturated_linear, four_type, fig1_setting, "
          "diverging, peer_count)");
}

Design parse_design(const json& v, std::optional<std::size_t> model_n,
                    const std::string& base_dir) {
  const std::string path = "design";
  require_object(v, path);
  const std::string kind =
      as_string(require(v, path, "kind"), child(path, "kind"));
  std::optional<std::size_t> n = model_n;
  if (const json* jn = find(v, "n")) {
    const std::size_t given = as_count(*jn, child(path, "n"));
    if (model_n && given != *model_n) {
      bad(child(path, "n"), "does not match the model's " +
                                std::to_string(*model_n) + " units");
    }
    n = given;
  }
  if (!n || *n == 0) bad(child(path, "n"), "required when there is no model section");

  if (kind == "bernoulli") {
    check_keys(v, path, {"kind", "n", "pi"});
    const json& pi = require(v, path, "pi");
    const std::string ppath = child(path, "pi");
    std::vector<double> values;
    if (pi.is_array()) {
      values = as_numbers(pi, ppath);
      if (values.size() != *n) {
        bad(ppath, "has " + std::to_string(values.size()) +
                       " entries, expected " + std::to_string(*n));
      }
      for (std::size_t k = 0; k < values.size(); ++k) {
        open_probability(pi[k], element(ppath, k));
      }
    } else {
      values.assign(*n, open_probability(pi, ppath));
    }
    return BernoulliDesign{ProbabilityVector(std::move(values))};
  }
  if (kind == "two_stage") {
    check_keys(v, path, {"kind", "n", "m", "rho", "clusters"});
    const std::size_t m = as_count(require(v, path, "m"), child(path, "m"));
    if (m < 1) bad(child(path, "m"), "must be >= 1");
    const double rho = as_number(require(v, path, "rho"), child(path, "rho"));
    if (!(rho >= 0.0 && rho <= 1.0)) bad(child(path, "rho"), "must lie in [0,1]");
    if (const json* f = find(v, "clusters")) {
      const std::string file = resolve(base_dir, as_string(*f, child(path, "clusters")));
      auto clusters = build_at(child(path, "clusters"),
                               [&] { return load_cluster_partition(file); });
      return build_at(path, [&] {
        return Design{TwoStageClusteredDesign(*n, m, rho, std::move(clusters))};
      });
    }
    return build_at(path,
                    [&] { return Design{TwoStageClusteredDesign(*n, m, rho)}; });
  }
  bad(child(path, "kind"), "unknown design kind '" + kind + "' (bernoulli, two_stage)");
}

Sweep parse_sweep(const json& v) {
  const std::string path = "sweep";
  require_object(v, path);
  check_keys(v, path, {"start", "stop", "steps"});
  Sweep s;
  s.start = open_probability(require(v, path, "start"), child(path, "start"));
  s.stop = open_probability(require(v, path, "stop"), child(path, "stop"));
  s.steps = as_count(require(v, path, "steps"), child(path, "steps"));
  if (s.steps < 1) bad(child(path, "steps"), "must be >= 1");
  if (s.stop < s.start) bad(child(path, "stop"), "must be >= sweep.start");
  return s;
}

NoiseSpec parse_noise(const json& v) {
  const std::string path = "noise";
  require_object(v, path);
  check_keys(v, path, {"kind", "sigma"});
  const std::string kind =
      as_string(require(v, path, "kind"), child(path, "kind"));
  if (kind == "none") return NoiseSpec::none();
  if (kind == "gaussian") {
    const double sigma = as_number(require(v, path, "sigma"), child(path, "sigma"));
    if (sigma < 0.0) bad(child(path, "sigma"), "must be >= 0");
    return NoiseSpec::gaussian(sigma);
  }
  bad(child(path, "kind"), "unknown noise kind '" + kind + "' (none, gaussian)");
}

BatterySpec parse_battery(const json& v) {
  const std::string path = "battery";
  require_object(v, path);
  check_keys(v, path,
             {"instances", "max_n", "kind", "negative_control", "tolerance"});
  BatterySpec b;
  if (const json* x = find(v, "instances")) {
    b.instances = as_count(*x, child(path, "instances"));
    if (b.instances < 1) bad(child(path, "instances"), "must be >= 1");
  }
  if (const json* x = find(v, "max_n")) {
    b.max_n = as_count(*x, child(path, "max_n"));
    if (b.max_n < 3 || b.max_n > kMaxBernoulliEnumerationUnits) {
      bad(child(path, "max_n"),
          "must lie in 3.." + std::to_string(kMaxBernoulliEnumerationUnits));
    }
  }
  if (const json* x = find(v, "kind")) {
    const std::string kind = as_string(*x, child(path, "kind"));
    if (kind != "linear" && kind != "nonlinear") {
      bad(child(path, "kind"), "must be 'linear' or 'nonlinear'");
    }
    b.linear = kind == "linear";
  }
  if (const json* x = find(v, "negative_control")) {
    b.negative_control = as_bool(*x, child(path, "negative_control"));
  }
  if (const json* x = find(v, "tolerance")) {
    b.tolerance = as_number(*x, child(path, "tolerance"));
    if (!(b.tolerance > 0.0)) bad(child(path, "tolerance"), "must be > 0");
  }
  return b;
}

}  // namespace

Experiment parse_experiment(const std::string& text,
                            const std::string& base_dir,
                            const Overrides& overrides) {
  json root;
  try {
    root = json::parse(text, nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  require_object(root, "<root>");
  check_keys(root, "",
             {"task", "seed", "replications", "method", "workers", "output",
              "fd_step", "locality_probes", "model", "design", "sweep", "noise",
              "analyst_graph", "fig1", "battery"});

  Experiment e;
  if (const json* t = find(root, "task")) {
    const std::string name = as_string(*t, "task");
    e.task = parse_task(name);
    if (!e.task || *e.task == Task::kValidateConfig) {
      bad("task", "unknown task '" + name +
                      "' (estimands, estimators, fig1, verify-theorem1)");
    }
  }

  if (overrides.seed) {
    e.seed = *overrides.seed;
  } else if (const json* s = find(root, "seed")) {
    e.seed = as_count(*s, "seed");
  } else {
    bad("seed", "required (runs are always seeded)");
  }

  if (overrides.replications) {
    e.replications = *overrides.replications;
    if (e.replications < 2) bad("replications", "must be >= 2 (from --replications)");
  } else if (const json* r = find(root, "replications")) {
    e.replications = as_count(*r, "replications");
    if (e.replications < 2) bad("replications", "must be >= 2");
  }

  if (overrides.method) {
    e.method = parse_method(*overrides.method, "method (from --method)");
  } else if (const json* m = find(root, "method")) {
    e.method = parse_method(as_string(*m, "method"), "method");
  }

  if (overrides.workers) {
    e.exec.workers = *overrides.workers;
  } else if (const json* w = find(root, "workers")) {
    e.exec.workers = static_cast<unsigned>(as_count(*w, "workers"));
  }
  if (e.exec.workers < 1 || e.exec.workers > 1024) {
    bad("workers", "must lie in 1..1024");
  }

  if (overrides.output) {
    e.output = *overrides.output;
  } else if (const json* o = find(root, "output")) {
    e.output = resolve(base_dir, as_string(*o, "output"));
  }

  if (const json* h = find(root, "fd_step")) {
    e.fd_step = as_number(*h, "fd_step");
    if (!(e.fd_step > 0.0 && e.fd_step < 0.5)) bad("fd_step", "must lie in (0, 0.5)");
  }
  if (const json* p = find(root, "locality_probes")) {
    e.locality_probes = as_count(*p, "locality_probes");
  }

  const json* design_section = find(root, "design");
  if (const json* m = find(root, "model")) {
    e.model = parse_model(*m, base_dir, design_section);
  }
  std::optional<std::size_t> n;
  if (e.model) n = e.model->size();
  if (design_section) e.design = parse_design(*design_section, n, base_dir);
  if (const json* s = find(root, "sweep")) e.sweep = parse_sweep(*s);
  if (const json* s = find(root, "noise")) e.noise = parse_noise(*s);
  if (const json* g = find(root, "analyst_graph")) {
    e.analyst_graph = parse_graph(*g, "analyst_graph", base_dir);
    if (n && e.analyst_graph->size() != *n) {
      bad("analyst_graph", "has " + std::to_string(e.analyst_graph->size()) +
                               " units, model has " + std::to_string(*n));
    }
  }
  if (const json* f = find(root, "fig1")) {
    require_object(*f, "fig1");
    check_keys(*f, "fig1", {"graph"});
    if (const json* g = find(*f, "graph")) {
      e.fig1_graph = parse_graph(*g, "fig1.graph", base_dir);
    }
  }
  if (const json* b = find(root, "battery")) e.battery = parse_battery(*b);
  return e;
}

Experiment load_experiment(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kConfig, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::string base = fs::path(path).parent_path().string();
  return parse_experiment(text.str(), base, overrides);
}

void require_sections(const Experiment& e, Task task) {
  switch (task) {
    case Task::kEstimands:
      if (!e.model) bad("model", "required for estimands");
      if (e.sweep) {
        if (e.design && !is_bernoulli(*e.design)) {
          bad("sweep", "a pi sweep needs a Bernoulli design");
        }
      } else if (!e.design) {
        bad("design", "required for estimands (or give a sweep)");
      }
      return;
    case Task::kEstimators:
      if (!e.model) bad("model", "required for estimators");
      if (!e.design) bad("design", "required for estimators");
      if (!is_bernoulli(*e.design)) {
        bad("design.kind", "estimators need a Bernoulli design; got " +
                               describe(*e.design));
      }
      return;
    case Task::kFig1:
      if (e.fig1_graph && !e.fig1_graph->regular_degree()) {
        bad("fig1.graph", "must be regular for the binomial fast path");
      }
      return;
    case Task::kVerifyTheorem1:
    case Task::kValidateConfig:
      return;
  }
}

// ---- estimands -------------------------------------------------------------

std::vector<EstimandRow> run_estimands(const Experiment& e) {
  require_sections(e, Task::kEstimands);
  const OutcomeModel& model = *e.model;
  std::vector<EstimandRow> rows;
  if (e.sweep) {
    const auto grid = e.sweep->points();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Design design{
          BernoulliDesign{ProbabilityVector::constant(model.size(), grid[k])}};
      // Each grid point gets its own seed so rows are independent draws.
      const std::uint64_t seed = e.seed + k;
      rows.push_back({grid[k],
                      compute_estimands(model, design, e.method, e.replications,
                                        seed, e.exec),
                      seed});
    }
    return rows;
  }
  std::optional<double> pi0;
  if (const auto* b = std::get_if<BernoulliDesign>(&*e.design)) {
    if (b->pi.is_constant()) pi0 = b->pi[0];
  }
  rows.push_back({pi0,
                  compute_estimands(model, *e.design, e.method, e.replications,
                                    e.seed, e.exec),
                  e.seed});
  return rows;
}

void write_estimands_csv(std::ostream& out, const Experiment& e,
                         const std::vector<EstimandRow>& rows) {
  const std::string design =
      e.design && !e.sweep ? describe(*e.design) : std::string("bernoulli:sweep");
  out << "method,n,design,pi0,ade,aie,aoe,inf,se_ade,se_aie,replications,seed\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    std::string label = design;
    if (e.sweep) label = "bernoulli:pi=" + format_double(*row.pi0);
    out << to_string(r.method) << ',' << e.model->size() << ',' << label << ','
        << (row.pi0 ? format_double(*row.pi0) : std::string()) << ','
        << format_double(r.ade) << ',' << format_double(r.aie) << ','
        << format_double(r.aoe) << ',' << format_double(r.inf) << ','
        << format_double(r.se_ade) << ',' << format_double(r.se_aie) << ','
        << r.replications << ',' << row.seed << '\n';
  }
}

namespace {

void write_estimands_json(std::ostream& out, const Experiment& e,
                          const std::vector<EstimandRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    const auto& r = row.report;
    const auto num = [](double x) -> json {
      return std::isfinite(x) ? json(x) : json(nullptr);
    };
    json o;
    o["method"] = to_string(r.method);
    o["n"] = e.model->size();
    o["design"] = e.sweep ? "bernoulli:pi=" + format_double(*row.pi0)
                          : describe(*e.design);
    o["pi0"] = row.pi0 ? json(*row.pi0) : json(nullptr);
    o["ade"] = num(r.ade);
    o["aie"] = num(r.aie);
    o["aoe"] = num(r.aoe);
    o["inf"] = num(r.inf);
    o["se_ade"] = num(r.se_ade);
    o["se_aie"] = num(r.se_aie);
    o["replications"] = r.replications;
    o["seed"] = row.seed;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace

// ---- estimators ------------------------------------------------------------

ReplicationReport run_estimators(const Experiment& e) {
  require_sections(e, Task::kEstimators);
  ReplicationOptions options;
  options.replications = e.replications;
  options.seed = e.seed;
  options.locality_probes = e.locality_probes;
  options.exec = e.exec;
  const InterferenceGraph& analyst =
      e.analyst_graph ? *e.analyst_graph : e.model->dependencies();
  return replicate_unbiasedness(*e.model, e.noise, *e.design, analyst, options);
}

void write_replication_csv(std::ostream& out, const ReplicationReport& r) {
  out << "replication_count,seed,target_ade,mean_ade,sd_ade,se_ade,target_aie,"
         "mean_aie,sd_aie,se_aie,design,model,warning_flags\n";
  std::string flags;
  for (const auto& w : r.warnings) {
    if (!flags.empty()) flags += ';';
    flags += w;
  }
  out << r.replications << ',' << r.seed << ',' << format_double(r.target_ade)
      << ',' << format_double(r.mean_ade) << ',' << format_double(r.sd_ade)
      << ',' << format_double(r.se_ade) << ',' << format_double(r.target_aie)
      << ',' << format_double(r.mean_aie) << ',' << format_double(r.sd_aie)
      << ',' << format_double(r.se_aie) << ',' << r.design << ',' << r.model
      << ',' << flags << '\n';
}

// ---- fig1 ------------------------------------------------------------------

std::vector<std::vector<Fig1Row>> run_fig1(const Experiment& e) {
  require_sections(e, Task::kFig1);
  const InterferenceGraph graph = e.fig1_graph ? *e.fig1_graph : fig1_default_graph();
  const auto grid = (e.sweep ? *e.sweep : Sweep{}).points();
  std::vector<std::vector<Fig1Row>> tables;
  for (int setting = 1; setting <= 3; ++setting) {
    const OutcomeModel model = make_fig1_setting({setting, graph});
    std::vector<Fig1Row> rows(grid.size());
    parallel_for(grid.size(), e.exec, [&](std::size_t k) {
      const EstimandReport r = estimands_anonymous_binomial(model, grid[k]);
      rows[k] = {grid[k], r.ade, r.aie, r.inf,
                 mean_outcome_anonymous_binomial(model, grid[k])};
    });
    tables.push_back(std::move(rows));
  }
  return tables;
}

void write_fig1_csv(std::ostream& out, const std::vector<Fig1Row>& rows) {
  out << "pi0,ade,aie,inf,mean_outcome\n";
  for (const auto& r : rows) {
    out << format_double(r.pi0) << ',' << format_double(r.ade) << ','
        << format_double(r.aie) << ',' << format_double(r.inf) << ','
        << format_double(r.mean_outcome) << '\n';
  }
}

// ---- verify-theorem1 -------------------------------------------------------

namespace {

struct BatteryInstance {
  OutcomeModel model;
  ProbabilityVector pi;
};

BatteryInstance make_instance(const BatterySpec& spec, std::uint64_t seed,
                              std::size_t k) {
  Rng rng = stream_rng(seed, k);
  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(3, spec.max_n)(rng);
  const double density = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
  std::vector<std::vector<std::uint32_t>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && uniform01(rng) < density) {
        lists[i].push_back(static_cast<std::uint32_t>(j));
      }
    }
  }
  InterferenceGraph graph = InterferenceGraph::from_neighbor_lists(std::move(lists));

  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  AnonymousTable table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = graph.degree(i);
    const double a = coef(rng);
    const double b = coef(rng);
    const double c = coef(rng);
    for (int x = 0; x <= 1; ++x) {
      auto& row = table[i][static_cast<std::size_t>(x)];
      row.resize(d + 1);
      for (std::size_t t = 0; t <= d; ++t) {
        row[t] = spec.linear ? a + b * x + c * static_cast<double>(t) : coef(rng);
      }
    }
  }
  std::vector<double> pi(n);
  for (double& p : pi) p = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  return {make_anonymous_table(graph, std::move(table)),
          ProbabilityVector(std::move(pi))};
}

}  // namespace

BatteryReport run_verify_theorem1(const Experiment& e) {
  const BatterySpec& spec = e.battery;
  BatteryReport report;
  report.rows.resize(spec.instances);
  parallel_for(spec.instances, e.exec, [&](std::size_t k) {
    const BatteryInstance inst = make_instance(spec, e.seed, k);
    const Design design{BernoulliDesign{inst.pi}};
    const EstimandReport exact = estimands_exact(inst.model, design);
    double inf_fd = 0.0;
    if (spec.negative_control) {
      // Only the first coordinate is nudged: a partial, not the full
      // directional derivative.
      std::vector<double> up(inst.pi.values().begin(), inst.pi.values().end());
      std::vector<double> down = up;
      up[0] += e.fd_step;
      down[0] -= e.fd_step;
      const double v_up = mean_outcome_exact(
          inst.model, Design{BernoulliDesign{ProbabilityVector(up)}});
      const double v_down = mean_outcome_exact(
          inst.model, Design{BernoulliDesign{ProbabilityVector(down)}});
      inf_fd = (v_up - v_down) / (2.0 * e.fd_step);
    } else {
      FiniteDifferenceOptions fd;
      fd.step = e.fd_step;
      inf_fd = inf_finite_difference(inst.model, inst.pi, fd).value;
    }
    BatteryRow& row = report.rows[k];
    row.instance = k + 1;
    row.n = inst.model.size();
    row.edges = inst.model.dependencies().edge_count();
    row.ade = exact.ade;
    row.aie = exact.aie;
    row.inf_fd = inf_fd;
    row.inf_analytic = exact.inf;
    row.residual = std::abs(exact.aoe - inf_fd);
    row.passed = row.residual <= spec.tolerance;
  });
  for (const auto& row : report.rows) {
    report.passed = report.passed && row.passed;
    report.max_residual = std::max(report.max_residual, row.residual);
  }
  return report;
}

void write_battery_csv(std::ostream& out, const BatteryReport& report) {
  out << "instance,n,edges,ade,aie,aoe,inf_fd,inf_analytic,residual,pass\n";
  for (const auto& r : report.rows) {
    out << r.instance << ',' << r.n << ',' << r.edges << ','
        << format_double(r.ade) << ',' << format_double(r.aie) << ','
        << format_double(r.ade + r.aie) << ',' << format_double(r.inf_fd)
        << ',' << format_double(r.inf_analytic) << ','
        << format_double(r.residual) << ',' << (r.passed ? "true" : "false")
        << '\n';
  }
}

// ---- dispatch --------------------------------------------------------------

namespace {

bool wants_json(const std::string& path) {
  return fs::path(path).extension() == ".json";
}

template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& write,
          TaskResult& result) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kConfig, "output: cannot write '" + path + "'");
  write(out);
  if (!out) Fail(ErrorCode::kIo, "output: write to '" + path + "' failed");
  result.files.push_back(path);
}

}  // namespace

TaskResult run_task(Task task, const std::string& config_path,
                    const Overrides& overrides, std::ostream& stdout_sink) {
  const Experiment e = load_experiment(config_path, overrides);
  TaskResult result;
  const Task effective =
      task == Task::kValidateConfig && e.task ? *e.task : task;
  require_sections(e, effective);

  switch (task) {
    case Task::kValidateConfig:
      result.summary = "config ok";
      if (e.task) result.summary += " (task " + std::string(task_name(*e.task)) + ")";
      return result;

    case Task::kEstimands: {
      const auto rows = run_estimands(e);
      emit(e.output, stdout_sink,
           [&](std::ostream& out) {
             if (wants_json(e.output)) {
               write_estimands_json(out, e, rows);
             } else {
               write_estimands_csv(out, e, rows);
             }
           },
           result);
      result.summary = "estimands: " + std::to_string(rows.size()) + " row(s)";
      return result;
    }

    case Task::kEstimators: {
      const ReplicationReport report = run_estimators(e);
      emit(e.output, stdout_sink,
           [&](std::ostream& out) { write_replication_csv(out, report); },
           result);
      result.summary = "estimators: " + std::to_string(report.replications) +
                       " replications";
      for (const auto& w : report.warnings) result.summary += ", warning " + w;
      return result;
    }

    case Task::kFig1: {
      const auto tables = run_fig1(e);
      const std::string dir = e.output.empty() ? std::string(".") : e.output;
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) Fail(ErrorCode::kConfig, "output: cannot create '" + dir + "'");
      for (std::size_t s = 0; s < tables.size(); ++s) {
        const std::string file =
            (fs::path(dir) / ("fig1_setting" + std::to_string(s + 1) + ".csv"))
                .string();
        emit(file, stdout_sink,
             [&](std::ostream& out) { write_fig1_csv(out, tables[s]); }, result);
      }
      result.summary = "fig1: 3 settings x " +
                       std::to_string(tables.front().size()) + " points";
      return result;
    }

    case Task::kVerifyTheorem1: {
      const BatteryReport report = run_verify_theorem1(e);
      emit(e.output, stdout_sink,
           [&](std::ostream& out) { write_battery_csv(out, report); }, result);
      std::size_t passed = 0;
      for (const auto& r : report.rows) passed += r.passed ? 1 : 0;
      result.verification_passed = report.passed;
      result.summary = "verify-theorem1: " + std::to_string(passed) + "/" +
                       std::to_string(report.rows.size()) +
                       " instances pass, max residual " +
                       format_double(report.max_residual);
      return result;
    }
  }
  return result;
}

}  // namespace spillover::runner
