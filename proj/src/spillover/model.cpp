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

#include "spillover/model.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "spillover/error.hpp"

namespace spillover {

OutcomeModel OutcomeModel::general(std::string name,
                                   InterferenceGraph dependencies,
                                   OutcomeFn outcome,
                                   std::optional<ClosedFormEstimands> closed) {
  if (dependencies.size() == 0) {
    Fail(ErrorCode::kInvalidArgument, "model needs at least one unit");
  }
  OutcomeModel m;
  m.name_ = std::move(name);
  m.dependencies_ = std::move(dependencies);
  m.outcome_ = std::move(outcome);
  m.closed_ = closed;
  return m;
}

OutcomeModel OutcomeModel::anonymous(std::string name,
                                     InterferenceGraph dependencies,
                                     AnonymousResponseFn response,
                                     std::optional<ClosedFormEstimands> closed) {
  // The outcome closure shares the neighbor lists through a copy of the graph
  // so the model stays self-contained when copied.
  auto deps = std::make_shared<const InterferenceGraph>(dependencies);
  OutcomeFn outcome = [deps, response](std::size_t i,
                                       const TreatmentVector& w) {
    std::size_t treated = 0;
    for (auto j : deps->neighbors(i)) treated += w[j];
    return response(i, w[i], treated);
  };
  OutcomeModel m = general(std::move(name), std::move(dependencies),
                           std::move(outcome), closed);
  m.response_ = std::move(response);
  return m;
}

NoiseSpec NoiseSpec::gaussian(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    Fail(ErrorCode::kOutOfRange, "noise sigma must be finite and >= 0");
  }
  return {Kind::kGaussian, sigma};
}

std::vector<double> evaluate_outcomes(const OutcomeModel& model,
                                      const TreatmentVector& w,
                                      const NoiseSpec& noise, Rng& rng) {
  if (w.size() != model.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "assignment has " + std::to_string(w.size()) + " units, model has " +
             std::to_string(model.size()));
  }
  std::vector<double> y(model.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = model.outcome(i, w);
  if (noise.kind == NoiseSpec::Kind::kGaussian) {
    std::normal_distribution<double> eps(0.0, noise.sigma);
    for (double& v : y) v += eps(rng);
  }
  return y;
}

std::string LocalityReport::describe() const {
  std::ostringstream out;
  if (passed) {
    out << "pass (" << probes << " probes)";
    return out.str();
  }
  const auto& v = *violation;
  out << "fail: unit " << v.unit + 1;
  if (v.kind == LocalityViolation::Kind::kDependency) {
    out << " responds to undeclared unit " << v.other + 1;
  } else {
    out << " is not symmetric in dependency " << v.other + 1;
  }
  out << " at w=" << v.assignment.to_string();
  return out.str();
}

namespace {

TreatmentVector random_assignment(std::size_t n, Rng& rng) {
  TreatmentVector w(n);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) w.set(i, coin(rng) ? 1 : 0);
  return w;
}

// Exact comparison: a unit outside the dependency set must leave the outcome
// bit-identical, since the model never reads that coordinate.
LocalityReport probe(const OutcomeModel& model, const InterferenceGraph& claimed,
                     std::size_t probes, std::uint64_t seed,
                     bool check_anonymity) {
  const std::size_t n = model.size();
  if (claimed.size() != n) {
    Fail(ErrorCode::kInvalidArgument, "graph size does not match model");
  }
  if (probes == 0) Fail(ErrorCode::kInvalidArgument, "probes must be >= 1");

  LocalityReport report;
  Rng rng = stream_rng(seed, 0);
  std::vector<std::uint32_t> outside;
  for (std::size_t p = 0; p < probes; ++p) {
    ++report.probes;
    TreatmentVector w = random_assignment(n, rng);
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);

    outside.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && !claimed.has_edge(i, j)) {
        outside.push_back(static_cast<std::uint32_t>(j));
      }
    }
    if (!outside.empty()) {
      const std::size_t j = outside[std::uniform_int_distribution<std::size_t>(
          0, outside.size() - 1)(rng)];
      w.set(j, 0);
      const double y0 = model.outcome(i, w);
      w.set(j, 1);
      const double y1 = model.outcome(i, w);
      if (y0 != y1) {
        report.passed = false;
        report.violation = LocalityViolation{
            LocalityViolation::Kind::kDependency, i, j, w};
        return report;
      }
    }

    const auto deps = model.dependencies().neighbors(i);
    if (check_anonymity && deps.size() >= 2) {
      std::uniform_int_distribution<std::size_t> pick(0, deps.size() - 1);
      const std::size_t a = deps[pick(rng)];
      const std::size_t b = deps[pick(rng)];
      if (w[a] != w[b]) {
        const double before = model.outcome(i, w);
        TreatmentVector swapped = w;
        swapped.set(a, w[b]);
        swapped.set(b, w[a]);
        if (before != model.outcome(i, swapped)) {
          report.passed = false;
          report.violation = LocalityViolation{
              LocalityViolation::Kind::kAnonymity, i, a, w};
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace

LocalityReport check_locality(const OutcomeModel& model, std::size_t probes,
                              std::uint64_t seed) {
  return probe(model, model.dependencies(), probes, seed,
               model.is_anonymous());
}

LocalityReport check_locality_against(const OutcomeModel& model,
                                      const InterferenceGraph& claimed,
                                      std::size_t probes, std::uint64_t seed) {
  return probe(model, claimed, probes, seed, false);
}

}  // namespace spillover
