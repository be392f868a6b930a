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

#include "spillover/estimators.hpp"

#include <cmath>

#include "spillover/error.hpp"
#include "spillover/estimands.hpp"

namespace spillover {

namespace {

void check_realization(const TreatmentVector& w, std::span<const double> y,
                       const ProbabilityVector& pi) {
  if (w.size() != y.size() || w.size() != pi.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "assignment, outcomes and pi must have the same length");
  }
}

// Signed inverse-probability weight of unit i's own treatment status.
inline double ipw(const TreatmentVector& w, const ProbabilityVector& pi,
                  std::size_t i) {
  return w[i] ? 1.0 / pi[i] : -1.0 / (1.0 - pi[i]);
}

}  // namespace

double ht_ade(const TreatmentVector& w, std::span<const double> y,
              const ProbabilityVector& pi) {
  check_realization(w, y, pi);
  CompensatedSum sum;
  for (std::size_t i = 0; i < w.size(); ++i) sum += ipw(w, pi, i) * y[i];
  return sum.value() / static_cast<double>(w.size());
}

double ht_ade(const ExperimentRealization& data) {
  return ht_ade(data.w, data.y, data.pi);
}

double ht_aie(const TreatmentVector& w, std::span<const double> y,
              const ProbabilityVector& pi, const InterferenceGraph& graph) {
  check_realization(w, y, pi);
  if (graph.size() != w.size()) {
    Fail(ErrorCode::kInvalidArgument, "analyst graph size does not match data");
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double weight = ipw(w, pi, i);
    for (auto j : graph.influenced(i)) sum += weight * y[j];
  }
  return sum.value() / static_cast<double>(w.size());
}

double ht_aie(const ExperimentRealization& data) {
  return ht_aie(data.w, data.y, data.pi, data.graph);
}

ReplicationReport replicate_unbiasedness(const OutcomeModel& model,
                                         const NoiseSpec& noise,
                                         const Design& design,
                                         const InterferenceGraph& analyst_graph,
                                         const ReplicationOptions& options) {
  const auto* bernoulli = std::get_if<BernoulliDesign>(&design);
  if (!bernoulli) {
    Fail(ErrorCode::kPrecondition,
         "Horvitz-Thompson unbiasedness holds for Bernoulli designs only; got " +
             describe(design));
  }
  if (bernoulli->size() != model.size() ||
      analyst_graph.size() != model.size()) {
    Fail(ErrorCode::kInvalidArgument,
         "model, design and analyst graph must agree on n");
  }
  if (options.replications < 2) {
    Fail(ErrorCode::kInvalidArgument, "need at least 2 replications");
  }

  ReplicationReport report;
  report.replications = options.replications;
  report.seed = options.seed;
  report.design = describe(design);
  report.model = model.name();

  const bool declared_ok = analyst_graph.contains(model.dependencies());
  const bool probes_ok =
      options.locality_probes == 0 ||
      check_locality_against(model, analyst_graph, options.locality_probes,
                             options.seed)
          .passed;
  if (!declared_ok || !probes_ok) {
    report.warnings.emplace_back(kWarnGraphNotSuperset);
  }

  if (const auto& closed = model.closed_form()) {
    report.target_ade = closed->ade;
    report.target_aie = closed->aie;
    report.target_source = "closed_form";
  } else {
    const EstimandReport target = compute_estimands(
        model, design, MethodChoice::kAuto, options.replications,
        options.seed ^ 0x5eed5eed5eed5eedULL, options.exec);
    report.target_ade = target.ade;
    report.target_aie = target.aie;
    report.target_source = to_string(target.method);
    if (target.method == Method::kMonteCarlo) {
      report.warnings.emplace_back(kWarnTargetMonteCarlo);
    }
  }

  const std::uint64_t R = options.replications;
  std::vector<double> ade(R);
  std::vector<double> aie(R);
  parallel_for(R, options.exec, [&](std::size_t r) {
    Rng rng = stream_rng(options.seed, r);
    const TreatmentVector w = sample_assignment(design, rng);
    const std::vector<double> y = evaluate_outcomes(model, w, noise, rng);
    ade[r] = ht_ade(w, y, bernoulli->pi);
    aie[r] = ht_aie(w, y, bernoulli->pi, analyst_graph);
  });

  const auto summarize = [R](const std::vector<double>& v, double& mean,
                             double& sd, double& se) {
    CompensatedSum sum;
    for (double x : v) sum += x;
    mean = sum.value() / static_cast<double>(R);
    CompensatedSum sq;
    for (double x : v) sq += (x - mean) * (x - mean);
    sd = std::sqrt(sq.value() / static_cast<double>(R - 1));
    se = sd / std::sqrt(static_cast<double>(R));
  };
  summarize(ade, report.mean_ade, report.sd_ade, report.se_ade);
  summarize(aie, report.mean_aie, report.sd_aie, report.se_aie);
  return report;
}

}  // namespace spillover
