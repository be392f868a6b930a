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

#ifndef SPILLOVER_ESTIMATORS_HPP_
#define SPILLOVER_ESTIMATORS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spillover/design.hpp"
#include "spillover/graph.hpp"
#include "spillover/model.hpp"
#include "spillover/parallel.hpp"

namespace spillover {

// One realized experiment as the analyst sees it. `graph` is the analyst's
// interference graph: graph.neighbors(j) are the units believed able to
// affect unit j.
struct ExperimentRealization {
  TreatmentVector w;
  std::vector<double> y;
  ProbabilityVector pi;
  InterferenceGraph graph;
};

// (1/n) sum_i {W_i Y_i / pi_i - (1 - W_i) Y_i / (1 - pi_i)}
double ht_ade(const TreatmentVector& w, std::span<const double> y,
              const ProbabilityVector& pi);
double ht_ade(const ExperimentRealization& data);

// (1/n) sum_i sum_{j influenced by i} {W_i Y_j / pi_i - (1 - W_i) Y_j / (1 - pi_i)}
double ht_aie(const TreatmentVector& w, std::span<const double> y,
              const ProbabilityVector& pi, const InterferenceGraph& graph);
double ht_aie(const ExperimentRealization& data);

struct ReplicationReport {
  double target_ade = 0.0;
  double target_aie = 0.0;
  std::string target_source;  // closed_form, exact, anonymous_binomial, ...
  double mean_ade = 0.0;
  double sd_ade = 0.0;
  double se_ade = 0.0;
  double mean_aie = 0.0;
  double sd_aie = 0.0;
  double se_aie = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  std::string design;
  std::string model;
  std::vector<std::string> warnings;
};

inline constexpr const char* kWarnGraphNotSuperset = "analyst_graph_not_superset";
inline constexpr const char* kWarnTargetMonteCarlo = "target_monte_carlo";

struct ReplicationOptions {
  std::uint64_t replications = 10'000;
  std::uint64_t seed = 0;
  std::size_t locality_probes = 1000;
  ExecPolicy exec;
};

// Draws W from the Bernoulli design, observes noisy outcomes and computes
// both Horvitz-Thompson estimators, R times. Replication r is driven by
// stream_rng(seed, r). Non-Bernoulli designs are refused (kPrecondition).
ReplicationReport replicate_unbiasedness(const OutcomeModel& model,
                                         const NoiseSpec& noise,
                                         const Design& design,
                                         const InterferenceGraph& analyst_graph,
                                         const ReplicationOptions& options);

}  // namespace spillover

#endif  // SPILLOVER_ESTIMATORS_HPP_
