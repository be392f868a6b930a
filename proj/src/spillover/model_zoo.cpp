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

#include "spillover/model_zoo.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>

#include "spillover/error.hpp"

namespace spillover {

namespace {

void require_neighbors(const InterferenceGraph& graph, const char* what) {
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph.degree(i) == 0) {
      Fail(ErrorCode::kInvalidArgument,
           std::string(what) + ": unit " + std::to_string(i + 1) +
               " has no neighbors");
    }
  }
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

OutcomeModel make_linear_in_means(const LinearInMeansSpec& spec) {
  if (spec.graph.size() == 0) {
    Fail(ErrorCode::kInvalidArgument, "linear-in-means: empty graph");
  }
  require_neighbors(spec.graph, "linear-in-means");
  std::vector<double> inv_degree(spec.graph.size());
  for (std::size_t i = 0; i < inv_degree.size(); ++i) {
    inv_degree[i] = 1.0 / static_cast<double>(spec.graph.degree(i));
  }
  const double b1 = spec.beta1;
  const double b2 = spec.beta2;
  const double b3 = spec.beta3;
  auto response = [b1, b2, b3, inv_degree = std::move(inv_degree)](
                      std::size_t i, int own, std::size_t treated) {
    return b1 + b2 * own + b3 * (static_cast<double>(treated) * inv_degree[i]);
  };
  return OutcomeModel::anonymous("linear_in_means", spec.graph,
                                 std::move(response),
                                 ClosedFormEstimands{b2, b3});
}

OutcomeModel make_saturated_linear(const SaturatedLinearSpec& spec) {
  const std::size_t n = spec.alpha.size();
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "saturated linear: n = 0");
  if (spec.beta.size() != n || spec.nu.size() != n) {
    Fail(ErrorCode::kInvalidArgument,
         "saturated linear: alpha, beta and nu must all have n entries");
  }
  struct Term {
    std::uint32_t unit;
    double weight;
  };
  std::vector<std::vector<Term>> terms(n);
  std::vector<std::vector<std::uint32_t>> deps(n);
  double nu_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.nu[i].size() != n) {
      Fail(ErrorCode::kInvalidArgument, "saturated linear: nu row " +
                                            std::to_string(i + 1) +
                                            " does not have n entries");
    }
    if (spec.nu[i][i] != 0.0) {
      Fail(ErrorCode::kInvalidArgument, "saturated linear: nu[" +
                                            std::to_string(i + 1) + "][" +
                                            std::to_string(i + 1) +
                                            "] must be zero");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double v = spec.nu[i][j];
      if (v == 0.0) continue;
      terms[i].push_back({static_cast<std::uint32_t>(j), v});
      deps[i].push_back(static_cast<std::uint32_t>(j));
      nu_total += v;
    }
  }
  ClosedFormEstimands closed{mean(spec.beta), nu_total / static_cast<double>(n)};
  auto outcome = [alpha = spec.alpha, beta = spec.beta,
                  terms = std::move(terms)](std::size_t i,
                                            const TreatmentVector& w) {
    double y = alpha[i] + beta[i] * w[i];
    for (const auto& t : terms[i]) y += t.weight * w[t.unit];
    return y;
  };
  return OutcomeModel::general(
      "saturated_linear",
      InterferenceGraph::from_neighbor_lists(std::move(deps)),
      std::move(outcome), closed);
}

FourTypeExposureModel make_four_type_exposure(const FourTypeExposureSpec& spec) {
  const std::size_t n = spec.treated_exposed.size();
  const std::size_t m = spec.cluster_size;
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "four-type: n = 0");
  if (spec.treated.size() != n || spec.exposed.size() != n ||
      spec.none.size() != n) {
    Fail(ErrorCode::kInvalidArgument,
         "four-type: the four outcome vectors must have equal length");
  }
  if (m < 2) Fail(ErrorCode::kInvalidArgument, "four-type: cluster size must be >= 2");
  if (n % m != 0) {
    Fail(ErrorCode::kInvalidArgument, "four-type: cluster size " +
                                          std::to_string(m) +
                                          " does not divide n = " +
                                          std::to_string(n));
  }
  for (const auto* v : {&spec.treated_exposed, &spec.treated, &spec.exposed,
                        &spec.none}) {
    for (double x : *v) {
      if (!std::isfinite(x)) {
        Fail(ErrorCode::kInvalidArgument, "four-type: non-finite outcome");
      }
    }
  }

  std::vector<std::uint32_t> clusters = spec.clusters;
  if (clusters.empty()) {
    clusters.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      clusters[i] = static_cast<std::uint32_t>(i / m);
    }
  } else if (clusters.size() != n) {
    Fail(ErrorCode::kInvalidArgument, "four-type: cluster list must have n entries");
  }
  std::map<std::uint32_t, std::vector<std::uint32_t>> members;
  for (std::size_t i = 0; i < n; ++i) {
    members[clusters[i]].push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<std::vector<std::uint32_t>> deps(n);
  for (const auto& [id, units] : members) {
    if (units.size() != m) {
      Fail(ErrorCode::kInvalidArgument,
           "four-type: cluster " + std::to_string(id) + " has " +
               std::to_string(units.size()) + " units, expected " +
               std::to_string(m));
    }
    for (auto i : units) {
      for (auto j : units) {
        if (i != j) deps[i].push_back(j);
      }
    }
  }

  SelfSpillEffects effects;
  for (std::size_t i = 0; i < n; ++i) {
    effects.self_exposed += spec.treated_exposed[i] - spec.exposed[i];
    effects.self_unexposed += spec.treated[i] - spec.none[i];
    effects.spill_treated += spec.treated_exposed[i] - spec.treated[i];
    effects.spill_control += spec.exposed[i] - spec.none[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  effects.self_exposed *= inv_n;
  effects.self_unexposed *= inv_n;
  effects.spill_treated *= inv_n;
  effects.spill_control *= inv_n;

  auto response = [te = spec.treated_exposed, t = spec.treated,
                   e = spec.exposed, none = spec.none](
                      std::size_t i, int own, std::size_t treated_mates) {
    const bool exposed = treated_mates > 0;
    if (own) return exposed ? te[i] : t[i];
    return exposed ? e[i] : none[i];
  };
  return FourTypeExposureModel{
      OutcomeModel::anonymous(
          "four_type", InterferenceGraph::from_neighbor_lists(std::move(deps)),
          std::move(response)),
      effects, std::move(clusters)};
}

OutcomeModel make_fig1_setting(const Fig1SettingSpec& spec) {
  if (spec.setting < 1 || spec.setting > 3) {
    Fail(ErrorCode::kInvalidArgument,
         "structural setting must be 1, 2 or 3, got " +
             std::to_string(spec.setting));
  }
  require_neighbors(spec.graph, "structural setting");
  std::vector<double> degree(spec.graph.size());
  for (std::size_t i = 0; i < degree.size(); ++i) {
    degree[i] = static_cast<double>(spec.graph.degree(i));
  }
  const std::string name = "fig1_setting" + std::to_string(spec.setting);

  switch (spec.setting) {
    case 1: {
      // Raw neighbor count over 300, not a fraction.
      auto response = [](std::size_t, int own, std::size_t treated) {
        return static_cast<double>(treated) / 300.0 + 2.0 * own / 3.0;
      };
      const double mean_degree =
          static_cast<double>(spec.graph.edge_count()) /
          static_cast<double>(spec.graph.size());
      return OutcomeModel::anonymous(
          name, spec.graph, response,
          ClosedFormEstimands{2.0 / 3.0, mean_degree / 300.0});
    }
    case 2: {
      auto response = [degree](std::size_t i, int own, std::size_t treated) {
        const double gap = 1.0 - static_cast<double>(treated) / degree[i];
        return 1.0 - gap * gap * (1.0 - own / 2.0);
      };
      return OutcomeModel::anonymous(name, spec.graph, std::move(response));
    }
    default: {
      auto response = [degree](std::size_t i, int own, std::size_t treated) {
        const double e = static_cast<double>(treated) / degree[i];
        const double c = e - 0.5;
        return own * (e - 3.0 * c * c * c);
      };
      return OutcomeModel::anonymous(name, spec.graph, std::move(response));
    }
  }
}

OutcomeModel make_diverging_anonymous(const DivergingAnonymousSpec& spec,
                                      std::size_t n) {
  const double p = spec.pi0;
  if (!(p > 0.0 && p < 1.0)) {
    Fail(ErrorCode::kOutOfRange, "diverging model: pi0 must be inside (0,1)");
  }
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "diverging model: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double scale = std::sqrt(nd * p * (1.0 - p));
  const double center = nd * p;
  auto response = [scale, center](std::size_t, int own, std::size_t treated) {
    return (static_cast<double>(treated + own) - center) / scale;
  };
  return OutcomeModel::anonymous(
      "diverging", InterferenceGraph::complete(n), response,
      ClosedFormEstimands{1.0 / scale, (nd - 1.0) / scale});
}

OutcomeModel make_peer_count(std::size_t n) {
  if (n < 2) Fail(ErrorCode::kInvalidArgument, "peer-count model needs n >= 2");
  auto response = [](std::size_t, int, std::size_t treated) {
    return static_cast<double>(treated);
  };
  return OutcomeModel::anonymous(
      "peer_count", InterferenceGraph::complete(n), response,
      ClosedFormEstimands{0.0, static_cast<double>(n - 1)});
}

OutcomeModel make_anonymous_table(const InterferenceGraph& graph,
                                  AnonymousTable table) {
  if (table.size() != graph.size()) {
    Fail(ErrorCode::kInvalidArgument, "anonymous table: one row per unit required");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (const auto& row : table[i]) {
      if (row.size() != graph.degree(i) + 1) {
        Fail(ErrorCode::kInvalidArgument,
             "anonymous table: unit " + std::to_string(i + 1) +
                 " needs degree+1 entries per treatment arm");
      }
    }
  }
  auto response = [table = std::move(table)](std::size_t i, int own,
                                             std::size_t treated) {
    return table[i][static_cast<std::size_t>(own)][treated];
  };
  return OutcomeModel::anonymous("anonymous_table", graph, std::move(response));
}

ClosedFormEstimands four_type_two_stage_closed_form(
    const SelfSpillEffects& effects, std::size_t m, double rho) {
  const double md = static_cast<double>(m);
  const double untreated_cluster_or_self = 1.0 - rho + rho / md;
  return ClosedFormEstimands{
      (rho - rho / md) * effects.self_exposed +
          untreated_cluster_or_self * effects.self_unexposed,
      (md - 1.0) * (rho / md * effects.spill_treated +
                    untreated_cluster_or_self * effects.spill_control)};
}

InterferenceGraph fig1_default_graph() {
  return InterferenceGraph::circulant(500, 50);
}

}  // namespace spillover
