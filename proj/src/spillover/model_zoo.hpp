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

#ifndef SPILLOVER_MODEL_ZOO_HPP_
#define SPILLOVER_MODEL_ZOO_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "spillover/graph.hpp"
#include "spillover/model.hpp"

namespace spillover {

// Y_i = b1 + b2 W_i + b3 * (treated neighbors of i) / (neighbors of i).
struct LinearInMeansSpec {
  InterferenceGraph graph;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
};

// Y_i = alpha_i + beta_i W_i + sum_{j != i} nu[i][j] W_j.
struct SaturatedLinearSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::vector<double>> nu;  // n x n, zero diagonal
};

// Four potential outcomes per unit, selected by own treatment and whether
// any cluster mate is treated.
struct FourTypeExposureSpec {
  std::size_t cluster_size = 2;
  // cluster[i] = cluster id of unit i; empty means contiguous blocks.
  std::vector<std::uint32_t> clusters;
  std::vector<double> treated_exposed;
  std::vector<double> treated;
  std::vector<double> exposed;
  std::vector<double> none;
};

// Sample averages of the four-type contrasts.
struct SelfSpillEffects {
  double self_exposed = 0.0;    // mean(treated&exposed - exposed)
  double self_unexposed = 0.0;  // mean(treated - none)
  double spill_treated = 0.0;   // mean(treated&exposed - treated)
  double spill_control = 0.0;   // mean(exposed - none)
};

struct FourTypeExposureModel {
  OutcomeModel model;
  SelfSpillEffects effects;
  std::vector<std::uint32_t> clusters;
};

struct Fig1SettingSpec {
  int setting = 1;  // 1, 2 or 3
  InterferenceGraph graph;
};

// Y_i(w) = (sum_j w_j - n pi0) / sqrt(n pi0 (1 - pi0)); every unit depends
// on every other one.
struct DivergingAnonymousSpec {
  double pi0 = 0.5;
};

OutcomeModel make_linear_in_means(const LinearInMeansSpec& spec);
OutcomeModel make_saturated_linear(const SaturatedLinearSpec& spec);
FourTypeExposureModel make_four_type_exposure(const FourTypeExposureSpec& spec);
OutcomeModel make_fig1_setting(const Fig1SettingSpec& spec);
OutcomeModel make_diverging_anonymous(const DivergingAnonymousSpec& spec,
                                      std::size_t n);

// y(i, w) = number of treated units other than i. No direct effect at all,
// but strongly correlated with W_i under designs that fix the treated count.
OutcomeModel make_peer_count(std::size_t n);

// Arbitrary anonymous response table: table[i][x][b] for own treatment x and
// b treated dependencies, b = 0..degree(i).
using AnonymousTable = std::vector<std::array<std::vector<double>, 2>>;
OutcomeModel make_anonymous_table(const InterferenceGraph& graph,
                                  AnonymousTable table);

// Direct and indirect effects of the four-type model under the two-stage
// clustered design with cluster size m and treated-cluster fraction rho.
ClosedFormEstimands four_type_two_stage_closed_form(
    const SelfSpillEffects& effects, std::size_t m, double rho);

// The default graph for the three structural settings: 500 units on a ring,
// each adjacent to 50 predecessors and 50 successors (degree 100).
InterferenceGraph fig1_default_graph();

}  // namespace spillover

#endif  // SPILLOVER_MODEL_ZOO_HPP_
