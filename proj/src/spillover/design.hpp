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

#ifndef SPILLOVER_DESIGN_HPP_
#define SPILLOVER_DESIGN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spillover/random.hpp"
#include "spillover/treatment.hpp"

namespace spillover {

// Independent W_i ~ Bernoulli(pi_i).
struct BernoulliDesign {
  ProbabilityVector pi;

  std::size_t size() const noexcept { return pi.size(); }
};

// rho * (n/m) clusters drawn without replacement; one uniformly chosen unit in
// each drawn cluster is treated, everyone else is control.
class TwoStageClusteredDesign {
 public:
  // Contiguous clusters {1..m}, {m+1..2m}, ...
  TwoStageClusteredDesign(std::size_t n, std::size_t m, double rho);
  // cluster_of[i] = arbitrary cluster label of unit i; every label must be
  // used exactly m times.
  TwoStageClusteredDesign(std::size_t n, std::size_t m, double rho,
                          std::vector<std::uint32_t> cluster_of);

  std::size_t size() const noexcept { return n_; }
  std::size_t cluster_size() const noexcept { return m_; }
  double rho() const noexcept { return rho_; }
  std::size_t cluster_count() const noexcept { return members_.size(); }
  std::size_t treated_clusters() const noexcept { return treated_clusters_; }
  const std::vector<std::uint32_t>& members(std::size_t c) const {
    return members_[c];
  }
  std::size_t cluster_of(std::size_t i) const { return cluster_of_[i]; }

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  double rho_ = 0.0;
  std::size_t treated_clusters_ = 0;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<std::uint32_t> cluster_of_;  // dense 0-based cluster index
};

using Design = std::variant<BernoulliDesign, TwoStageClusteredDesign>;

std::size_t design_size(const Design& design);
bool is_bernoulli(const Design& design);
// Short comma-free label for CSV output, e.g. "bernoulli:pi=0.5".
std::string describe(const Design& design);

struct SupportPoint {
  TreatmentVector w;
  double probability = 0.0;
};
using DesignSupport = std::vector<SupportPoint>;

inline constexpr std::size_t kMaxBernoulliEnumerationUnits = 20;
inline constexpr std::uint64_t kMaxTwoStageSupport = 1'000'000;

// Random access into the support of a design, in a fixed order. Throws
// kInfeasible when the support exceeds the enumeration limits.
class SupportEnumerator {
 public:
  explicit SupportEnumerator(const Design& design);

  std::uint64_t size() const noexcept { return size_; }
  std::size_t units() const noexcept { return n_; }
  // Writes the k-th support point into w (which must have n entries) and
  // returns its probability.
  double assign(std::uint64_t k, TreatmentVector& w) const;

 private:
  const Design* design_;
  std::size_t n_ = 0;
  std::uint64_t size_ = 0;
  // two-stage: every treated-cluster subset, plus m^T unit choices each
  std::vector<std::vector<std::uint32_t>> cluster_subsets_;
  std::uint64_t choices_per_subset_ = 1;
  double point_probability_ = 0.0;
};

// True when the design's support fits within the enumeration limits.
bool support_enumerable(const Design& design);

DesignSupport enumerate_support(const Design& design);

TreatmentVector sample_assignment(const Design& design, Rng& rng);

// W_i = 1{u_i < pi_i}: the Bernoulli draw driven by caller-held uniforms, so
// two nearby probability vectors can share the same randomness.
TreatmentVector threshold_assignment(std::span<const double> uniforms,
                                     const ProbabilityVector& pi);

// P(W_i = 1); i is 0-based.
double marginal_treatment_probability(const Design& design, std::size_t i);

// Law of the treatments of unit i's cluster mates under the two-stage
// design. Only positive-probability outcomes are listed.
struct MateAssignmentLaw {
  std::vector<std::uint32_t> mates;  // 0-based, in cluster order
  std::vector<std::pair<TreatmentVector, double>> outcomes;
};
MateAssignmentLaw neighbor_marginal_law(const TwoStageClusteredDesign& design,
                                        std::size_t i);

}  // namespace spillover

#endif  // SPILLOVER_DESIGN_HPP_
