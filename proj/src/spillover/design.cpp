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

#include "spillover/design.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "spillover/error.hpp"

namespace spillover {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// C(k, t) as a double; only compared against limits.
double binomial_coefficient(std::size_t k, std::size_t t) {
  double c = 1.0;
  for (std::size_t r = 1; r <= t; ++r) {
    c = c * static_cast<double>(k - t + r) / static_cast<double>(r);
  }
  return std::round(c);
}

double two_stage_support_size(const TwoStageClusteredDesign& d) {
  return binomial_coefficient(d.cluster_count(), d.treated_clusters()) *
         std::pow(static_cast<double>(d.cluster_size()),
                  static_cast<double>(d.treated_clusters()));
}

void check_unit(std::size_t i, std::size_t n) {
  if (i >= n) {
    Fail(ErrorCode::kOutOfRange, "unit index " + std::to_string(i + 1) +
                                     " outside 1.." + std::to_string(n));
  }
}

}  // namespace

TwoStageClusteredDesign::TwoStageClusteredDesign(std::size_t n, std::size_t m,
                                                 double rho)
    : TwoStageClusteredDesign(n, m, rho, [&] {
        std::vector<std::uint32_t> ids(n);
        for (std::size_t i = 0; i < n; ++i) {
          ids[i] = static_cast<std::uint32_t>(m == 0 ? 0 : i / m);
        }
        return ids;
      }()) {}

TwoStageClusteredDesign::TwoStageClusteredDesign(
    std::size_t n, std::size_t m, double rho,
    std::vector<std::uint32_t> cluster_of)
    : n_(n), m_(m), rho_(rho) {
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "two-stage design: n = 0");
  if (m < 1 || n % m != 0) {
    Fail(ErrorCode::kInvalidArgument, "two-stage design: cluster size " +
                                          std::to_string(m) +
                                          " does not divide n = " +
                                          std::to_string(n));
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    Fail(ErrorCode::kOutOfRange, "two-stage design: rho must lie in [0,1]");
  }
  const double clusters = static_cast<double>(n / m);
  const double treated = rho * clusters;
  const double rounded = std::round(treated);
  if (std::abs(treated - rounded) > 1e-9 * std::max(1.0, clusters)) {
    std::ostringstream msg;
    msg << "two-stage design: rho * n/m = " << treated
        << " is not an integer";
    Fail(ErrorCode::kInvalidArgument, msg.str());
  }
  treated_clusters_ = static_cast<std::size_t>(rounded);

  if (cluster_of.size() != n) {
    Fail(ErrorCode::kInvalidArgument,
         "two-stage design: cluster assignment must list every unit");
  }
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_label;
  for (std::size_t i = 0; i < n; ++i) {
    by_label[cluster_of[i]].push_back(static_cast<std::uint32_t>(i));
  }
  cluster_of_.resize(n);
  for (auto& [label, units] : by_label) {
    if (units.size() != m) {
      Fail(ErrorCode::kInvalidArgument,
           "two-stage design: cluster " + std::to_string(label) + " has " +
               std::to_string(units.size()) + " units, expected " +
               std::to_string(m));
    }
    for (auto i : units) {
      cluster_of_[i] = static_cast<std::uint32_t>(members_.size());
    }
    members_.push_back(std::move(units));
  }
}

std::size_t design_size(const Design& design) {
  return std::visit([](const auto& d) { return d.size(); }, design);
}

bool is_bernoulli(const Design& design) {
  return std::holds_alternative<BernoulliDesign>(design);
}

std::string describe(const Design& design) {
  return std::visit(
      Overloaded{
          [](const BernoulliDesign& d) {
            std::ostringstream out;
            out.precision(17);
            out << "bernoulli:pi=";
            if (d.pi.is_constant()) {
              out << d.pi[0];
            } else {
              out << "per_unit";
            }
            return out.str();
          },
          [](const TwoStageClusteredDesign& d) {
            std::ostringstream out;
            out.precision(17);
            out << "two_stage:m=" << d.cluster_size() << ":rho=" << d.rho();
            return out.str();
          }},
      design);
}

SupportEnumerator::SupportEnumerator(const Design& design)
    : design_(&design), n_(design_size(design)) {
  if (const auto* b = std::get_if<BernoulliDesign>(&design)) {
    if (b->size() > kMaxBernoulliEnumerationUnits) {
      Fail(ErrorCode::kInfeasible,
           "Bernoulli support over " + std::to_string(b->size()) +
               " units exceeds the enumeration limit of " +
               std::to_string(kMaxBernoulliEnumerationUnits));
    }
    size_ = std::uint64_t{1} << b->size();
    return;
  }
  const auto& d = std::get<TwoStageClusteredDesign>(design);
  const double total = two_stage_support_size(d);
  if (total > static_cast<double>(kMaxTwoStageSupport)) {
    Fail(ErrorCode::kInfeasible,
         "two-stage support of size " + std::to_string(total) +
             " exceeds the enumeration limit of " +
             std::to_string(kMaxTwoStageSupport));
  }
  // Lexicographic treated-cluster subsets.
  const std::size_t k = d.cluster_count();
  const std::size_t t = d.treated_clusters();
  std::vector<std::uint32_t> subset(t);
  std::iota(subset.begin(), subset.end(), 0u);
  while (true) {
    cluster_subsets_.push_back(subset);
    std::size_t pos = t;
    while (pos > 0 && subset[pos - 1] == k - t + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t r = pos; r < t; ++r) subset[r] = subset[r - 1] + 1;
  }
  choices_per_subset_ = 1;
  for (std::size_t r = 0; r < t; ++r) choices_per_subset_ *= d.cluster_size();
  size_ = cluster_subsets_.size() * choices_per_subset_;
  point_probability_ = 1.0 / static_cast<double>(size_);
}

double SupportEnumerator::assign(std::uint64_t k, TreatmentVector& w) const {
  if (const auto* b = std::get_if<BernoulliDesign>(design_)) {
    double p = 1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::uint8_t bit = (k >> i) & 1u;
      w.set(i, bit);
      p *= bit ? b->pi[i] : 1.0 - b->pi[i];
    }
    return p;
  }
  const auto& d = std::get<TwoStageClusteredDesign>(*design_);
  for (std::size_t i = 0; i < n_; ++i) w.set(i, 0);
  const auto& subset = cluster_subsets_[k / choices_per_subset_];
  std::uint64_t choice = k % choices_per_subset_;
  for (auto c : subset) {
    const auto& units = d.members(c);
    w.set(units[choice % units.size()], 1);
    choice /= units.size();
  }
  return point_probability_;
}

bool support_enumerable(const Design& design) {
  if (const auto* b = std::get_if<BernoulliDesign>(&design)) {
    return b->size() <= kMaxBernoulliEnumerationUnits;
  }
  return two_stage_support_size(std::get<TwoStageClusteredDesign>(design)) <=
         static_cast<double>(kMaxTwoStageSupport);
}

DesignSupport enumerate_support(const Design& design) {
  SupportEnumerator support(design);
  DesignSupport out;
  out.reserve(support.size());
  TreatmentVector w(support.units());
  for (std::uint64_t k = 0; k < support.size(); ++k) {
    const double p = support.assign(k, w);
    out.push_back({w, p});
  }
  return out;
}

TreatmentVector sample_assignment(const Design& design, Rng& rng) {
  if (const auto* b = std::get_if<BernoulliDesign>(&design)) {
    TreatmentVector w(b->size());
    for (std::size_t i = 0; i < b->size(); ++i) {
      w.set(i, uniform01(rng) < b->pi[i] ? 1 : 0);
    }
    return w;
  }
  const auto& d = std::get<TwoStageClusteredDesign>(design);
  TreatmentVector w(d.size());
  std::vector<std::uint32_t> order(d.cluster_count());
  std::iota(order.begin(), order.end(), 0u);
  // Partial Fisher-Yates: the first T slots form a uniform T-subset.
  for (std::size_t r = 0; r < d.treated_clusters(); ++r) {
    const std::size_t pick =
        std::uniform_int_distribution<std::size_t>(r, order.size() - 1)(rng);
    std::swap(order[r], order[pick]);
    const auto& units = d.members(order[r]);
    const std::size_t unit =
        std::uniform_int_distribution<std::size_t>(0, units.size() - 1)(rng);
    w.set(units[unit], 1);
  }
  return w;
}

TreatmentVector threshold_assignment(std::span<const double> uniforms,
                                     const ProbabilityVector& pi) {
  if (uniforms.size() != pi.size()) {
    Fail(ErrorCode::kInvalidArgument, "uniform draws and pi differ in length");
  }
  TreatmentVector w(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    w.set(i, uniforms[i] < pi[i] ? 1 : 0);
  }
  return w;
}

double marginal_treatment_probability(const Design& design, std::size_t i) {
  check_unit(i, design_size(design));
  if (const auto* b = std::get_if<BernoulliDesign>(&design)) return b->pi[i];
  const auto& d = std::get<TwoStageClusteredDesign>(design);
  return d.rho() / static_cast<double>(d.cluster_size());
}

MateAssignmentLaw neighbor_marginal_law(const TwoStageClusteredDesign& design,
                                        std::size_t i) {
  check_unit(i, design.size());
  MateAssignmentLaw law;
  for (auto j : design.members(design.cluster_of(i))) {
    if (j != i) law.mates.push_back(j);
  }
  const double m = static_cast<double>(design.cluster_size());
  const double rho = design.rho();
  const double p_none = 1.0 - rho + rho / m;
  const double p_single = rho / m;
  law.outcomes.emplace_back(TreatmentVector(law.mates.size()), p_none);
  if (p_single > 0.0) {
    for (std::size_t k = 0; k < law.mates.size(); ++k) {
      TreatmentVector e(law.mates.size());
      e.set(k, 1);
      law.outcomes.emplace_back(std::move(e), p_single);
    }
  }
  return law;
}

}  // namespace spillover
