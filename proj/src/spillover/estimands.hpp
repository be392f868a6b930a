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

#ifndef SPILLOVER_ESTIMANDS_HPP_
#define SPILLOVER_ESTIMANDS_HPP_

#include <cstdint>
#include <string>

#include "spillover/design.hpp"
#include "spillover/model.hpp"
#include "spillover/parallel.hpp"

namespace spillover {

enum class Method { kExact, kAnonymousBinomial, kMonteCarlo };
enum class MethodChoice { kAuto, kExact, kAnonymousBinomial, kMonteCarlo };

std::string to_string(Method method);

// Direct, indirect, overall and infinitesimal-policy effects of one
// (model, design) pair. aoe is always ade + aie as computed. inf is NaN when
// the design is not Bernoulli, where the policy derivative is undefined.
struct EstimandReport {
  double ade = 0.0;
  double aie = 0.0;
  double aoe = 0.0;
  double inf = 0.0;
  Method method = Method::kExact;
  std::uint64_t replications = 0;  // Monte Carlo only
  double se_ade = 0.0;
  double se_aie = 0.0;
  double se_aoe = 0.0;
};

// Exact expectations by enumerating the design support. Throws kInfeasible
// when the support is too large.
double ade_exact(const OutcomeModel& model, const Design& design,
                 const ExecPolicy& exec = {});
double aie_exact(const OutcomeModel& model, const Design& design,
                 const ExecPolicy& exec = {});
// ade and aie from a single pass; inf from inf_analytic for Bernoulli designs.
EstimandReport estimands_exact(const OutcomeModel& model, const Design& design,
                               const ExecPolicy& exec = {});

// Averages the per-draw direct and indirect contrasts over R draws of the
// design. Draw r uses stream_rng(seed, r). inf is reported as the overall
// effect estimate for Bernoulli designs.
EstimandReport estimands_monte_carlo(const OutcomeModel& model,
                                     const Design& design, std::uint64_t R,
                                     std::uint64_t seed,
                                     const ExecPolicy& exec = {});

// Empty string when the binomial fast path applies: anonymous model, every
// unit with the same number of dependencies, constant-pi Bernoulli design.
// Otherwise the reason it does not.
std::string binomial_path_unavailable(const OutcomeModel& model,
                                      const Design& design);

// Exact values for anonymous models on regular dependency graphs under
// constant-pi Bernoulli designs, via binomial weights over the treated
// neighbor count. inf is the derivative of mean_outcome_anonymous_binomial.
EstimandReport estimands_anonymous_binomial(const OutcomeModel& model,
                                            double pi0);

// V(pi) = E_pi[(1/n) sum_i Y_i].
double mean_outcome_exact(const OutcomeModel& model, const Design& design,
                          const ExecPolicy& exec = {});
double mean_outcome_anonymous_binomial(const OutcomeModel& model, double pi0);

// Binomial(d, p) probability masses for b = 0..d.
std::vector<double> binomial_pmf(std::size_t d, double p);

enum class DifferenceMode { kExact, kMonteCarlo };

struct FiniteDifferenceOptions {
  double step = 1e-4;
  DifferenceMode mode = DifferenceMode::kExact;
  std::uint64_t replications = 10'000;  // Monte Carlo only
  std::uint64_t seed = 0;
  ExecPolicy exec;
};

struct FiniteDifferenceResult {
  double value = 0.0;
  double standard_error = 0.0;  // zero in exact mode
};

// Central difference [V(pi + h 1) - V(pi - h 1)] / 2h along the all-ones
// direction. Monte Carlo mode evaluates both sides on shared uniforms.
FiniteDifferenceResult inf_finite_difference(
    const OutcomeModel& model, const ProbabilityVector& pi,
    const FiniteDifferenceOptions& options = {});

// sum_k dV/dpi_k, each partial derivative taken as the expected contrast
// over W_{-k} alone (the design marginal with unit k removed).
double inf_analytic(const OutcomeModel& model, const BernoulliDesign& design,
                    const ExecPolicy& exec = {});

// (1/n) sum_i {E(Y_i | W_i = 1) - E(Y_i | W_i = 0)} by enumeration.
double hh_de(const OutcomeModel& model, const Design& design,
             const ExecPolicy& exec = {});

// (1/n) sum_i [E_{pi'} Y_i(w_i = 0; W_-i) - E_pi Y_i(w_i = 0; W_-i)].
double ie_two_bernoulli(const OutcomeModel& model, const ProbabilityVector& pi,
                        const ProbabilityVector& pi_prime,
                        const ExecPolicy& exec = {});

// Dispatches on `choice`. kAuto tries exact, then binomial, then Monte Carlo
// and records the method it used. An explicit choice that cannot run throws
// kInfeasible.
EstimandReport compute_estimands(const OutcomeModel& model,
                                 const Design& design, MethodChoice choice,
                                 std::uint64_t R, std::uint64_t seed,
                                 const ExecPolicy& exec = {});

}  // namespace spillover

#endif  // SPILLOVER_ESTIMANDS_HPP_
