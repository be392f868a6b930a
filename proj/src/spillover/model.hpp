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

#ifndef SPILLOVER_MODEL_HPP_
#define SPILLOVER_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spillover/graph.hpp"
#include "spillover/random.hpp"
#include "spillover/treatment.hpp"

namespace spillover {

// y(i, w): outcome of unit i under the full assignment w.
using OutcomeFn = std::function<double(std::size_t, const TreatmentVector&)>;

// f_i(own, b): outcome of unit i given its own treatment and the number b of
// treated units among its dependencies.
using AnonymousResponseFn =
    std::function<double(std::size_t, int, std::size_t)>;

// Design-free estimand values some structural models carry with them.
struct ClosedFormEstimands {
  double ade = 0.0;
  double aie = 0.0;
};

// Deterministic potential-outcome model. dependencies().neighbors(i) lists
// every unit whose treatment may move y(i, .); the model promises that
// y(i, w) ignores all other coordinates. Immutable after construction, so a
// single instance may be evaluated concurrently.
class OutcomeModel {
 public:
  static OutcomeModel general(std::string name, InterferenceGraph dependencies,
                              OutcomeFn outcome,
                              std::optional<ClosedFormEstimands> closed = {});

  // Anonymous interference: the outcome is built from f_i(w_i, b).
  static OutcomeModel anonymous(std::string name,
                                InterferenceGraph dependencies,
                                AnonymousResponseFn response,
                                std::optional<ClosedFormEstimands> closed = {});

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return dependencies_.size(); }
  const InterferenceGraph& dependencies() const noexcept {
    return dependencies_;
  }

  double outcome(std::size_t i, const TreatmentVector& w) const {
    return outcome_(i, w);
  }

  bool is_anonymous() const noexcept { return static_cast<bool>(response_); }
  double response(std::size_t i, int own, std::size_t treated) const {
    return response_(i, own, treated);
  }

  const std::optional<ClosedFormEstimands>& closed_form() const noexcept {
    return closed_;
  }

 private:
  OutcomeModel() = default;

  std::string name_;
  InterferenceGraph dependencies_;
  OutcomeFn outcome_;
  AnonymousResponseFn response_;
  std::optional<ClosedFormEstimands> closed_;
};

struct NoiseSpec {
  enum class Kind { kNone, kGaussian };
  Kind kind = Kind::kNone;
  double sigma = 0.0;

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(double sigma);
};

// (y(1,w) + e_1, ..., y(n,w) + e_n) with e_i i.i.d. N(0, sigma^2) drawn from
// rng, or no noise at all for Kind::kNone (rng untouched).
std::vector<double> evaluate_outcomes(const OutcomeModel& model,
                                      const TreatmentVector& w,
                                      const NoiseSpec& noise, Rng& rng);

struct LocalityViolation {
  enum class Kind { kDependency, kAnonymity };
  Kind kind = Kind::kDependency;
  std::size_t unit = 0;   // i
  std::size_t other = 0;  // j flipped (or swapped with, for kAnonymity)
  TreatmentVector assignment;
};

struct LocalityReport {
  bool passed = true;
  std::size_t probes = 0;
  std::optional<LocalityViolation> violation;  // first one found

  std::string describe() const;
};

// Random probes of the dependency contract: for random w, i and a random j
// outside {i} and `claimed.neighbors(i)`, y(i, w_j=0) must equal
// y(i, w_j=1). Anonymous models are additionally probed for invariance under
// swaps inside the dependency set.
LocalityReport check_locality(const OutcomeModel& model, std::size_t probes,
                              std::uint64_t seed);

// Same probe with an externally supplied graph in place of the model's own
// dependency sets; passing means the graph appears to be a superset of the
// true interference structure.
LocalityReport check_locality_against(const OutcomeModel& model,
                                      const InterferenceGraph& claimed,
                                      std::size_t probes, std::uint64_t seed);

}  // namespace spillover

#endif  // SPILLOVER_MODEL_HPP_
