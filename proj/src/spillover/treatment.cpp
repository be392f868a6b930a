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

#include "spillover/treatment.hpp"

#include <algorithm>
#include <cmath>

#include "spillover/error.hpp"

namespace spillover {

TreatmentVector::TreatmentVector(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) {
      Fail(ErrorCode::kInvalidArgument, "treatment entries must be 0 or 1");
    }
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

TreatmentVector::TreatmentVector(std::span<const std::uint8_t> bits)
    : bits_(bits.begin(), bits.end()) {
  for (auto b : bits_) {
    if (b > 1) {
      Fail(ErrorCode::kInvalidArgument, "treatment entries must be 0 or 1");
    }
  }
}

std::size_t TreatmentVector::count_treated() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::string TreatmentVector::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

TreatmentVector flip(const TreatmentVector& w, std::size_t i, int x) {
  if (i >= w.size()) {
    Fail(ErrorCode::kOutOfRange, "unit index " + std::to_string(i + 1) +
                                     " outside 1.." + std::to_string(w.size()));
  }
  if (x != 0 && x != 1) {
    Fail(ErrorCode::kInvalidArgument, "treatment value must be 0 or 1");
  }
  TreatmentVector out = w;
  out.set(i, static_cast<std::uint8_t>(x));
  return out;
}

ProbabilityVector::ProbabilityVector(std::vector<double> pi)
    : pi_(std::move(pi)) {
  if (pi_.empty()) {
    Fail(ErrorCode::kInvalidArgument, "probability vector is empty");
  }
  for (std::size_t i = 0; i < pi_.size(); ++i) {
    const double p = pi_[i];
    if (!std::isfinite(p) || p <= 0.0 || p >= 1.0) {
      Fail(ErrorCode::kOutOfRange, "pi[" + std::to_string(i + 1) +
                                       "] = " + std::to_string(p) +
                                       " is not strictly inside (0,1)");
    }
  }
}

ProbabilityVector ProbabilityVector::constant(std::size_t n, double pi0) {
  return ProbabilityVector(std::vector<double>(n, pi0));
}

bool ProbabilityVector::is_constant() const noexcept {
  return std::all_of(pi_.begin(), pi_.end(),
                     [&](double p) { return p == pi_.front(); });
}

ProbabilityVector ProbabilityVector::shifted(double delta) const {
  std::vector<double> out(pi_);
  for (double& p : out) p += delta;
  return ProbabilityVector(std::move(out));
}

}  // namespace spillover
