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

#ifndef SPILLOVER_TREATMENT_HPP_
#define SPILLOVER_TREATMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace spillover {

// Binary assignment w in {0,1}^n. Unit indices are 0-based in the C++ API;
// the C API and all file formats are 1-based.
class TreatmentVector {
 public:
  TreatmentVector() = default;
  explicit TreatmentVector(std::size_t n) : bits_(n, 0) {}
  TreatmentVector(std::initializer_list<int> bits);
  explicit TreatmentVector(std::span<const std::uint8_t> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }

  // In-place coordinate assignment for callers that own a scratch vector.
  void set(std::size_t i, std::uint8_t x) { bits_[i] = x; }

  std::size_t count_treated() const noexcept;
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::string to_string() const;

  friend bool operator==(const TreatmentVector&,
                         const TreatmentVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Copy of w with coordinate i set to x. Throws kOutOfRange for bad i and
// kInvalidArgument for x not in {0,1}.
TreatmentVector flip(const TreatmentVector& w, std::size_t i, int x);

// Per-unit treatment probabilities, each strictly inside (0,1).
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  explicit ProbabilityVector(std::vector<double> pi);
  static ProbabilityVector constant(std::size_t n, double pi0);

  std::size_t size() const noexcept { return pi_.size(); }
  double operator[](std::size_t i) const { return pi_[i]; }
  std::span<const double> values() const noexcept { return pi_; }

  // Returns the common value if every entry is identical.
  bool is_constant() const noexcept;

  // pi + delta applied to every coordinate; must remain interior.
  ProbabilityVector shifted(double delta) const;

 private:
  std::vector<double> pi_;
};

}  // namespace spillover

#endif  // SPILLOVER_TREATMENT_HPP_
