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

#ifndef SPILLOVER_IO_HPP_
#define SPILLOVER_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "spillover/model_zoo.hpp"

namespace spillover {

// Shortest round-trip-safe text for x with 17 significant digits, '.'
// decimal point, "nan"/"inf" for non-finite values. Locale independent.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws kConfig naming the file if absent.
  std::size_t column(const std::string& name) const;
  std::string source;
};

// Comma-separated, header row required, blank lines and '#' lines skipped,
// fields trimmed.
CsvTable read_csv(const std::string& path);

// Columns unit, alpha, beta. Units 1-indexed, each exactly once.
void load_saturated_params(const std::string& path, std::vector<double>& alpha,
                           std::vector<double>& beta);

// Square matrix: first column the 1-indexed unit i, then nu[i][1..n].
std::vector<std::vector<double>> load_nu_matrix(const std::string& path);

// Columns unit, treated_exposed, treated, exposed, none.
void load_four_type_outcomes(const std::string& path, FourTypeExposureSpec& spec);

// Columns unit, cluster. Returns cluster labels indexed by 0-based unit.
std::vector<std::uint32_t> load_cluster_partition(const std::string& path);

}  // namespace spillover

#endif  // SPILLOVER_IO_HPP_
