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

#include "spillover/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spillover/error.hpp"

namespace spillover {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const CsvTable& t, std::size_t row, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    Fail(ErrorCode::kConfig, t.source + ": row " + std::to_string(row + 1) +
                                 ": '" + s + "' is not a finite number");
  }
  return v;
}

std::size_t parse_unit(const CsvTable& t, std::size_t row, const std::string& s,
                       std::size_t n) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1 ||
      static_cast<std::size_t>(v) > n) {
    Fail(ErrorCode::kConfig, t.source + ": row " + std::to_string(row + 1) +
                                 ": unit '" + s + "' outside 1.." +
                                 std::to_string(n));
  }
  return static_cast<std::size_t>(v - 1);
}

// Maps each row to its 0-based unit, requiring every unit exactly once.
std::vector<std::size_t> unit_order(const CsvTable& t, std::size_t unit_col) {
  const std::size_t n = t.rows.size();
  std::vector<std::size_t> order(n);
  std::vector<bool> seen(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    order[r] = parse_unit(t, r, t.rows[r][unit_col], n);
    if (seen[order[r]]) {
      Fail(ErrorCode::kConfig, t.source + ": unit " +
                                   std::to_string(order[r] + 1) +
                                   " listed twice");
    }
    seen[order[r]] = true;
  }
  return order;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  Fail(ErrorCode::kConfig, source + ": missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  CsvTable t;
  t.source = path;
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto fields = split(s);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      Fail(ErrorCode::kConfig, path + ": row " +
                                   std::to_string(t.rows.size() + 1) + " has " +
                                   std::to_string(fields.size()) +
                                   " fields, header has " +
                                   std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) Fail(ErrorCode::kConfig, path + ": missing header row");
  if (t.rows.empty()) Fail(ErrorCode::kConfig, path + ": no data rows");
  return t;
}

void load_saturated_params(const std::string& path, std::vector<double>& alpha,
                           std::vector<double>& beta) {
  const CsvTable t = read_csv(path);
  const auto order = unit_order(t, t.column("unit"));
  const std::size_t ca = t.column("alpha");
  const std::size_t cb = t.column("beta");
  alpha.assign(t.rows.size(), 0.0);
  beta.assign(t.rows.size(), 0.0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    alpha[order[r]] = parse_number(t, r, t.rows[r][ca]);
    beta[order[r]] = parse_number(t, r, t.rows[r][cb]);
  }
}

std::vector<std::vector<double>> load_nu_matrix(const std::string& path) {
  const CsvTable t = read_csv(path);
  const std::size_t n = t.rows.size();
  if (t.header.size() != n + 1) {
    Fail(ErrorCode::kConfig, path + ": expected unit column plus " +
                                 std::to_string(n) + " matrix columns");
  }
  const auto order = unit_order(t, 0);
  std::vector<std::vector<double>> nu(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      nu[order[r]][c] = parse_number(t, r, t.rows[r][c + 1]);
    }
  }
  return nu;
}

void load_four_type_outcomes(const std::string& path,
                             FourTypeExposureSpec& spec) {
  const CsvTable t = read_csv(path);
  const auto order = unit_order(t, t.column("unit"));
  const std::size_t n = t.rows.size();
  struct Target {
    const char* column;
    std::vector<double>* values;
  };
  const Target targets[] = {{"treated_exposed", &spec.treated_exposed},
                            {"treated", &spec.treated},
                            {"exposed", &spec.exposed},
                            {"none", &spec.none}};
  for (const auto& target : targets) {
    const std::size_t c = t.column(target.column);
    target.values->assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      (*target.values)[order[r]] = parse_number(t, r, t.rows[r][c]);
    }
  }
}

std::vector<std::uint32_t> load_cluster_partition(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto order = unit_order(t, t.column("unit"));
  const std::size_t cc = t.column("cluster");
  std::vector<std::uint32_t> clusters(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double v = parse_number(t, r, t.rows[r][cc]);
    if (v < 0 || v != std::floor(v) || v > 4e9) {
      Fail(ErrorCode::kConfig, path + ": row " + std::to_string(r + 1) +
                                   ": cluster label must be a nonnegative integer");
    }
    clusters[order[r]] = static_cast<std::uint32_t>(v);
  }
  return clusters;
}

}  // namespace spillover
