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

#ifndef SPILLOVER_RUNNER_HPP_
#define SPILLOVER_RUNNER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/design.hpp"
#include "spillover/estimands.hpp"
#include "spillover/estimators.hpp"
#include "spillover/model.hpp"
#include "spillover/parallel.hpp"

namespace spillover::runner {

enum class Task { kEstimands, kEstimators, kFig1, kVerifyTheorem1, kValidateConfig };

std::optional<Task> parse_task(std::string_view name);
std::string_view task_name(Task task);

// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> method;
  std::optional<std::uint64_t> replications;
  std::optional<unsigned> workers;
};

struct Sweep {
  double start = 0.1;
  double stop = 0.9;
  std::size_t steps = 81;  // number of grid points, endpoints included

  std::vector<double> points() const;
};

struct BatterySpec {
  std::size_t instances = 24;
  std::size_t max_n = 12;
  bool linear = false;
  // Differentiates along the first coordinate only; the battery must fail.
  bool negative_control = false;
  double tolerance = 1e-6;
};

// A validated, fully built experiment. Everything is constructed at load
// time so every problem surfaces before any work starts.
struct Experiment {
  std::optional<Task> task;  // from the config's "task" key, if present
  std::uint64_t seed = 0;
  std::uint64_t replications = 10'000;
  MethodChoice method = MethodChoice::kAuto;
  ExecPolicy exec;
  std::string output;  // empty: standard output
  double fd_step = 1e-4;
  std::size_t locality_probes = 1000;

  std::optional<OutcomeModel> model;
  std::optional<Design> design;
  std::optional<Sweep> sweep;
  NoiseSpec noise;
  std::optional<InterferenceGraph> analyst_graph;
  std::optional<InterferenceGraph> fig1_graph;
  BatterySpec battery;
};

// Parses JSON config text. Relative file paths resolve against base_dir.
// Throws Error(kConfig) naming the offending key path, e.g. "design.pi[2]".
Experiment parse_experiment(const std::string& text, const std::string& base_dir,
                            const Overrides& overrides = {});
Experiment load_experiment(const std::string& path,
                           const Overrides& overrides = {});

// Throws kConfig when the sections `task` needs are missing or unusable.
void require_sections(const Experiment& experiment, Task task);

struct EstimandRow {
  std::optional<double> pi0;
  EstimandReport report;
  std::uint64_t seed = 0;
};

std::vector<EstimandRow> run_estimands(const Experiment& experiment);
void write_estimands_csv(std::ostream& out, const Experiment& experiment,
                         const std::vector<EstimandRow>& rows);

ReplicationReport run_estimators(const Experiment& experiment);
void write_replication_csv(std::ostream& out, const ReplicationReport& report);

struct Fig1Row {
  double pi0 = 0.0;
  double ade = 0.0;
  double aie = 0.0;
  double inf = 0.0;
  double mean_outcome = 0.0;
};
// One table per structural setting (index 0 = setting 1).
std::vector<std::vector<Fig1Row>> run_fig1(const Experiment& experiment);
void write_fig1_csv(std::ostream& out, const std::vector<Fig1Row>& rows);

struct BatteryRow {
  std::size_t instance = 0;
  std::size_t n = 0;
  std::size_t edges = 0;
  double ade = 0.0;
  double aie = 0.0;
  double inf_fd = 0.0;
  double inf_analytic = 0.0;
  double residual = 0.0;
  bool passed = false;
};
struct BatteryReport {
  std::vector<BatteryRow> rows;
  bool passed = true;
  double max_residual = 0.0;
};
BatteryReport run_verify_theorem1(const Experiment& experiment);
void write_battery_csv(std::ostream& out, const BatteryReport& report);

struct TaskResult {
  bool verification_passed = true;
  std::string summary;  // one line for the log
  std::vector<std::string> files;
};

// Loads the config, runs `task` and writes its output (to the configured
// path, or to `stdout_sink` when none is set). Errors propagate as Error.
TaskResult run_task(Task task, const std::string& config_path,
                    const Overrides& overrides, std::ostream& stdout_sink);

}  // namespace spillover::runner

#endif  // SPILLOVER_RUNNER_HPP_
