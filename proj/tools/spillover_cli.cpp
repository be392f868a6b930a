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

// Command-line front end. Every subcommand reads an experiment config and
// hands it to the library through its C interface.
//
// Exit codes: 0 success, 1 configuration or precondition error,
// 2 infeasible request, 3 verification battery failure.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spillover/spillover.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<std::uint64_t> replications;
  std::optional<unsigned> workers;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--out", f.out, "Output file, or directory for fig1");
  cmd->add_option("--method", f.method, "auto, exact, binomial or mc")
      ->check(CLI::IsMember({"auto", "exact", "binomial", "mc"}));
  cmd->add_option("--replications", f.replications,
                  "Monte Carlo replications")
      ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1'000'000'000}));
  cmd->add_option("--workers", f.workers, "Worker threads")
      ->check(CLI::Range(1u, 1024u));
}

int exit_code(sp_status status) {
  switch (status) {
    case SP_OK:
      return 0;
    case SP_ERR_INFEASIBLE:
      return 2;
    case SP_ERR_VERIFICATION_FAILED:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimands and estimators under network interference"};
  app.set_version_flag("--version", std::string(sp_version()));
  app.require_subcommand(1);

  Flags flags;
  const struct {
    const char* name;
    const char* help;
    sp_task task;
  } commands[] = {
      {"estimands", "Compute ADE, AIE, AOE and INF for a model and design",
       SP_TASK_ESTIMANDS},
      {"estimators", "Replicate the HT estimators and report their bias",
       SP_TASK_ESTIMATORS},
      {"fig1", "Sweep the three structural settings over pi", SP_TASK_FIG1},
      {"verify-theorem1",
       "Check AOE against a numerical derivative on random instances",
       SP_TASK_VERIFY_THEOREM1},
      {"validate-config", "Parse and check a config without running it",
       SP_TASK_VALIDATE_CONFIG},
  };
  for (const auto& c : commands) add_flags(app.add_subcommand(c.name, c.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  sp_task task = SP_TASK_VALIDATE_CONFIG;
  for (const auto& c : commands) {
    if (app.got_subcommand(c.name)) task = c.task;
  }

  sp_run_options options{};
  options.config_path = flags.config.c_str();
  options.has_seed = flags.seed ? 1 : 0;
  options.seed = flags.seed.value_or(0);
  options.output = flags.out ? flags.out->c_str() : nullptr;
  options.method = flags.method ? flags.method->c_str() : nullptr;
  options.replications = flags.replications.value_or(0);
  options.workers = flags.workers.value_or(0);

  const sp_status status = sp_run_task(task, &options);
  if (status == SP_OK) {
    std::fprintf(stderr, "%s\n", sp_last_run_summary());
  } else {
    std::fprintf(stderr, "error (%s): %s\n", sp_status_name(status),
                 sp_last_error_message());
  }
  return exit_code(status);
}
