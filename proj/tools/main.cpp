// Copyright 2026 The cqrabi Authors
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

#include <CLI11.hpp>

#include "cqrabi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Driven multi-qubit Rabi model simulator"};
  app.require_subcommand(1, 1);

  cqrabi::RunOptions opts;
  std::uint64_t seed = 0;
  std::int64_t trajectories = 0;
  int fock_dim = 0;

  const auto add_run = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory (overrides 'out' in the config)");
    sub->add_option("--seed", seed, "master seed for trajectory sampling");
    sub->add_option("--trajectories", trajectories, "number of quantum trajectories")->check(CLI::PositiveNumber);
    sub->add_option("--fock-dim", fock_dim, "resonator truncation")->check(CLI::Range(2, 100000));
    return sub;
  };
  add_run("scan", "fidelity of the full model against the effective model");
  add_run("gate", "two-qubit gate: entangling power, CNOT equivalence, process fidelity");
  add_run("cat", "cat-state preparation and spin measurement");
  add_run("ghz", "GHZ-state preparation");
  CLI::App* validate = app.add_subcommand("validate", "run the built-in invariant suite");
  validate->add_option("--out", opts.out_dir, "optional directory for validation.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cqrabi::kExitOk : cqrabi::kExitConfig;
  }

  for (const auto* sub : app.get_subcommands()) {
    opts.subcommand = sub->get_name();
    const auto given = [sub](const char* name) {
      const CLI::Option* o = sub->get_option_no_throw(name);
      return o != nullptr && o->count() > 0;
    };
    if (given("--seed")) opts.seed = seed;
    if (given("--trajectories")) opts.trajectories = trajectories;
    if (given("--fock-dim")) opts.fock_dim = fock_dim;
  }
  return cqrabi::run_command(opts);
}
