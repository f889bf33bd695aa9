// Copyright 2026 The sqzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// sqzsim command-line front end.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sqz/sqz.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> duration_scale;
  bool check = false;
};

int run(const std::string& scenario, const Flags& f) {
  sqz::ExperimentConfig base;
  base.scenario = scenario;
  sqz::ExperimentConfig cfg = f.config.empty() ? base : sqz::load_config(f.config, base);
  cfg.scenario = scenario;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_dir = *f.out;
  if (f.duration_scale) cfg.duration_scale = *f.duration_scale;
  if (const auto errs = sqz::check_config(cfg); !errs.empty()) throw sqz::SchemaError(sqz::join_errors(errs));

  const sqz::ScenarioOutput out = sqz::run_scenario(cfg);
  sqz::write_outputs(out, cfg.output_dir);
  for (const auto& [name, ok] : out.checks) std::printf("%s: %s\n", ok ? "PASS" : "FAIL", name.c_str());
  if (scenario == "lock-demo" && !out.lock.acquired) {
    std::fprintf(stderr, "sqzsim: %s\n", out.lock.report.c_str());
    return 3;
  }
  return f.check && !out.passed() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light interferometry simulator"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "key = value configuration file");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--duration-scale", flags.duration_scale, "fraction of the 1.5 h locked run to simulate");
  app.add_flag("--check", flags.check, "exit nonzero when a scenario check fails");
  app.fallthrough();
  for (const auto& name : sqz::known_scenarios()) app.add_subcommand(name, "run the " + name + " scenario");

  CLI11_PARSE(app, argc, argv);
  try {
    return run(app.get_subcommands().front()->get_name(), flags);
  } catch (const sqz::SchemaError& e) {
    std::fprintf(stderr, "sqzsim: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sqzsim: error: %s\n", e.what());
    return 4;
  }
}
