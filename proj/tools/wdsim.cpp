// Copyright 2026 The wdsim Authors
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

// wdsim command line: run, sweep and validate JSON scenarios.
//
// Exit codes: 0 success, 1 internal error, 2 config/schema error,
// 3 physics guard, 4 numeric failure.

#include "wdsim/common.hpp"
#include "wdsim/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace wds;

// --out beats WDSIM_OUT_DIR beats out/<scenario name>.
fs::path output_dir(const std::optional<std::string>& flag, const scenario::ScenarioConfig& cfg) {
  if (flag) return *flag;
  if (const char* env = std::getenv("WDSIM_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return fs::path("out") / cfg.name;
}

int fail(int code, const char* kind, const std::exception& e) {
  std::cerr << "wdsim: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence-free and weak-decoherence subspace simulator"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out;
  unsigned jobs = 0;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("config", config, "Scenario JSON")->required();
  run->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run the scenario's parameter grid");
  sweep->add_option("config", config, "Scenario JSON")->required();
  sweep->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  sweep->add_option("--out", out, "Output directory");

  auto* check = app.add_subcommand("validate", "Check a scenario without running it");
  check->add_option("config", config, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto cfg = scenario::load_config(config);
    if (*check) {
      scenario::validate(cfg);
      std::cout << "ok: " << cfg.name << " (" << scenario::expand_sweep(cfg).size() << " point(s))\n";
      return 0;
    }
    const fs::path dir = output_dir(out, cfg);
    if (*run) {
      const auto report = scenario::run_scenario(cfg, dir);
      std::cout << (dir / "report.json").string() << '\n' << report["summary"].dump() << '\n';
    } else {
      const auto report = scenario::run_sweep(cfg, dir, jobs);
      std::cout << (dir / "summary.csv").string() << " (" << report["points"].size() << " point(s))\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    return fail(2, "config error", e);
  } catch (const PhysicsGuardError& e) {
    return fail(3, "physics guard", e);
  } catch (const NumericError& e) {
    return fail(4, "numeric failure", e);
  } catch (const std::exception& e) {
    return fail(1, "error", e);
  }
}
