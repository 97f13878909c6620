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

// Config-driven runs: JSON scenario in, CSV time series and a JSON report out.
//
// Scenario layout (see README for the full schema):
//
//   {"name": "...", "model": "markovian_n" | "realistic_two" | "nonmarkovian_two",
//    "params": {...}, "initial_state": {...}, "time": {"t_max": T, "steps": n},
//    "truncation": {"max_excitation": M}, "outputs": [...], "fit_window": [a, b],
//    "stepper": {"step": h, "richardson": false}, "sweep": [...], "sweep_cap": 10000,
//    "seed": 0}

#pragma once

#include "wdsim/common.hpp"
#include "wdsim/coupling.hpp"
#include "wdsim/lindblad.hpp"
#include "wdsim/memory_kernel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wds::scenario {

enum class ModelKind { kMarkovianN, kRealisticTwo, kNonMarkovianTwo };

struct MarkovianParams {
  std::vector<double> k;
  double omega = 1.0;
  double nbar = 0.0;
  std::optional<CVector> G;
};

struct RealisticParams {
  double k1 = 0.0, k2 = 0.0;
  Complex k3;
  double omega1 = 1.0, omega2 = 1.0;
  bool allow_unphysical = false;
};

struct NonMarkovianParams {
  CVector G;
  double omega = 1.0;
  memory::SpectralDensity bath;
  double beta = std::numeric_limits<double>::infinity();
  memory::KernelSign sign = memory::KernelSign::kConjugate;
  std::size_t kernel_points = 10000;  // minimum kernel grid intervals
};

/// alpha/phi may be the presets "wd" or "sd" in the source JSON; they are
/// resolved to numbers at parse time.
struct AnglesState {
  double alpha = 0.0;
  double phi = 0.0;
};
struct OccupationState {
  std::vector<int> occupations;
};
struct DfsState {
  CMatrix coeffs;
};
using InitialState = std::variant<AnglesState, OccupationState, DfsState>;

struct SweepAxis {
  std::string param;  // "alpha", "phi", a params key, or a JSON pointer
  std::vector<double> values;
};

struct ScenarioConfig {
  nlohmann::json source;  // the config as given
  std::string name = "run";
  ModelKind model = ModelKind::kMarkovianN;
  std::variant<MarkovianParams, RealisticParams, NonMarkovianParams> params;
  int max_excitation = 3;
  InitialState initial;
  double t_max = 1.0;
  std::size_t steps = 2;
  std::vector<std::string> outputs;
  std::optional<std::pair<double, double>> fit_window;
  lindblad::StepperConfig stepper;
  std::vector<SweepAxis> sweep;
  std::size_t sweep_cap = 10000;
  std::uint64_t seed = 0;

  int num_modes() const;
};

/// Throws ConfigError on any schema violation.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Parses, builds the generator (physics guards) and checks the sweep grid.
/// Throws ConfigError or PhysicsGuardError.
void validate(const ScenarioConfig& cfg);

/// Runs one scenario; writes timeseries.csv, report.json and model-specific
/// CSVs into out_dir (atomically, after the computation succeeded). Returns
/// the report.
nlohmann::json run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// Cartesian grid over cfg.sweep (first axis slowest); each point is the
/// parsed scenario with the values substituted. An empty sweep yields cfg.
std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg);

/// Runs every grid point in a pool of `jobs` workers (0 = hardware
/// concurrency) into out_dir/point_NNNNN, then writes summary.csv and
/// sweep_report.json in grid order. An empty sweep runs the scenario directly
/// into out_dir. Returns the sweep report.
nlohmann::json run_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs = 0);

/// Structural check of a run report; throws ConfigError naming the first
/// missing or mistyped field. With `dir`, every listed artifact must exist
/// there.
void validate_report(const nlohmann::json& report, const std::optional<std::filesystem::path>& dir = std::nullopt);

}  // namespace wds::scenario
