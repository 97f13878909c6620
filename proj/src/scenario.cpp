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

#include "wdsim/scenario.hpp"

#include "wdsim/io.hpp"
#include "wdsim/kernels.hpp"
#include "wdsim/propagator.hpp"
#include "wdsim/realistic.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace wds::scenario {

using nlohmann::json;

namespace {

constexpr const char* kReportSchema = "wdsim.run_report/1";
constexpr const char* kSweepSchema = "wdsim.sweep_report/1";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(ctx + ": unknown key \"" + key + "\"");
    }
  }
}

const json& require(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) fail(ctx + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(what + " must be finite");
  return v;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& ctx) {
  return obj.contains(key) ? number(obj.at(key), ctx + "." + key) : fallback;
}

long long integer(const json& j, const std::string& what) {
  const double v = number(j, what);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(what + " must be an integer");
  return static_cast<long long>(v);
}

bool boolean(const json& j, const std::string& what) {
  if (!j.is_boolean()) fail(what + " must be true or false");
  return j.get<bool>();
}

std::vector<double> number_array(const json& j, const std::string& what) {
  if (!j.is_array()) fail(what + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

CVector complex_array(const json& j, const std::string& what) {
  if (!j.is_array()) fail(what + " must be an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = coupling::complex_from_json(j[i]);
  return v;
}

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::kMarkovianN: return "markovian_n";
    case ModelKind::kRealisticTwo: return "realistic_two";
    case ModelKind::kNonMarkovianTwo: return "nonmarkovian_two";
  }
  return "?";
}

MarkovianParams parse_markovian(const json& p) {
  const std::string ctx = "params";
  check_keys(p, {"k", "omega", "nbar", "G"}, ctx);
  MarkovianParams out;
  out.k = number_array(require(p, "k", ctx), "params.k");
  if (out.k.empty()) fail("params.k must not be empty");
  for (double k : out.k) {
    if (k < 0.0) fail("params.k entries must be >= 0");
  }
  out.omega = number_or(p, "omega", 1.0, ctx);
  out.nbar = number_or(p, "nbar", 0.0, ctx);
  if (out.nbar < 0.0) fail("params.nbar must be >= 0");
  if (p.contains("G")) {
    out.G = complex_array(p.at("G"), "params.G");
    if (out.G->size() != static_cast<Eigen::Index>(out.k.size())) fail("params.G must have one entry per rate");
    if (!(out.G->norm() > 0.0)) fail("params.G must not vanish");
  }
  double total = 0.0;
  for (double k : out.k) total += k;
  if (!(total > 0.0)) fail("params.k: total rate must be positive");
  return out;
}

RealisticParams parse_realistic(const json& p) {
  const std::string ctx = "params";
  check_keys(p, {"k1", "k2", "k3", "delta_k", "omega1", "omega2", "omega", "delta_omega", "allow_unphysical"}, ctx);
  RealisticParams out;
  out.k1 = number(require(p, "k1", ctx), "params.k1");
  out.k2 = number(require(p, "k2", ctx), "params.k2");
  if (out.k1 < 0.0 || out.k2 < 0.0) fail("params.k1 and params.k2 must be >= 0");
  if (p.contains("k3") == p.contains("delta_k")) fail("params: give exactly one of \"k3\" or \"delta_k\"");
  if (p.contains("k3")) {
    out.k3 = coupling::complex_from_json(p.at("k3"));
  } else {
    out.k3 = std::sqrt(out.k1 * out.k2) - number(p.at("delta_k"), "params.delta_k");
  }
  const bool split = p.contains("omega1") || p.contains("omega2");
  const bool centered = p.contains("omega") || p.contains("delta_omega");
  if (split && centered) fail("params: use either omega1/omega2 or omega/delta_omega");
  if (split) {
    out.omega1 = number(require(p, "omega1", ctx), "params.omega1");
    out.omega2 = number(require(p, "omega2", ctx), "params.omega2");
  } else {
    const double w = number_or(p, "omega", 1.0, ctx);
    const double dw = number_or(p, "delta_omega", 0.0, ctx);
    out.omega1 = w - dw;
    out.omega2 = w + dw;
  }
  if (p.contains("allow_unphysical")) out.allow_unphysical = boolean(p.at("allow_unphysical"), "params.allow_unphysical");
  if (!(out.k1 + out.k2 > 0.0)) fail("params: k1 + k2 must be positive");
  return out;
}

NonMarkovianParams parse_nonmarkovian(const json& p) {
  const std::string ctx = "params";
  check_keys(p, {"G", "omega", "spectral_density", "beta", "kernel_sign", "kernel_points"}, ctx);
  NonMarkovianParams out;
  out.G = complex_array(require(p, "G", ctx), "params.G");
  if (out.G.size() != 2) fail("params.G must have two entries");
  if (!(out.G.norm() > 0.0)) fail("params.G must not vanish");
  out.omega = number_or(p, "omega", 1.0, ctx);
  out.bath = memory::spectral_density_from_json(require(p, "spectral_density", ctx));
  if (out.bath.empty()) fail("params.spectral_density has no modes");
  if (p.contains("beta") && !p.at("beta").is_null()) {
    out.beta = number(p.at("beta"), "params.beta");
    if (!(out.beta > 0.0)) fail("params.beta must be positive (null for zero temperature)");
  }
  if (p.contains("kernel_sign")) {
    const auto& s = p.at("kernel_sign");
    if (s == "conjugate") {
      out.sign = memory::KernelSign::kConjugate;
    } else if (s == "as_printed") {
      out.sign = memory::KernelSign::kAsPrinted;
    } else {
      fail("params.kernel_sign must be \"conjugate\" or \"as_printed\"");
    }
  }
  if (p.contains("kernel_points")) {
    const long long n = integer(p.at("kernel_points"), "params.kernel_points");
    if (n < 1) fail("params.kernel_points must be >= 1");
    out.kernel_points = static_cast<std::size_t>(n);
  }
  return out;
}

// Rates, detuning and averaged damping that define the weak/strong modes.
struct ModeData {
  double k1, k2, delta_omega, kbar;
};

std::optional<ModeData> mode_data(const ScenarioConfig& cfg) {
  if (cfg.num_modes() != 2) return std::nullopt;
  if (const auto* m = std::get_if<MarkovianParams>(&cfg.params)) {
    if (m->G) {
      return ModeData{std::norm((*m->G)(0)), std::norm((*m->G)(1)), 0.0,
                      0.5 * (std::norm((*m->G)(0)) + std::norm((*m->G)(1)))};
    }
    return ModeData{m->k[0], m->k[1], 0.0, 0.5 * (m->k[0] + m->k[1])};
  }
  if (const auto* r = std::get_if<RealisticParams>(&cfg.params)) {
    return ModeData{r->k1, r->k2, 0.5 * (r->omega2 - r->omega1), 0.5 * (r->k1 + r->k2)};
  }
  const auto& n = std::get<NonMarkovianParams>(cfg.params);
  const double g1 = std::norm(n.G(0)), g2 = std::norm(n.G(1));
  return ModeData{g1, g2, 0.0, 0.5 * (g1 + g2)};
}

double resolve_angle(const json& j, const char* key, const ScenarioConfig& cfg, bool is_alpha) {
  const std::string what = std::string("initial_state.") + key;
  if (!j.is_string()) return number(j, what);
  const std::string preset = j.get<std::string>();
  if (preset != "wd" && preset != "sd") fail(what + " must be a number, \"wd\" or \"sd\"");
  const auto md = mode_data(cfg);
  if (!md) fail(what + ": presets need a two-oscillator model");
  if (!(md->k1 > 0.0) || !(md->k2 > 0.0)) fail(what + ": presets need both rates positive");
  const auto ic = realistic::sd_wd_initial_conditions(md->k1, md->k2, md->delta_omega, md->kbar);
  const realistic::Angles& a = preset == "wd" ? ic.wd : ic.sd;
  return is_alpha ? a.alpha : a.phi;
}

InitialState parse_initial(const json& j, const ScenarioConfig& cfg) {
  if (!j.is_object()) fail("initial_state must be an object");
  check_keys(j, {"alpha", "phi", "occupations", "dfs_coeffs"}, "initial_state");
  const bool angles = j.contains("alpha") || j.contains("phi");
  const int forms = int(angles) + int(j.contains("occupations")) + int(j.contains("dfs_coeffs"));
  if (forms != 1) fail("initial_state: give exactly one of alpha/phi, occupations or dfs_coeffs");
  const int n = cfg.num_modes();
  if (angles) {
    if (n != 2) fail("initial_state.alpha: needs two oscillators");
    AnglesState s;
    s.alpha = resolve_angle(require(j, "alpha", "initial_state"), "alpha", cfg, true);
    // A preset alpha carries its own phase unless phi is given.
    if (j.contains("phi")) {
      s.phi = resolve_angle(j.at("phi"), "phi", cfg, false);
    } else if (j.at("alpha").is_string()) {
      s.phi = resolve_angle(j.at("alpha"), "alpha", cfg, false);
    }
    return s;
  }
  if (j.contains("occupations")) {
    const json& occ = j.at("occupations");
    if (!occ.is_array() || static_cast<int>(occ.size()) != n) {
      fail("initial_state.occupations must list one occupation per oscillator");
    }
    OccupationState s;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      const long long v = integer(occ[i], "initial_state.occupations[" + std::to_string(i) + "]");
      if (v < 0 || v > cfg.max_excitation) fail("initial_state.occupations must lie in [0, max_excitation]");
      s.occupations.push_back(static_cast<int>(v));
    }
    return s;
  }
  if (n != 2) fail("initial_state.dfs_coeffs: needs two oscillators");
  const json& c = j.at("dfs_coeffs");
  if (!c.is_array() || c.empty()) fail("initial_state.dfs_coeffs must be a square matrix");
  const auto d = static_cast<Eigen::Index>(c.size());
  if (d > cfg.max_excitation + 1) fail("initial_state.dfs_coeffs is larger than the truncation");
  DfsState s{CMatrix(d, d)};
  for (Eigen::Index r = 0; r < d; ++r) {
    const json& row = c[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) fail("initial_state.dfs_coeffs must be square");
    for (Eigen::Index col = 0; col < d; ++col) s.coeffs(r, col) = coupling::complex_from_json(row[static_cast<std::size_t>(col)]);
  }
  return s;
}

std::vector<double> axis_values(const json& a, const std::string& ctx) {
  const int forms = int(a.contains("values")) + int(a.contains("linspace")) + int(a.contains("logspace"));
  if (forms != 1) fail(ctx + ": give exactly one of values, linspace or logspace");
  if (a.contains("values")) {
    auto v = number_array(a.at("values"), ctx + ".values");
    if (v.empty()) fail(ctx + ".values must not be empty");
    return v;
  }
  const bool log = a.contains("logspace");
  const std::string key = log ? "logspace" : "linspace";
  const auto spec = number_array(a.at(key), ctx + "." + key);
  if (spec.size() != 3) fail(ctx + "." + key + " must be [start, stop, count]");
  const double n = spec[2];
  if (n < 1 || n != std::floor(n) || n > 1e7) fail(ctx + "." + key + ": count must be a positive integer");
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double e = count == 1 ? spec[0]
                                : spec[0] + (spec[1] - spec[0]) * static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = log ? std::pow(10.0, e) : e;
  }
  return out;
}

std::vector<SweepAxis> parse_sweep(const json& j) {
  if (!j.is_array()) fail("sweep must be an array of axes");
  std::vector<SweepAxis> axes;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ctx = "sweep[" + std::to_string(i) + "]";
    const json& a = j[i];
    if (!a.is_object()) fail(ctx + " must be an object");
    check_keys(a, {"param", "values", "linspace", "logspace"}, ctx);
    const json& p = require(a, "param", ctx);
    if (!p.is_string() || p.get<std::string>().empty()) fail(ctx + ".param must be a non-empty string");
    if (!seen.insert(p.get<std::string>()).second) fail(ctx + ": duplicate param " + p.get<std::string>());
    axes.push_back({p.get<std::string>(), axis_values(a, ctx)});
  }
  return axes;
}

std::size_t grid_size(const std::vector<SweepAxis>& axes, std::size_t cap) {
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.size() > cap || total > cap / a.values.size()) {
      fail("sweep grid exceeds sweep_cap = " + std::to_string(cap));
    }
    total *= a.values.size();
  }
  return total;
}

json::json_pointer axis_pointer(const std::string& param) {
  if (param == "alpha" || param == "phi") return json::json_pointer("/initial_state/" + param);
  if (param.front() == '/') {
    try {
      return json::json_pointer(param);
    } catch (const json::exception& e) {
      fail("sweep param " + param + ": " + e.what());
    }
  }
  return json::json_pointer("/params/" + param);
}

bool is_known_output(const std::string& name, const ScenarioConfig& cfg) {
  static const std::set<std::string> common = {"trace", "purity", "vacuum", "excited", "fidelity_initial",
                                               "fidelity_free"};
  if (common.count(name)) return true;
  const auto indexed = [&](const char* prefix) -> bool {
    const std::string p(prefix);
    if (name.rfind(p, 0) != 0 || name.size() == p.size()) return false;
    const std::string tail = name.substr(p.size());
    if (!std::all_of(tail.begin(), tail.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) return false;
    return std::stoi(tail) < cfg.num_modes();
  };
  if (indexed("n")) return true;
  if (cfg.model != ModelKind::kRealisticTwo && indexed("collective")) return true;
  if ((name == "wd_population" || name == "sd_population") && cfg.num_modes() == 2) return true;
  return false;
}

std::vector<std::string> default_outputs(ModelKind m) {
  switch (m) {
    case ModelKind::kMarkovianN: return {"collective0", "collective1", "purity", "fidelity_free"};
    case ModelKind::kRealisticTwo: return {"excited", "wd_population", "sd_population", "fidelity_initial"};
    case ModelKind::kNonMarkovianTwo: return {"collective0", "collective1", "excited"};
  }
  return {};
}

}  // namespace

int ScenarioConfig::num_modes() const {
  if (const auto* m = std::get_if<MarkovianParams>(&params)) return static_cast<int>(m->k.size());
  return 2;
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  check_keys(j,
             {"name", "description", "model", "params", "initial_state", "time", "truncation", "outputs",
              "fit_window", "stepper", "sweep", "sweep_cap", "seed"},
             "config");
  ScenarioConfig cfg;
  cfg.source = j;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) fail("name must be a string");
    cfg.name = j.at("name").get<std::string>();
  }
  const json& model = require(j, "model", "config");
  if (model == "markovian_n") {
    cfg.model = ModelKind::kMarkovianN;
  } else if (model == "realistic_two") {
    cfg.model = ModelKind::kRealisticTwo;
  } else if (model == "nonmarkovian_two") {
    cfg.model = ModelKind::kNonMarkovianTwo;
  } else {
    fail("model must be one of markovian_n, realistic_two, nonmarkovian_two");
  }
  const json& params = require(j, "params", "config");
  if (!params.is_object()) fail("params must be an object");
  switch (cfg.model) {
    case ModelKind::kMarkovianN: cfg.params = parse_markovian(params); break;
    case ModelKind::kRealisticTwo: cfg.params = parse_realistic(params); break;
    case ModelKind::kNonMarkovianTwo: cfg.params = parse_nonmarkovian(params); break;
  }

  if (j.contains("truncation")) {
    const json& t = j.at("truncation");
    if (!t.is_object()) fail("truncation must be an object");
    check_keys(t, {"max_excitation"}, "truncation");
    if (t.contains("max_excitation")) {
      const long long m = integer(t.at("max_excitation"), "truncation.max_excitation");
      if (m < 1 || m > 64) fail("truncation.max_excitation must lie in [1, 64]");
      cfg.max_excitation = static_cast<int>(m);
    }
  }
  const double dim = std::pow(cfg.max_excitation + 1.0, cfg.num_modes());
  if (dim > 4096) fail("Fock space dimension " + io::format_double(dim) + " exceeds 4096");

  cfg.initial = parse_initial(require(j, "initial_state", "config"), cfg);

  const json& time = require(j, "time", "config");
  if (!time.is_object()) fail("time must be an object");
  check_keys(time, {"t_max", "steps"}, "time");
  cfg.t_max = number(require(time, "t_max", "time"), "time.t_max");
  if (!(cfg.t_max > 0.0)) fail("time.t_max must be positive");
  const long long steps = integer(require(time, "steps", "time"), "time.steps");
  if (steps < 2 || steps > 10'000'000) fail("time.steps must lie in [2, 1e7]");
  cfg.steps = static_cast<std::size_t>(steps);

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (!o.is_array()) fail("outputs must be an array of names");
    for (const auto& name : o) {
      if (!name.is_string()) fail("outputs must be an array of names");
      if (!is_known_output(name.get<std::string>(), cfg)) {
        fail("outputs: unknown observable \"" + name.get<std::string>() + "\" for model " + model_name(cfg.model));
      }
      cfg.outputs.push_back(name.get<std::string>());
    }
  } else {
    cfg.outputs = default_outputs(cfg.model);
  }

  if (j.contains("fit_window")) {
    const auto w = number_array(j.at("fit_window"), "fit_window");
    if (w.size() != 2 || !(w[0] >= 0.0) || !(w[0] < w[1]) || w[1] > cfg.t_max) {
      fail("fit_window must be [a, b] with 0 <= a < b <= t_max");
    }
    cfg.fit_window = std::make_pair(w[0], w[1]);
  }

  if (j.contains("stepper")) {
    const json& s = j.at("stepper");
    if (!s.is_object()) fail("stepper must be an object");
    check_keys(s, {"step", "richardson", "renormalize_trace"}, "stepper");
    cfg.stepper.step = number_or(s, "step", 0.0, "stepper");
    if (cfg.stepper.step < 0.0) fail("stepper.step must be >= 0 (0 = automatic)");
    if (s.contains("richardson")) cfg.stepper.richardson = boolean(s.at("richardson"), "stepper.richardson");
    if (s.contains("renormalize_trace")) {
      cfg.stepper.renormalize_trace = boolean(s.at("renormalize_trace"), "stepper.renormalize_trace");
    }
  }

  if (j.contains("sweep_cap")) {
    const long long cap = integer(j.at("sweep_cap"), "sweep_cap");
    if (cap < 1) fail("sweep_cap must be >= 1");
    cfg.sweep_cap = static_cast<std::size_t>(cap);
  }
  if (j.contains("sweep")) {
    cfg.sweep = parse_sweep(j.at("sweep"));
    grid_size(cfg.sweep, cfg.sweep_cap);
  }
  if (j.contains("seed")) {
    const long long seed = integer(j.at("seed"), "seed");
    if (seed < 0) fail("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& cfg) {
  if (cfg.sweep.empty()) return {cfg};
  const std::size_t total = grid_size(cfg.sweep, cfg.sweep_cap);
  json base = cfg.source;
  base.erase("sweep");
  std::vector<json::json_pointer> ptrs;
  for (const auto& a : cfg.sweep) ptrs.push_back(axis_pointer(a.param));
  std::vector<ScenarioConfig> out;
  out.reserve(total);
  std::vector<std::size_t> idx(cfg.sweep.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    json j = base;
    for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
      try {
        j[ptrs[a]] = cfg.sweep[a].values[idx[a]];
      } catch (const json::exception& e) {
        fail("sweep param " + cfg.sweep[a].param + ": " + e.what());
      }
    }
    out.push_back(parse_config(j));
    for (std::size_t a = cfg.sweep.size(); a-- > 0;) {
      if (++idx[a] < cfg.sweep[a].values.size()) break;
      idx[a] = 0;
    }
  }
  return out;
}

namespace {

double theta_for(const ScenarioConfig& cfg) {
  const auto md = mode_data(cfg);
  if (const auto* n = std::get_if<NonMarkovianParams>(&cfg.params)) {
    return std::atan2(std::abs(n->G(1)), std::abs(n->G(0)));
  }
  return std::atan2(std::sqrt(md->k2), std::sqrt(md->k1));
}

fock::DensityMatrix initial_density(const ScenarioConfig& cfg, const fock::TruncationSpec& spec) {
  try {
    if (const auto* a = std::get_if<AnglesState>(&cfg.initial)) {
      return fock::one_photon_state(fock::ModeVector::from_angles(a->alpha, a->phi), spec);
    }
    if (const auto* o = std::get_if<OccupationState>(&cfg.initial)) {
      return fock::DensityMatrix::pure(spec, fock::basis_vector(spec, {o->occupations}));
    }
    return fock::dfs_state(std::get<DfsState>(cfg.initial).coeffs, theta_for(cfg), spec);
  } catch (const std::invalid_argument& e) {
    fail(std::string("initial_state: ") + e.what());
  }
}

lindblad::LindbladGenerator build_generator(const ScenarioConfig& cfg, const fock::TruncationSpec& spec,
                                            const memory::MemoryKernelSolution* kernel) {
  if (const auto* m = std::get_if<MarkovianParams>(&cfg.params)) {
    coupling::RateModel rates{m->k, {}, m->nbar};
    return lindblad::build_bm_generator(rates, m->omega, spec, m->G);
  }
  if (const auto* r = std::get_if<RealisticParams>(&cfg.params)) {
    coupling::RateModel rates{{r->k1, r->k2}, r->k3, 0.0};
    return lindblad::build_realistic_generator(rates, r->omega1, r->omega2, spec, r->allow_unphysical);
  }
  const auto& n = std::get<NonMarkovianParams>(cfg.params);
  return lindblad::build_time_dependent_generator(*kernel, n.G, spec);
}

struct KernelPlan {
  memory::TimeGrid grid;
  std::size_t stride;
};

KernelPlan kernel_plan(const ScenarioConfig& cfg, const NonMarkovianParams& n) {
  const std::size_t intervals = cfg.steps - 1;
  const std::size_t stride = std::max<std::size_t>(1, (n.kernel_points + intervals - 1) / intervals);
  return {{cfg.t_max / static_cast<double>(intervals * stride), intervals * stride + 1}, stride};
}

std::vector<double> diag_of(const CMatrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) d[static_cast<std::size_t>(i)] = m(i, i).real();
  return d;
}

// Sum_ij rho_ij op_ji
double trace_product(const CMatrix& rho, const CMatrix& op) { return (rho.array() * op.transpose().array()).sum().real(); }

std::vector<double> free_energies(const ScenarioConfig& cfg, const fock::TruncationSpec& spec) {
  std::vector<double> w(static_cast<std::size_t>(spec.num_modes()));
  if (const auto* m = std::get_if<MarkovianParams>(&cfg.params)) {
    std::fill(w.begin(), w.end(), m->omega);
  } else if (const auto* r = std::get_if<RealisticParams>(&cfg.params)) {
    w = {r->omega1, r->omega2};
  } else {
    std::fill(w.begin(), w.end(), std::get<NonMarkovianParams>(cfg.params).omega);
  }
  std::vector<double> e(static_cast<std::size_t>(spec.dim()), 0.0);
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    const auto occ = spec.occupations_of(i);
    for (std::size_t m = 0; m < occ.size(); ++m) e[static_cast<std::size_t>(i)] += w[m] * occ[m];
  }
  return e;
}

CVector collective_profile(const ScenarioConfig& cfg) {
  if (const auto* m = std::get_if<MarkovianParams>(&cfg.params)) {
    return m->G ? *m->G : coupling::coupling_from_rates(m->k);
  }
  return std::get<NonMarkovianParams>(cfg.params).G;
}

fock::ModeVector mode_of_row(const CMatrix& rotation, Eigen::Index row) {
  return fock::ModeVector(rotation.row(row).conjugate().transpose());
}

// Weak (first) and strong (second) one-photon modes.
std::pair<fock::ModeVector, fock::ModeVector> wd_sd(const ScenarioConfig& cfg) {
  if (cfg.model == ModelKind::kRealisticTwo) {
    const auto md = *mode_data(cfg);
    try {
      const auto p = coupling::wd_sd_modes(md.k1, md.k2, md.delta_omega, md.kbar);
      return {p.weak, p.strong};
    } catch (const std::invalid_argument& e) {
      fail(std::string("wd_population/sd_population: ") + e.what());
    }
  }
  const CMatrix rot = coupling::collective_rotation(collective_profile(cfg));
  return {mode_of_row(rot, 1), mode_of_row(rot, 0)};
}

std::vector<lindblad::Observable> make_observables(const ScenarioConfig& cfg, const fock::TruncationSpec& spec,
                                                   const fock::DensityMatrix& rho0) {
  std::vector<lindblad::Observable> out;
  std::vector<CMatrix> collective;
  if (cfg.model != ModelKind::kRealisticTwo) {
    for (const auto& a : lindblad::collective_operators(collective_profile(cfg), spec)) {
      collective.push_back(a.adjoint() * a);
    }
  }
  const auto energies = free_energies(cfg, spec);
  const CMatrix initial = rho0.matrix();
  for (const auto& name : cfg.outputs) {
    lindblad::Observable obs{name, {}};
    if (name == "trace") {
      obs.second = [](double, const fock::DensityMatrix& r) { return r.trace().real(); };
    } else if (name == "purity") {
      obs.second = [](double, const fock::DensityMatrix& r) { return fock::purity(r); };
    } else if (name == "vacuum") {
      obs.second = [](double, const fock::DensityMatrix& r) { return r(0, 0).real(); };
    } else if (name == "excited") {
      obs.second = [](double, const fock::DensityMatrix& r) { return r.trace().real() - r(0, 0).real(); };
    } else if (name == "fidelity_initial") {
      obs.second = [initial](double, const fock::DensityMatrix& r) { return trace_product(r.matrix(), initial); };
    } else if (name == "fidelity_free") {
      obs.second = [initial, energies](double t, const fock::DensityMatrix& r) {
        Complex s{};
        for (Eigen::Index b = 0; b < initial.cols(); ++b) {
          for (Eigen::Index a = 0; a < initial.rows(); ++a) {
            const double de = energies[static_cast<std::size_t>(a)] - energies[static_cast<std::size_t>(b)];
            s += r(b, a) * initial(a, b) * std::polar(1.0, -de * t);
          }
        }
        return s.real();
      };
    } else if (name == "wd_population" || name == "sd_population") {
      const auto modes = wd_sd(cfg);
      const fock::ModeVector mode = name == "wd_population" ? modes.first : modes.second;
      obs.second = [mode](double, const fock::DensityMatrix& r) { return fock::mode_population(r, mode); };
    } else if (name.rfind("collective", 0) == 0) {
      const CMatrix op = collective[std::stoul(name.substr(10))];
      obs.second = [op](double, const fock::DensityMatrix& r) { return trace_product(r.matrix(), op); };
    } else {
      const int mode = std::stoi(name.substr(1));
      const auto d = diag_of(fock::number_operator(mode, spec));
      obs.second = [d](double, const fock::DensityMatrix& r) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        return s;
      };
    }
    out.push_back(std::move(obs));
  }
  return out;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_number(double v) { return std::isnan(v) ? std::string("nan") : io::format_double(v); }

// [2, 6] / k_fast clamped to the run, so the fast component has died out.
std::pair<double, double> late_window(const ScenarioConfig& cfg, double k_fast) {
  const double b = std::min(6.0 / k_fast, cfg.t_max);
  return {std::min(2.0 / k_fast, 0.5 * b), b};
}

json fit_series(const ScenarioConfig& cfg, const std::vector<double>& times, const std::vector<double>& values,
                std::pair<double, double> fallback, const std::string& series) {
  const auto [a, b] = cfg.fit_window.value_or(fallback);
  json out{{"series", series}, {"window", {a, b}}};
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (!(peak > 1e-12)) {
    out["error"] = "series carries no population";
    return out;
  }
  try {
    const auto fit = realistic::fit_decay_rate(times, values, a, b);
    out["population_rate"] = num(fit.rate);
    out["amplitude_rate"] = num(0.5 * fit.rate);
    out["r2"] = num(fit.r2);
    out["points"] = fit.points;
  } catch (const std::invalid_argument& e) {
    out["error"] = e.what();
  }
  return out;
}

struct Deviation {
  double max_abs = 0.0;
  double max_trace_distance = 0.0;
};

void accumulate(Deviation& d, const fock::DensityMatrix& numeric, const fock::DensityMatrix& analytic) {
  d.max_abs = std::max(d.max_abs, (numeric.matrix() - analytic.matrix()).cwiseAbs().maxCoeff());
  d.max_trace_distance = std::max(d.max_trace_distance, fock::trace_distance(numeric, analytic));
}

json deviation_json(const Deviation& d, const char* method) {
  return {{"available", true}, {"method", method}, {"max_abs_deviation", num(d.max_abs)},
          {"max_trace_distance", num(d.max_trace_distance)}};
}

json unavailable(const std::string& reason) { return {{"available", false}, {"reason", reason}}; }

std::vector<double> output_times(const ScenarioConfig& cfg) {
  std::vector<double> t(cfg.steps);
  for (std::size_t i = 0; i < cfg.steps; ++i) {
    t[i] = cfg.t_max * static_cast<double>(i) / static_cast<double>(cfg.steps - 1);
  }
  return t;
}

std::string to_csv_string(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  for (const auto& point : expand_sweep(cfg)) {
    const fock::TruncationSpec spec(point.num_modes(), point.max_excitation);
    initial_density(point, spec);
    make_observables(point, spec, fock::DensityMatrix::vacuum(spec));
    if (point.model == ModelKind::kNonMarkovianTwo) continue;  // needs the kernel solve
    build_generator(point, spec, nullptr);
  }
}

json run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const fock::TruncationSpec spec(cfg.num_modes(), cfg.max_excitation);
  const fock::DensityMatrix rho0 = initial_density(cfg, spec);
  const auto observables = make_observables(cfg, spec, rho0);

  std::vector<std::pair<std::string, std::string>> files;
  json report;
  report["schema"] = kReportSchema;
  report["name"] = cfg.name;
  report["model"] = model_name(cfg.model);
  report["scenario"] = cfg.source;
  report["seed"] = cfg.seed;
  report["isa"] = std::string(kernels::isa_name(kernels::active_isa()));
  json summary{{"fitted_rate", nullptr}, {"predicted_rate", nullptr}, {"ratio", nullptr},
               {"p_numeric", nullptr}, {"p_formula", nullptr}};
  json predicted = json::object();
  json fits = json::object();
  json analytic = unavailable("not applicable to this model");
  json asymptotic = nullptr;

  std::optional<memory::MemoryKernelSolution> kernel;
  std::vector<double> times;
  std::size_t stride = 1;
  if (const auto* n = std::get_if<NonMarkovianParams>(&cfg.params)) {
    const KernelPlan plan = kernel_plan(cfg, *n);
    stride = plan.stride;
    kernel = memory::solve_memory_kernel(n->bath, n->omega, n->beta, plan.grid, n->sign);
    for (std::size_t i = 0; i < cfg.steps; ++i) times.push_back(plan.grid[i * stride]);
  } else {
    times = output_times(cfg);
  }
  const lindblad::LindbladGenerator gen = build_generator(cfg, spec, kernel ? &*kernel : nullptr);
  const lindblad::PropagationResult res = lindblad::propagate(gen, rho0, times, cfg.stepper);
  const fock::DensityMatrix& final_state = res.states.back();

  report["diagnostics"] = {{"max_trace_error", num(res.max_trace_error())},
                           {"min_eigenvalue", num(res.worst_min_eigenvalue())},
                           {"max_hermiticity_error", num(res.max_hermiticity_error())},
                           {"step", num(res.step)},
                           {"dimension", spec.dim()}};
  files.emplace_back("timeseries.csv", to_csv_string([&](std::ostream& o) { lindblad::write_csv(res, observables, o); }));

  auto series = [&](const std::function<double(const fock::DensityMatrix&)>& f) {
    std::vector<double> v;
    v.reserve(res.states.size());
    for (const auto& s : res.states) v.push_back(f(s));
    return v;
  };
  const auto* angles = std::get_if<AnglesState>(&cfg.initial);

  if (const auto* m = std::get_if<MarkovianParams>(&cfg.params)) {
    const double k = std::accumulate(m->k.begin(), m->k.end(), 0.0);
    predicted = {{"k", k}, {"population_rate", 2.0 * k}};
    const CMatrix a1 = lindblad::collective_operators(collective_profile(cfg), spec).front();
    const CMatrix n1 = a1.adjoint() * a1;
    if (m->nbar == 0.0) {
      const auto pop = series([&](const fock::DensityMatrix& s) { return trace_product(s.matrix(), n1); });
      fits["collective0"] = fit_series(cfg, res.times, pop, late_window(cfg, k), "collective0");
      if (!fits["collective0"].contains("error")) {
        const double fitted = fits["collective0"]["amplitude_rate"].get<double>();
        summary["fitted_rate"] = num(fitted);
        summary["ratio"] = num(fitted / k);
      }
    }
    summary["predicted_rate"] = k;

    // Free image of the initial state: the DFS part must follow it exactly.
    const auto energies = free_energies(cfg, spec);
    double min_free = 1.0;
    double min_norm = 1.0;
    double max_free_dist = 0.0;
    for (std::size_t i = 0; i < res.states.size(); ++i) {
      CMatrix img = rho0.matrix();
      for (Eigen::Index b = 0; b < img.cols(); ++b) {
        for (Eigen::Index a = 0; a < img.rows(); ++a) {
          img(a, b) *= std::polar(1.0, -(energies[static_cast<std::size_t>(a)] - energies[static_cast<std::size_t>(b)]) * res.times[i]);
        }
      }
      const fock::DensityMatrix free_state(spec, img);
      const double overlap = fock::fidelity(res.states[i], free_state);
      min_free = std::min(min_free, overlap);
      min_norm = std::min(min_norm, overlap / std::sqrt(fock::purity(res.states[i]) * fock::purity(free_state)));
      max_free_dist = std::max(max_free_dist, fock::trace_distance(res.states[i], free_state));
    }
    report["free_evolution"] = {{"min_fidelity", num(min_free)},
                                {"min_normalized_overlap", num(min_norm)},
                                {"max_trace_distance", num(max_free_dist)}};

    if (cfg.num_modes() == 2 && !m->G && m->k[0] > 0.0) {
      try {
        Deviation d;
        std::vector<propagator::PropagatorCoefficients> coeffs;
        for (std::size_t i = 0; i < res.times.size(); ++i) {
          coeffs.push_back(propagator::markov_coefficients(m->k[0], m->k[1], m->nbar, m->omega, res.times[i]));
          accumulate(d, res.states[i], propagator::apply_superoperator(coeffs.back(), rho0));
        }
        analytic = deviation_json(d, "closed_form_map");
        files.emplace_back("coefficients.csv",
                           to_csv_string([&](std::ostream& o) { propagator::write_coefficients_csv(coeffs, o); }));
      } catch (const NumericError& e) {
        analytic = unavailable(e.what());
      }
      if (angles && m->nbar == 0.0) {
        const auto asym = propagator::asymptotic_state(m->k[0], m->k[1], angles->alpha, angles->phi);
        const double p_num = fock::mode_population(final_state, asym.psi);
        double f_num = kNaN;
        for (std::size_t i = 0; i < observables.size(); ++i) {
          if (observables[i].first == "fidelity_free") f_num = observables[i].second(res.times.back(), final_state);
        }
        asymptotic = {{"weight", num(asym.weight)}, {"fidelity", num(asym.fidelity)},
                      {"weight_numeric", num(p_num)}, {"fidelity_numeric", num(f_num)},
                      {"psi", {coupling::complex_to_json(asym.psi[0]), coupling::complex_to_json(asym.psi[1])}}};
        summary["p_numeric"] = num(p_num);
        summary["p_formula"] = num(asym.weight);
      }
    }
  } else if (const auto* r = std::get_if<RealisticParams>(&cfg.params)) {
    const auto dev = coupling::DeviationParams::from(r->k1, r->k2, r->k3, r->omega1, r->omega2);
    const double k_sd = r->k1 + r->k2;
    predicted = {{"delta_k", dev.delta_k}, {"delta_omega", dev.delta_omega}, {"k_sd", k_sd}};
    double k_wd = kNaN;
    if (dev.delta_k >= 0.0) {
      const auto pr = coupling::predicted_rates(r->k1, r->k2, dev.delta_k);
      k_wd = pr.k_wd;
      predicted["k_wd"] = num(k_wd);
    }
    try {
      const auto er = realistic::eigen_rates(r->k1, r->k2, r->k3, r->omega1, r->omega2);
      predicted["eigen_slow"] = num(er.slow);
      predicted["eigen_fast"] = num(er.fast);
    } catch (const NumericError& e) {
      predicted["eigen_error"] = e.what();
    }
    const auto excited = series([](const fock::DensityMatrix& s) { return s.trace().real() - s(0, 0).real(); });
    fits["excited"] = fit_series(cfg, res.times, excited, late_window(cfg, k_sd), "excited");
    summary["predicted_rate"] = num(k_wd);
    if (!fits["excited"].contains("error")) {
      const double fitted = fits["excited"]["amplitude_rate"].get<double>();
      summary["fitted_rate"] = num(fitted);
      summary["ratio"] = num(fitted / k_wd);
    }
    summary["p_numeric"] = num(excited.back());
    if (angles) {
      try {
        const auto sol = realistic::one_photon_evolution(r->k1, r->k2, r->k3, r->omega1, r->omega2, angles->alpha,
                                                         angles->phi, res.times);
        Deviation d;
        for (std::size_t i = 0; i < res.times.size(); ++i) accumulate(d, res.states[i], sol.density(i, spec));
        analytic = deviation_json(d, "one_photon_closed_form");
        summary["p_formula"] = num(sol.p.back());
        files.emplace_back("one_photon.csv", to_csv_string([&](std::ostream& o) { realistic::write_csv(sol, o); }));
      } catch (const NumericError& e) {
        analytic = unavailable(e.what());
      }
      if (dev.delta_k >= 0.0 && r->k1 > 0.0 && r->k2 > 0.0) {
        report["approx_split"] = realistic::to_json(
            realistic::approx_amplitudes(r->k1, r->k2, dev.delta_k, dev.delta_omega, angles->alpha, angles->phi));
      }
    }
  } else {
    const auto& n = std::get<NonMarkovianParams>(cfg.params);
    const auto& kr = *kernel;
    const std::size_t half = kr.grid.count / 2;
    double lam = 0.0, del = 0.0;
    for (std::size_t i = half; i + 1 < kr.grid.count; ++i) {
      lam += kr.lambda[i];
      del += kr.delta[i];
    }
    const double cnt = static_cast<double>(kr.grid.count - 1 - half);
    lam /= cnt;
    del /= cnt;
    report["kernel"] = {{"grid_step", num(kr.grid.step)},
                        {"grid_points", kr.grid.count},
                        {"eta_abs2_final", num(std::norm(kr.eta.back()))},
                        {"capacity_final", num(kr.capacity.back())},
                        {"lambda_mean_late", num(lam)},
                        {"delta_mean_late", num(del)},
                        {"endpoints_low_confidence", kr.endpoints_low_confidence}};
    predicted = {{"lambda_mean_late", num(lam)}};
    files.emplace_back("kernel.csv", to_csv_string([&](std::ostream& o) {
                         o << "t,re_eta,im_eta,abs2_eta,lambda,delta,epsilon,capacity\n";
                         for (std::size_t i = 0; i < kr.grid.count; ++i) {
                           o << io::format_double(kr.grid[i]) << ',' << io::format_double(kr.eta[i].real()) << ','
                             << io::format_double(kr.eta[i].imag()) << ',' << io::format_double(std::norm(kr.eta[i])) << ','
                             << io::format_double(kr.lambda[i]) << ','
                             << io::format_double(kr.delta[i]) << ',' << io::format_double(kr.epsilon[i]) << ','
                             << io::format_double(kr.capacity[i]) << '\n';
                         }
                       }));
    const CMatrix a1 = lindblad::collective_operators(n.G, spec).front();
    const CMatrix n1 = a1.adjoint() * a1;
    if (std::isinf(n.beta)) {
      const auto pop = series([&](const fock::DensityMatrix& s) { return trace_product(s.matrix(), n1); });
      json fit_cfg = fit_series(cfg, res.times, pop, {0.5 * cfg.t_max, cfg.t_max}, "collective0");
      fits["collective0"] = fit_cfg;
      summary["predicted_rate"] = num(lam);
      if (!fit_cfg.contains("error")) {
        const double fitted = fit_cfg["amplitude_rate"].get<double>();
        summary["fitted_rate"] = num(fitted);
        summary["ratio"] = num(fitted / lam);
      }
    }
    summary["p_numeric"] = num(final_state.trace().real() - final_state(0, 0).real());
    const bool real_profile = n.G(0).imag() == 0.0 && n.G(1).imag() == 0.0 && n.G(0).real() >= 0.0 &&
                              n.G(1).real() >= 0.0;
    if (real_profile) {
      try {
        const double theta = std::atan2(n.G(1).real(), n.G(0).real());
        const auto coeffs = propagator::coefficients_from_eta(kr.eta, kr.capacity, kr.grid, theta, n.omega);
        Deviation d;
        for (std::size_t i = 0; i < res.times.size(); ++i) {
          accumulate(d, res.states[i], propagator::apply_superoperator(coeffs[i * stride], rho0));
        }
        analytic = deviation_json(d, "closed_form_map_from_eta");
      } catch (const NumericError& e) {
        analytic = unavailable(e.what());
      }
    } else {
      analytic = unavailable("closed form needs a real nonnegative coupling profile");
    }
  }

  report["predicted"] = predicted;
  report["fits"] = fits;
  report["analytic_vs_numeric"] = analytic;
  report["asymptotic"] = asymptotic;
  report["summary"] = summary;
  json artifacts = json::array();
  for (const auto& f : files) artifacts.push_back(f.first);
  report["artifacts"] = artifacts;
  report["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto& [name, content] : files) io::write_atomic(out_dir / name, content);
  io::write_atomic(out_dir / "report.json", report.dump(2) + "\n");
  return report;
}

json run_sweep(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ScenarioConfig> points = expand_sweep(cfg);
  const bool direct = cfg.sweep.empty();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, points.size()));

  auto point_dir = [&](std::size_t i) {
    if (direct) return out_dir;
    char buf[32];
    std::snprintf(buf, sizeof buf, "point_%05zu", i);
    return out_dir / buf;
  };

  std::vector<json> reports(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        reports[i] = run_scenario(points[i], point_dir(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  csv << "index";
  for (const auto& a : cfg.sweep) csv << ',' << a.param;
  const char* cols[] = {"fitted_rate", "predicted_rate", "ratio", "p_numeric", "p_formula"};
  for (const char* c : cols) csv << ',' << c;
  csv << '\n';

  json sweep_report{{"schema", kSweepSchema}, {"name", cfg.name}, {"points", json::array()}};
  json axes = json::array();
  for (const auto& a : cfg.sweep) axes.push_back({{"param", a.param}, {"values", a.values}});
  sweep_report["axes"] = axes;

  std::vector<std::size_t> idx(cfg.sweep.size(), 0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    csv << p;
    json values = json::object();
    for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
      const double v = cfg.sweep[a].values[idx[a]];
      csv << ',' << csv_number(v);
      values[cfg.sweep[a].param] = v;
    }
    const json& s = reports[p]["summary"];
    for (const char* c : cols) csv << ',' << csv_number(s[c].is_number() ? s[c].get<double>() : kNaN);
    csv << '\n';
    sweep_report["points"].push_back({{"index", p},
                                      {"values", values},
                                      {"dir", direct ? std::string(".") : point_dir(p).filename().string()},
                                      {"summary", s}});
    for (std::size_t a = cfg.sweep.size(); a-- > 0;) {
      if (++idx[a] < cfg.sweep[a].values.size()) break;
      idx[a] = 0;
    }
  }
  sweep_report["jobs"] = jobs;
  sweep_report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_atomic(out_dir / "summary.csv", csv.str());
  io::write_atomic(out_dir / "sweep_report.json", sweep_report.dump(2) + "\n");
  return sweep_report;
}

void validate_report(const json& report, const std::optional<std::filesystem::path>& dir) {
  auto field = [&](const json& obj, const char* key, const std::string& ctx) -> const json& {
    if (!obj.is_object() || !obj.contains(key)) fail("report: missing " + ctx + key);
    return obj.at(key);
  };
  auto nullable_number = [&](const json& v, const std::string& what) {
    if (!v.is_null() && !v.is_number()) fail("report: " + what + " must be a number or null");
  };
  if (!report.is_object()) fail("report must be a JSON object");
  const json& schema = field(report, "schema", "");
  if (schema != kReportSchema) fail(std::string("report: schema must be ") + kReportSchema);
  for (const char* key : {"name", "model", "isa"}) {
    if (!field(report, key, "").is_string()) fail(std::string("report: ") + key + " must be a string");
  }
  const std::string model = report.at("model").get<std::string>();
  if (model != "markovian_n" && model != "realistic_two" && model != "nonmarkovian_two") fail("report: unknown model");
  if (!field(report, "scenario", "").is_object()) fail("report: scenario must be an object");
  const json& diag = field(report, "diagnostics", "");
  for (const char* key : {"max_trace_error", "min_eigenvalue", "max_hermiticity_error", "step"}) {
    nullable_number(field(diag, key, "diagnostics."), std::string("diagnostics.") + key);
  }
  const json& summary = field(report, "summary", "");
  for (const char* key : {"fitted_rate", "predicted_rate", "ratio", "p_numeric", "p_formula"}) {
    nullable_number(field(summary, key, "summary."), std::string("summary.") + key);
  }
  for (const char* key : {"predicted", "fits", "analytic_vs_numeric"}) {
    if (!field(report, key, "").is_object()) fail(std::string("report: ") + key + " must be an object");
  }
  if (!field(report, "analytic_vs_numeric", "").contains("available")) {
    fail("report: missing analytic_vs_numeric.available");
  }
  field(report, "asymptotic", "");
  if (!field(report, "wall_time_s", "").is_number()) fail("report: wall_time_s must be a number");
  const json& artifacts = field(report, "artifacts", "");
  if (!artifacts.is_array()) fail("report: artifacts must be an array");
  bool has_series = false;
  for (const auto& a : artifacts) {
    if (!a.is_string()) fail("report: artifacts must be file names");
    has_series = has_series || a == "timeseries.csv";
    if (dir && !std::filesystem::exists(*dir / a.get<std::string>())) {
      fail("report: artifact " + a.get<std::string>() + " not found in " + dir->string());
    }
  }
  if (!has_series) fail("report: artifacts must include timeseries.csv");
}

}  // namespace wds::scenario
