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

// Acceptance gates. Prints one PASS/FAIL line per criterion and exits
// nonzero if any gate fails.

#include "wdsim/coupling.hpp"
#include "wdsim/fock.hpp"
#include "wdsim/lindblad.hpp"
#include "wdsim/memory_kernel.hpp"
#include "wdsim/propagator.hpp"
#include "wdsim/realistic.hpp"
#include "wdsim/scenario.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wds;
using fock::DensityMatrix;
using fock::TruncationSpec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Worst CPTP measures over every propagated or mapped state.
struct CptpLedger {
  double trace = 0.0;
  double hermiticity = 0.0;
  double min_eig = 0.0;
  std::size_t states = 0;

  void add(const DensityMatrix& rho) {
    const auto d = rho.diagnostics();
    trace = std::max(trace, d.trace_error);
    hermiticity = std::max(hermiticity, d.hermiticity_error);
    min_eig = std::min(min_eig, d.min_eigenvalue);
    ++states;
  }
  void add(const lindblad::PropagationResult& r) {
    for (const auto& s : r.states) add(s);
  }
};

CptpLedger cptp;

lindblad::PropagationResult tracked_propagate(const lindblad::LindbladGenerator& gen, const DensityMatrix& rho0,
                                              const std::vector<double>& times, const lindblad::StepperConfig& cfg = {}) {
  auto r = lindblad::propagate(gen, rho0, times, cfg);
  cptp.add(r);
  return r;
}

DensityMatrix apply_map(const propagator::PropagatorCoefficients& c, const DensityMatrix& rho0) {
  auto out = propagator::apply_superoperator(c, rho0);
  cptp.add(out);
  return out;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = {n(rng), n(rng)};
  }
  return m;
}

DensityMatrix random_state(std::mt19937_64& rng, const TruncationSpec& spec, int cap, int rank) {
  CMatrix x = random_matrix(rng, spec.dim(), rank);
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    if (spec.total_excitation(i) > cap) x.row(i).setZero();
  }
  CMatrix rho = x * x.adjoint();
  rho /= rho.trace();
  return DensityMatrix(spec, rho);
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Tr(rho sigma) normalized by the purities; 1 iff the states coincide.
double normalized_overlap(const DensityMatrix& a, const DensityMatrix& b) {
  return fock::fidelity(a, b) / std::sqrt(fock::purity(a) * fock::purity(b));
}

DensityMatrix free_image(const DensityMatrix& rho, double omega, double t) {
  const auto& spec = rho.spec();
  CMatrix m = rho.matrix();
  for (Eigen::Index b = 0; b < spec.dim(); ++b) {
    for (Eigen::Index a = 0; a < spec.dim(); ++a) {
      m(a, b) *= std::polar(1.0, -omega * t * (spec.total_excitation(a) - spec.total_excitation(b)));
    }
  }
  return DensityMatrix(spec, m);
}

Outcome dfs_invariance() {
  std::mt19937_64 rng(101);
  const TruncationSpec spec(2, 5);
  double worst = 1.0;
  std::size_t checked = 0;
  const std::array<std::array<double, 3>, 3> params{{{0.6, 1.4, 1.0}, {1.0, 1.0, 0.7}, {0.3, 2.0, 1.5}}};
  for (const auto& [k1, k2, w] : params) {
    const double theta = coupling::theta_from_rates(k1, k2);
    const auto gen = lindblad::build_bm_generator({{k1, k2}, {}, 0.0}, w, spec);
    const auto times = linspace(0.0, 10.0 / (k1 + k2), 11);
    for (int rank : {1, 3}) {
      // Up to four excitations in the decoupled mode.
      const CMatrix x = random_matrix(rng, 5, rank);
      CMatrix c = x * x.adjoint();
      c /= c.trace();
      const auto rho0 = fock::dfs_state(c, theta, spec);
      const auto num = tracked_propagate(gen, rho0, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto target = free_image(rho0, w, times[i]);
        const auto ana = apply_map(propagator::markov_coefficients(k1, k2, 0.0, w, times[i]), rho0);
        const double f_num = rank == 1 ? fock::fidelity(num.states[i], target) : normalized_overlap(num.states[i], target);
        const double f_ana = rank == 1 ? fock::fidelity(ana, target) : normalized_overlap(ana, target);
        worst = std::min({worst, f_num, f_ana});
        checked += 2;
      }
    }
  }
  return {worst >= 1.0 - 1e-8, std::to_string(checked) + " comparisons, min fidelity " + fmt("%.12f", worst)};
}

Outcome analytic_vs_numeric() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> rate(0.2, 1.5), freq(0.5, 2.0), u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double k1 = rate(rng), k2 = rate(rng), w = freq(rng);
    const double nbar = trial % 2 == 0 ? 0.0 : 0.5;
    const double k = k1 + k2;
    // Thermal runs stay short so the numeric truncation holds the raised state.
    const double t = nbar > 0.0 ? (0.03 + 0.12 * u(rng)) / k : (0.2 + 2.8 * u(rng)) / k;
    const TruncationSpec num_spec(2, nbar > 0.0 ? 8 : 3);
    const TruncationSpec map_spec(2, nbar > 0.0 ? 20 : 3);
    const auto rho0 = random_state(rng, num_spec, 2, 3);
    const auto gen = lindblad::build_bm_generator({{k1, k2}, {}, nbar}, w, num_spec);
    const auto num = tracked_propagate(gen, rho0, {0.0, t});
    const auto ana = fock::change_truncation(
        apply_map(propagator::markov_coefficients(k1, k2, nbar, w, t), fock::change_truncation(rho0, map_spec)),
        num_spec);
    worst = std::max(worst, max_abs(num.states.back().matrix() - ana.matrix()));
  }
  return {worst < 1e-6, "20 tuples, max elementwise deviation " + fmt("%.3e", worst)};
}

Outcome asymptotic_state() {
  const TruncationSpec spec(2, 1);
  const std::array<std::array<double, 4>, 4> cases{{{1.0, 1.0, 0.0, 0.0}, {1.0, 4.0, 0.4, 0.9}, {0.5, 1.5, 1.2, -0.7},
                                                    {2.0, 0.7, -0.3, 2.1}}};
  double worst_td = 0.0;
  for (const auto& [k1, k2, alpha, phi] : cases) {
    const auto gen = lindblad::build_bm_generator({{k1, k2}, {}, 0.0}, 1.0, spec);
    const auto rho0 = fock::one_photon_state(fock::ModeVector::from_angles(alpha, phi), spec);
    const auto ss = lindblad::steady_state(gen, rho0, {.tolerance = 1e-10, .t_max = 1e3, .check_interval = 2.0, .stepper = {}});
    cptp.add(ss);
    const auto expect = propagator::asymptotic_density(propagator::asymptotic_state(k1, k2, alpha, phi), spec);
    // The surviving mode keeps rotating at omega; compare after removing the free phase.
    const double phase_t = std::arg(ss(1, 0) * std::conj(expect(1, 0)) + ss(2, 0) * std::conj(expect(2, 0)));
    CMatrix aligned = ss.matrix();
    for (Eigen::Index a = 1; a < 3; ++a) {
      aligned(a, 0) *= std::polar(1.0, -phase_t);
      aligned(0, a) *= std::polar(1.0, phase_t);
    }
    worst_td = std::max(worst_td, fock::trace_distance(DensityMatrix(spec, aligned), expect));
  }
  const double k1 = 1.0, k2 = 4.0;
  const double p_one = propagator::asymptotic_state(k1, k2, std::atan(-std::sqrt(k1 / k2)), 0.0).weight;
  const double p_zero = propagator::asymptotic_state(k1, k2, std::atan(std::sqrt(k2 / k1)), 0.0).weight;
  const double limit_err = std::max(std::abs(p_one - 1.0), std::abs(p_zero));
  return {worst_td < 1e-6 && limit_err < 1e-10,
          "max trace distance " + fmt("%.3e", worst_td) + ", limit cases off by " + fmt("%.1e", limit_err) +
              " (P=1 at tan a=-sqrt(k1/k2), P=0 at tan a=sqrt(k2/k1))"};
}

Outcome one_photon_realistic() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> rate(0.2, 2.0), freq(0.5, 1.5), frac(0.0, 0.95), ang(-kPi, kPi);
  const TruncationSpec spec(2, 1);
  const auto times = linspace(0.0, 3.0, 13);
  double worst = 0.0, worst_det = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double k1 = rate(rng), k2 = rate(rng), w1 = freq(rng), w2 = freq(rng);
    const Complex k3 = std::polar(std::sqrt(k1 * k2) * frac(rng), ang(rng));
    const double alpha = ang(rng), phi = ang(rng);
    const auto gen = lindblad::build_realistic_generator({{k1, k2}, k3, 0.0}, w1, w2, spec);
    const auto rho0 = fock::one_photon_state(fock::ModeVector::from_angles(alpha, phi), spec);
    const auto num = tracked_propagate(gen, rho0, times, {.step = 1e-3});
    const auto sol = realistic::one_photon_evolution(k1, k2, k3, w1, w2, alpha, phi, times);
    const Complex R{0.5 * (k1 + k2), 0.5 * (w1 + w2)};
    for (std::size_t i = 0; i < times.size(); ++i) {
      worst = std::max(worst, max_abs(num.states[i].matrix() - sol.density(i, spec).matrix()));
      worst = std::max(worst, std::abs(1.0 - num.states[i](0, 0).real() - sol.p[i]));
      const Complex det = realistic::transfer_matrix(k1, k2, k3, w1, w2, times[i]).determinant();
      worst_det = std::max(worst_det, std::abs(det - std::exp(-2.0 * R * times[i])));
    }
  }
  return {worst < 1e-7 && worst_det < 1e-10,
          "20 tuples, max state deviation " + fmt("%.3e", worst) + ", determinant error " + fmt("%.3e", worst_det)};
}

// Population decay rate of a one-photon preset under the realistic generator.
double fitted_population_rate(double delta_k, bool weak, double t_a, double t_b) {
  const TruncationSpec spec(2, 1);
  const auto gen = lindblad::build_realistic_generator({{1.0, 1.0}, 1.0 - delta_k, 0.0}, 1.0, 1.0, spec);
  const auto ic = realistic::sd_wd_initial_conditions(1.0, 1.0, 0.0, 1.0);
  const auto& a = weak ? ic.wd : ic.sd;
  const auto rho0 = fock::one_photon_state(fock::ModeVector::from_angles(a.alpha, a.phi), spec);
  const auto times = linspace(0.0, t_b, 121);
  const auto res = tracked_propagate(gen, rho0, times);
  std::vector<double> p;
  for (const auto& s : res.states) p.push_back(s.trace().real() - s(0, 0).real());
  return realistic::fit_decay_rate(times, p, t_a, t_b).rate;
}

Outcome mode_rates() {
  Outcome out;
  std::ostringstream d;
  for (double dk : {0.001, 0.01, 0.1}) {
    const auto pred = coupling::predicted_rates(1.0, 1.0, dk);
    const double wd = fitted_population_rate(dk, true, 1.0, 3.0);
    const double sd = fitted_population_rate(dk, false, 0.25, 1.5);
    const double wd_err = std::abs(wd - 2.0 * pred.k_wd) / (2.0 * pred.k_wd);
    const double sd_err = std::abs(0.5 * sd - pred.k_sd) / pred.k_sd;
    const bool ok = wd_err < (dk == 0.001 ? 0.03 : 0.10) && sd_err < 0.03;
    out.pass = out.pass && ok;
    d << "dk=" << dk << " WD " << fmt("%.2e", wd_err) << " SD " << fmt("%.2e", sd_err) << (ok ? "" : " (miss)")
      << "; ";
  }
  // Amplitude-form check at unequal rates, and the product form at k1 = k2.
  auto amp_gap = [](double dk) {
    const double k1 = 1.0, k2 = 4.0;
    return std::abs(realistic::eigen_rates(k1, k2, std::sqrt(k1 * k2) - dk, 1.0, 1.0).slow -
                    coupling::predicted_rates(k1, k2, dk).k_wd);
  };
  auto product_gap = [](double dk) {
    return std::abs(2.0 * realistic::eigen_rates(1.0, 1.0, 1.0 - dk, 1.0, 1.0).slow -
                    coupling::predicted_rates(1.0, 1.0, dk).k_wd);
  };
  const double a1 = amp_gap(0.1) / amp_gap(0.01), a2 = amp_gap(0.01) / amp_gap(0.001);
  const double p1 = product_gap(0.1) / product_gap(0.01), p2 = product_gap(0.01) / product_gap(0.001);
  const bool scaling = a1 >= 3.5 && a2 >= 3.5 && p1 >= 3.5 && p2 >= 3.5;
  out.pass = out.pass && scaling;
  d << "scaling |slow-k_WD| " << fmt("%.1f", a1) << "/" << fmt("%.1f", a2) << ", |2 slow-k_WD| " << fmt("%.1f", p1)
    << "/" << fmt("%.1f", p2);
  out.detail = d.str();
  return out;
}

Outcome separability_gate() {
  double worst = 0.0;
  const std::array<std::array<double, 3>, 3> cases{{{1.0, 4.0, 1.2}, {0.3, 0.3, 0.8}, {2.0, 0.5, 1.0}}};
  const TruncationSpec spec(2, 2);
  for (const auto& [k1, k2, w] : cases) {
    const auto gate = lindblad::build_realistic_generator({{k1, k2}, std::sqrt(k1 * k2), 0.0}, w, w, spec);
    const auto bm = lindblad::build_bm_generator({{k1, k2}, {}, 0.0}, w, spec);
    worst = std::max(worst, max_abs(gate.superoperator_matrix() - bm.superoperator_matrix()));
  }
  bool rejected = false;
  try {
    lindblad::build_realistic_generator({{1.0, 1.0}, 1.001, 0.0}, 1.0, 1.0, spec);
  } catch (const PhysicsGuardError&) {
    rejected = true;
  }
  return {worst < 1e-12 && rejected,
          "max superoperator difference " + fmt("%.3e", worst) + (rejected ? ", |k3|^2 > k1 k2 rejected" : ", guard missing")};
}

// Error of <n> at t = 0.5 for single-mode decay from |1> with step h.
double decay_error(double h) {
  const TruncationSpec spec(1, 2);
  const auto gen = lindblad::build_bm_generator({{1.0}, {}, 0.0}, 1.0, spec);
  const auto rho0 = DensityMatrix::pure(spec, fock::basis_vector(spec, {{1}}));
  const auto res = tracked_propagate(gen, rho0, {0.0, 0.5}, {.step = h});
  return std::abs(fock::expectation(res.states.back(), fock::number_operator(0, spec)).real() - std::exp(-1.0));
}

Outcome cptp_sanity() {
  const double e1 = decay_error(0.008), e2 = decay_error(0.004), e3 = decay_error(0.002);
  const double order = std::min(std::log2(e1 / e2), std::log2(e2 / e3));
  const bool ok = cptp.trace < 1e-8 && cptp.hermiticity < 1e-10 && cptp.min_eig > -1e-8 && order >= 3.8;
  return {ok, std::to_string(cptp.states) + " states, trace " + fmt("%.1e", cptp.trace) + ", hermiticity " +
                  fmt("%.1e", cptp.hermiticity) + ", min eig " + fmt("%.1e", cptp.min_eig) + ", RK4 order " +
                  fmt("%.2f", order)};
}

Outcome memory_kernel() {
  bool ok = true;
  std::ostringstream d;
  // eta(0) = 1 for every bath.
  const memory::TimeGrid tiny{0.01, 3};
  for (const auto& sd : {memory::SpectralDensity::discrete({}), memory::SpectralDensity::discrete({{1.0, 0.5}}),
                         memory::SpectralDensity::ohmic({0.01, 5.0})}) {
    ok = ok && memory::solve_eta(sd, 1.0, tiny)[0] == Complex(1.0);
  }
  // Resonant single mode.
  const double w = 1.0, g = 0.5;
  const memory::TimeGrid grid{0.005, 601};
  const auto eta = memory::solve_eta(memory::SpectralDensity::discrete({{w, g}}), w, grid);
  double res_err = 0.0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    res_err = std::max(res_err, std::abs(eta[i] - std::polar(1.0, -w * grid[i]) * std::cos(g * grid[i])));
  }
  ok = ok && res_err < 1e-8;
  d << "resonant error " << fmt("%.2e", res_err);
  // Ohmic bath, weak coupling: lambda plateaus at J(w) once the kernel transient fades.
  const double amp = 0.002, cutoff = 50.0;
  const memory::OhmicDensity ohmic{amp, cutoff};
  const double lambda_ref = ohmic(w);
  const memory::TimeGrid og{0.005, 8001};
  const auto sol = memory::solve_memory_kernel(memory::SpectralDensity::ohmic(ohmic), w, kInf, og);
  double lam_dev = 0.0, delta_max = 0.0;
  for (std::size_t i = 1000; i + 1 < og.count; ++i) {
    lam_dev = std::max(lam_dev, std::abs(sol.lambda[i] - lambda_ref) / lambda_ref);
    delta_max = std::max(delta_max, std::abs(sol.delta[i]));
  }
  ok = ok && lam_dev < 0.05 && delta_max < 0.05 * w;
  d << ", Ohmic lambda plateau within " << fmt("%.2f", 100.0 * lam_dev) << "% for t >= 5, max |delta|/w "
    << fmt("%.3f", delta_max / w);
  // Markovian eta through the general coefficient map.
  const double k1 = 0.4, k2 = 0.9, nbar = 0.5, wm = 1.2;
  const memory::TimeGrid mg{0.01, 301};
  std::vector<Complex> me;
  std::vector<double> cap;
  for (std::size_t i = 0; i < mg.count; ++i) {
    me.push_back(std::exp(Complex(-(k1 + k2), -wm) * mg[i]));
    cap.push_back(nbar * -std::expm1(-2.0 * (k1 + k2) * mg[i]));
  }
  const auto from_eta = propagator::coefficients_from_eta(me, cap, mg, coupling::theta_from_rates(k1, k2), wm);
  double coef_err = 0.0;
  for (std::size_t i = 0; i < mg.count; ++i) {
    const auto m = propagator::markov_coefficients(k1, k2, nbar, wm, mg[i]);
    coef_err = std::max({coef_err, std::abs(from_eta[i].v - m.v), std::abs(from_eta[i].x - m.x),
                         std::abs(from_eta[i].z - m.z)});
  }
  ok = ok && coef_err < 1e-8;
  d << ", Markov coefficients error " << fmt("%.1e", coef_err);
  return {ok, d.str()};
}

Outcome superradiance() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> rate(0.2, 1.2);
  bool ok = true;
  std::ostringstream d;
  for (int n = 2; n <= 4; ++n) {
    std::vector<double> k;
    for (int i = 0; i < n; ++i) k.push_back(rate(rng));
    const double total = std::accumulate(k.begin(), k.end(), 0.0);
    const double kmax = *std::max_element(k.begin(), k.end());
    const TruncationSpec spec(n, 1);
    const auto gen = lindblad::build_bm_generator({k, {}, 0.0}, 1.0, spec);
    const auto a1 = lindblad::collective_operators(coupling::coupling_from_rates(k), spec)[0];
    const CVector ket = a1.adjoint() * fock::basis_vector(spec, {std::vector<int>(static_cast<std::size_t>(n), 0)});
    const auto times = linspace(0.0, 3.0 / total, 61);
    const auto res = tracked_propagate(gen, DensityMatrix::pure(spec, ket), times);
    std::vector<double> pop;
    for (const auto& s : res.states) pop.push_back(fock::expectation(s, a1.adjoint() * a1).real());
    const double fitted = 0.5 * realistic::fit_decay_rate(times, pop, 0.0, times.back()).rate;
    const double err = std::abs(fitted - total) / total;
    ok = ok && err < 0.02 && fitted > kmax;
    d << "N=" << n << " k=" << fmt("%.4f", fitted) << " (sum " << fmt("%.4f", total) << ", max " << fmt("%.4f", kmax)
      << ")" << (n < 4 ? "; " : "");
  }
  return {ok, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("wdsim_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const auto cfg = scenario::parse_config(json::parse(R"({
    "name": "wd",
    "model": "realistic_two",
    "params": {"k1": 1.0, "k2": 1.0, "delta_k": 0.01, "omega": 1.0, "delta_omega": 0.0},
    "initial_state": {"alpha": "wd"},
    "time": {"t_max": 3.0, "steps": 301},
    "truncation": {"max_excitation": 1}
  })"));
  scenario::run_scenario(cfg, root / "a");
  scenario::run_scenario(cfg, root / "b");
  bool identical = true;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    if (e.path().extension() != ".csv") continue;
    identical = identical && slurp(e.path()) == slurp(root / "b" / e.path().filename());
    ++files;
  }

  const auto sweep = scenario::parse_config(json::parse(R"({
    "name": "alpha_sweep",
    "model": "markovian_n",
    "params": {"k": [1.0, 2.0], "omega": 1.0},
    "initial_state": {"alpha": 0.0, "phi": 0.0},
    "time": {"t_max": 12.0, "steps": 13},
    "truncation": {"max_excitation": 1},
    "stepper": {"step": 0.002},
    "sweep": [{"param": "alpha", "linspace": [0.0, 3.0, 13]}]
  })"));
  scenario::run_sweep(sweep, root / "sweep", 2);
  std::istringstream csv(slurp(root / "sweep" / "summary.csv"));
  std::string line;
  std::getline(csv, line);
  double worst = 0.0;
  std::size_t rows = 0;
  bool header_ok = line == "index,alpha,fitted_rate,predicted_rate,ratio,p_numeric,p_formula";
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::istringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) f.push_back(cell);
    if (f.size() != 7) {
      header_ok = false;
      break;
    }
    worst = std::max(worst, std::abs(std::stod(f[5]) - std::stod(f[6])));
    ++rows;
  }
  fs::remove_all(root);
  const bool ok = identical && files >= 2 && header_ok && rows == 13 && worst < 1e-10;
  return {ok, std::to_string(files) + " CSV files " + (identical ? "byte-identical" : "DIFFER") + ", " +
                  std::to_string(rows) + " sweep points, max |P_numeric - P| " + fmt("%.2e", worst)};
}

}  // namespace

int main() {
  struct Gate {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // CPTP sanity runs last so that it covers every other propagation.
  const std::vector<Gate> gates{
      {1, "DFS invariance", dfs_invariance},
      {2, "closed-form map vs RK4", analytic_vs_numeric},
      {3, "asymptotic state", asymptotic_state},
      {4, "one-photon realistic solution", one_photon_realistic},
      {5, "weak/strong decoherence rates", mode_rates},
      {6, "separability gate", separability_gate},
      {8, "memory kernel", memory_kernel},
      {9, "superradiance", superradiance},
      {10, "end-to-end determinism", determinism},
      {7, "CPTP sanity", cptp_sanity},
  };
  std::vector<std::pair<const Gate*, Outcome>> results;
  for (const auto& g : gates) {
    Outcome o;
    try {
      o = g.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    results.emplace_back(&g, o);
  }
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
  int failed = 0;
  for (const auto& [g, o] : results) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", g->id, g->name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
