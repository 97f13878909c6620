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

// Non-Markovian memory of the collective mode.
//
// The amplitude eta(t) of the bath-coupled collective mode obeys
//
//   d eta/dt + i w eta + int_0^t K(t - s) eta(s) ds = 0,   eta(0) = 1,
//   K(u) = sum_k |c_k|^2 exp(-/+ i w_k u).
//
// Integrating once turns it into a second-kind Volterra equation with the
// convolution kernel  H(u) = -i w - L(u),  L(u) = int_0^u K,  which is solved
// with the fourth-order block-by-block (Simpson) scheme. From eta follow the
// damping lambda = -d ln|eta|/dt, the shift delta = -d arg(eta)/dt - w, the
// thermal rate epsilon(t) and the thermal occupation N(t).

#pragma once

#include "wdsim/common.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace wds::memory {

enum class KernelSign {
  kConjugate,  // K(u) = sum |c_k|^2 exp(-i w_k u); decaying |eta| for physical baths
  kAsPrinted,  // K(u) = sum |c_k|^2 exp(+i w_k u)
};

struct BathMode {
  double omega;
  Complex coupling;  // c_k
};

/// Ohmic J(w) = A w exp(-w / w_c). Discretized with Gauss-Legendre nodes on
/// [0, 10 w_c]; node k carries |c_k|^2 = J(w_k) weight_k / pi, so that the
/// Markovian damping constant at frequency w is J(w). The Volterra solve uses
/// the closed-form continuum kernel instead of the nodes: a finite node set
/// is a discrete bath with recurrences on the time scale 2 pi / (node spacing).
struct OhmicDensity {
  double amplitude;
  double cutoff;
  int order = 400;

  double operator()(double w) const;
};

class SpectralDensity {
 public:
  static SpectralDensity discrete(std::vector<BathMode> modes);
  static SpectralDensity ohmic(OhmicDensity density);

  /// Discrete representation: the given modes or the quadrature nodes.
  const std::vector<BathMode>& modes() const { return modes_; }
  const std::optional<OhmicDensity>& continuum() const { return continuum_; }
  bool empty() const { return modes_.empty(); }

 private:
  std::vector<BathMode> modes_;
  std::optional<OhmicDensity> continuum_;
};

/// {"type": "discrete", "modes": [{"omega": w, "coupling": c}, ...]} or
/// {"type": "ohmic", "amplitude": A, "cutoff": w_c, "order": n}.
SpectralDensity spectral_density_from_json(const nlohmann::json& j);

/// Uniform time grid t_i = i * step, i = 0..count-1.
struct TimeGrid {
  double step;
  std::size_t count;

  double operator[](std::size_t i) const { return static_cast<double>(i) * step; }
  double end() const { return (*this)[count - 1]; }
  std::vector<double> values() const;
};

struct MemoryKernelSolution {
  TimeGrid grid;
  double omega = 0.0;
  KernelSign sign = KernelSign::kConjugate;
  std::vector<Complex> eta;
  std::vector<double> lambda;
  std::vector<double> delta;
  std::vector<double> epsilon;
  std::vector<double> capacity;  // N(t)
  /// Derivative-based values at the first and last node use one-sided
  /// differences and are less accurate.
  bool endpoints_low_confidence = true;
};

/// Volterra solve for eta on `grid` (count >= 2). Throws NumericError if
/// |eta| exceeds 10.
std::vector<Complex> solve_eta(const SpectralDensity& sd, double omega, const TimeGrid& grid,
                               KernelSign sign = KernelSign::kConjugate);

struct Rates {
  std::vector<double> lambda;
  std::vector<double> delta;
};

/// Central differences of ln|eta| and the unwrapped phase (second-order
/// one-sided at the ends). Throws NumericError where |eta| < 1e-12.
Rates extract_rates(std::span<const Complex> eta, double omega, const TimeGrid& grid);

/// eta(t) = exp(-int lambda - i w t - i int delta) with trapezoidal integrals.
std::vector<Complex> reconstruct_eta(std::span<const double> lambda, std::span<const double> delta, double omega,
                                     const TimeGrid& grid);

/// Thermal occupation of the collective mode started in vacuum:
///   n(t) = sum_k |c_k|^2 n_k(beta) |int_0^t exp(-i w_k (t - s)) eta(s) ds|^2
/// with trapezoidal inner integrals. Zero at infinite beta.
std::vector<double> thermal_occupation(const SpectralDensity& sd, double beta, std::span<const Complex> eta,
                                       const TimeGrid& grid);

/// epsilon(t) = (|eta|^2 / 2) d/dt [ n(t) / |eta|^2 ]; throws std::invalid_argument
/// for beta <= 0. beta = +inf gives epsilon = 0.
std::vector<double> epsilon_thermal(const SpectralDensity& sd, double beta, std::span<const Complex> eta,
                                    const TimeGrid& grid);

/// N(t) = 2 int_0^t epsilon(s) |eta(t)/eta(s)|^2 ds, which is the occupation
/// n(t) above; N(0) = 0. Fourth-order cumulative quadrature.
std::vector<double> capacity_n(std::span<const double> epsilon, std::span<const Complex> eta, const TimeGrid& grid);

/// Full pipeline: eta, rates, epsilon, N.
MemoryKernelSolution solve_memory_kernel(const SpectralDensity& sd, double omega, double beta, const TimeGrid& grid,
                                         KernelSign sign = KernelSign::kConjugate);

/// Assembles a solution from given trajectories (all of grid.count length).
MemoryKernelSolution make_solution(const TimeGrid& grid, double omega, std::vector<Complex> eta,
                                   std::vector<double> lambda, std::vector<double> delta,
                                   std::vector<double> epsilon, std::vector<double> capacity);

}  // namespace wds::memory
