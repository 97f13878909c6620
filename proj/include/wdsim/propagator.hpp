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

// Closed-form evolution of two degenerate oscillators sharing one bath.
//
// In the collective basis (A1 coupled, A2 free) the reduced dynamics is the
// damped, thermally driven A1 oscillator times free A2 rotation. With the
// coefficients v, x, z the map is, applied in this order,
//
//   rho -> sum_j z^j/j! A1^j rho A1^dagger^j
//       -> exp(x A1^dagger A1) rho exp(x* A1^dagger A1)
//       -> sum_j (1-v)^j/j! A1^dagger^j rho A1^j
//       -> v rho
//       -> exp(-i w t A2^dagger A2) rho exp(i w t A2^dagger A2)

#pragma once

#include "wdsim/common.hpp"
#include "wdsim/fock.hpp"
#include "wdsim/memory_kernel.hpp"

#include <ostream>
#include <span>
#include <vector>

namespace wds::propagator {

struct PropagatorCoefficients {
  double v = 1.0;
  Complex x{};
  double z = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  double t = 0.0;
};

/// Born-Markov coefficients with k = k1 + k2 and theta = atan(sqrt(k2/k1)).
PropagatorCoefficients markov_coefficients(double k1, double k2, double nbar, double omega, double t);

/// Coefficients from an eta trajectory and its thermal occupation N:
///   v = 1/(1+N),  x = ln(eta / (1+N)),  z = 1 - |eta|^2/(1+N),
/// i.e. an attenuator of transmissivity |eta|^2/(1+N) followed by an
/// amplifier of gain 1+N.
/// Im x follows arg(eta) continuously from x(0) = 0. Throws NumericError at
/// the first node where eta vanishes.
std::vector<PropagatorCoefficients> coefficients_from_eta(std::span<const Complex> eta,
                                                          std::span<const double> capacity,
                                                          const memory::TimeGrid& grid, double theta, double omega);

/// Rotation [[cos, sin], [-sin, cos]]: rows are A1 and A2 on (a1, a2).
CMatrix rotation_for_theta(double theta);

/// Applies the map to a two-mode state. Exact when rho0 and the thermally
/// raised state live in total excitation < max_excitation; NumericError if
/// the raised state puts more than 1e-8 population at total excitation
/// >= max_excitation, or if the trace moves by more than 1e-8.
fock::DensityMatrix apply_superoperator(const PropagatorCoefficients& c, const fock::DensityMatrix& rho0);

struct AsymptoticResult {
  fock::ModeVector psi;  // surviving one-photon mode
  double weight;         // P
  double fidelity;       // F_inf = P^2
};

/// Long-time limit at zero temperature from the one-photon initial state
/// cos(alpha) a1^dagger + e^{i phi} sin(alpha) a2^dagger acting on vacuum.
AsymptoticResult asymptotic_state(double k1, double k2, double alpha, double phi);

/// P |psi><psi| + (1 - P) |0,0><0,0|
fock::DensityMatrix asymptotic_density(const AsymptoticResult& r, const fock::TruncationSpec& spec);

/// CSV columns t, v, re_x, im_x, z.
void write_coefficients_csv(std::span<const PropagatorCoefficients> coeffs, std::ostream& out);

}  // namespace wds::propagator
