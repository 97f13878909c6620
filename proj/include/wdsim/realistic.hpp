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

// Two oscillators with local damping k1, k2, cross damping k3 and
// frequencies w1, w2 at zero temperature: closed-form one-photon sector,
// the weak/strong split near the decoherence-free point, and rate fits.
//
// One-photon amplitudes (c10, c01) evolve with exp(K t),
//   K = [[-i w1 - k1, -conj(k3)], [-k3, -i w2 - k2]],
// whose exponential is [[M+, Q12], [Q21, M-]] with
//   R = (k1+k2)/2 + i(w1+w2)/2,  c = k2-k1 + i(w2-w1),  r^2 = c^2 + 4|k3|^2,
//   M+/-(t) = e^{-Rt}/2 [e^{-rt/2}(1 -/+ c/r) + e^{rt/2}(1 +/- c/r)],
//   Q21(t) = (k3/r) e^{-Rt} (e^{-rt/2} - e^{rt/2}),  Q12 likewise with conj(k3).

#pragma once

#include "wdsim/common.hpp"
#include "wdsim/fock.hpp"

#include <json.hpp>

#include <ostream>
#include <span>
#include <vector>

namespace wds::realistic {

/// Scalars of the disentangled (normal-ordered) realistic propagator.
/// j_a, j_b and z follow an expression whose grouping is uncertain and are
/// exported for inspection only (low_confidence is always true).
struct AuxiliaryCoefficients {
  Complex R, c, r, delta_plus, delta_minus;
  Complex q, exp_ma, exp_mb;
  Complex j_a, j_b, z;
  bool low_confidence = true;
};

/// Branch of r: Re r >= 0, Im r >= 0 on ties. Throws NumericError at the
/// exceptional point r = 0.
Complex branch_r(double k1, double k2, Complex k3, double omega1, double omega2);

AuxiliaryCoefficients auxiliary_coefficients(double k1, double k2, Complex k3, double omega1, double omega2, double t);

struct OnePhotonSolution {
  std::vector<double> times;
  std::vector<Complex> m_plus, m_minus, q12, q21;
  std::vector<double> p;
  std::vector<CVector> psi;  // normalized (c10, c01); zero where P <= 1e-12

  /// P |psi><psi| + (1 - P) |0,0><0,0| at node i.
  fock::DensityMatrix density(std::size_t i, const fock::TruncationSpec& spec) const;
};

/// Evolves cos(alpha)|1,0> + e^{i phi} sin(alpha)|0,1>.
OnePhotonSolution one_photon_evolution(double k1, double k2, Complex k3, double omega1, double omega2, double alpha,
                                       double phi, std::span<const double> times);

/// Transfer matrix [[M+, Q12], [Q21, M-]] at one time.
Eigen::Matrix2cd transfer_matrix(double k1, double k2, Complex k3, double omega1, double omega2, double t);

struct ApproxModeSplit {
  Complex zeta1, zeta2, xi1, xi2;  // fast (1) and slow (2) amplitude pairs
  double rate_wd, rate_sd;         // amplitude rates
  double validity;                 // max(|dw|/k, dk/sqrt(k1 k2)), k = (k1+k2)/2
};

/// Amplitudes near k3 = sqrt(k1 k2) - dk, w2 - w1 = 2 dw:
///   psi(t) ~ e^{-iwt} [(zeta1, xi1) e^{-(k1+k2)t} + (zeta2, xi2) e^{-k_WD t}].
ApproxModeSplit approx_amplitudes(double k1, double k2, double delta_k, double delta_omega, double alpha, double phi);

nlohmann::json to_json(const ApproxModeSplit& s);

struct Angles {
  double alpha;
  double phi;
};

struct InitialConditions {
  Angles sd;
  Angles wd;
};

/// tan(alpha_SD) = sqrt(k2/k1), phi_SD = dw/k; tan(alpha_WD) = -sqrt(k1/k2),
/// phi_WD = -dw/k; alpha in (-pi/2, pi/2).
InitialConditions sd_wd_initial_conditions(double k1, double k2, double delta_omega, double k);

struct DecayFit {
  double rate;  // -slope of ln(value)
  double r2;
  std::size_t points;
};

/// Least-squares line through (t, ln value) for t in [t_a, t_b].
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t_a, double t_b);

struct EigenRates {
  double slow;  // Re R - Re r / 2
  double fast;  // Re R + Re r / 2
};

/// Amplitude decay rates of the two one-photon eigenmodes.
EigenRates eigen_rates(double k1, double k2, Complex k3, double omega1, double omega2);

/// CSV columns t, re_m_plus, im_m_plus, re_m_minus, im_m_minus, re_q, im_q, p,
/// re_psi1, im_psi1, re_psi2, im_psi2 (q is Q21).
void write_csv(const OnePhotonSolution& s, std::ostream& out);

}  // namespace wds::realistic
