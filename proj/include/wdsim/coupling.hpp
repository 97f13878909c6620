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

// System-bath coupling models, the separability test, collective modes and
// the weak/strong decoherence mode predictions.

#pragma once

#include "wdsim/common.hpp"
#include "wdsim/fock.hpp"

#include <json.hpp>

#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace wds::coupling {

/// g_{ik} = G_i D_k
struct FactorizedCoupling {
  CVector G;
  CVector D;
};

struct CouplingModel {
  RVector frequencies;                                  // omega_i
  std::variant<CMatrix, FactorizedCoupling> coupling;   // g_{ik} or (G, D)
  RVector bath_frequencies;                             // omega_k
  double beta = std::numeric_limits<double>::infinity();  // inverse temperature

  int num_oscillators() const { return static_cast<int>(frequencies.size()); }
  bool factorized() const { return std::holds_alternative<FactorizedCoupling>(coupling); }
  /// c_k = sum_i |G_i|^2 conj(D_k); throws std::logic_error for a full matrix.
  CVector collective_bath_coupling() const;
  /// Full g_{ik}, expanding a factorized coupling if needed.
  CMatrix coupling_matrix() const;
  /// Throws ConfigError on inconsistent sizes or values.
  void validate() const;
};

/// Markovian damping constants.
struct RateModel {
  std::vector<double> k;  // individual k_i >= 0
  Complex k3{};           // cross rate of the two-oscillator model
  double nbar = 0.0;      // thermal occupation at omega

  double total() const;
};

struct DeviationParams {
  double delta_k;      // sqrt(k1 k2) - |k3|
  double delta_omega;  // (omega2 - omega1) / 2

  static DeviationParams from(double k1, double k2, Complex k3, double omega1, double omega2);
};

struct SeparabilityResult {
  bool separable = false;
  double defect = 0.0;  // sigma_2 / sigma_1
  std::optional<FactorizedCoupling> factors;
};

/// Rank-1 test on g via its two largest singular values.
SeparabilityResult separability_check(const CMatrix& g, double tol = 1e-10);

/// Unitary whose first row is G/|G| and whose remaining rows complete an
/// orthonormal basis (Gram-Schmidt over e_2, ..., e_N, e_1, each row phased so
/// its diagonal entry is real nonnegative); A_i = sum_j R(i, j) a_j. For N = 2
/// and real positive G this is the rotation by theta = atan(G2/G1).
CMatrix collective_rotation(const CVector& G);

/// G_i = sqrt(k_i): the coupling profile implied by Markovian rates.
CVector coupling_from_rates(const std::vector<double>& k);

/// atan(sqrt(k2/k1)) in [0, pi/2)
double theta_from_rates(double k1, double k2);

struct ModePair {
  fock::ModeVector weak;
  fock::ModeVector strong;
};

/// Weak/strong decoherence modes. `k` is the averaged damping in the phase
/// factor delta_omega/k; defaults to (k1 + k2)/2.
ModePair wd_sd_modes(double k1, double k2, double delta_omega, std::optional<double> k = std::nullopt);

struct PredictedRates {
  double k_wd;
  double k_sd;
};

/// Amplitude damping constants of the two modes:
/// k_WD = 2 dk sqrt(k1 k2)/(k1 + k2), k_SD = k1 + k2.
PredictedRates predicted_rates(double k1, double k2, double delta_k);

struct CauchySchwarzResult {
  bool physical;
  double slack;  // k1 k2 - |k3|^2
};

CauchySchwarzResult cauchy_schwarz_check(const RateModel& rates);

/// Accepts a number or a [re, im] pair.
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json complex_to_json(Complex z);

/// {"frequencies": [...], "G": [...], "D": [...]} or {"frequencies": [...], "g": [[...]]}
/// plus "bath_frequencies" and optional "beta" (null or absent = zero temperature).
CouplingModel coupling_model_from_json(const nlohmann::json& j);

}  // namespace wds::coupling
