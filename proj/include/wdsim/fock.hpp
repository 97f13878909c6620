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

// Truncated multimode Fock space: basis, ladder operators, states, metrics.
//
// Basis ordering is lexicographic in the occupation vector with mode 0 the
// slowest index:  index(n) = sum_i n_i * (M+1)^(N-1-i).  Serialization and
// every dense operator in the library use this ordering.

#pragma once

#include "wdsim/common.hpp"

#include <json.hpp>

#include <span>
#include <vector>

namespace wds::fock {

class TruncationSpec {
 public:
  /// Throws std::invalid_argument unless modes >= 1 and the total dimension
  /// (max+1)^modes is at least 2.
  TruncationSpec(int num_modes, int max_excitation_per_mode);

  int num_modes() const { return num_modes_; }
  int max_excitation() const { return max_excitation_; }
  Eigen::Index dim() const { return dim_; }

  Eigen::Index index_of(std::span<const int> occupations) const;
  std::vector<int> occupations_of(Eigen::Index index) const;
  int total_excitation(Eigen::Index index) const;

  bool operator==(const TruncationSpec&) const = default;

 private:
  int num_modes_;
  int max_excitation_;
  Eigen::Index dim_;
};

/// Normalized amplitudes of a mode on the original oscillators a_i.
class ModeVector {
 public:
  /// Normalizes `coefficients`; throws std::invalid_argument on zero norm.
  explicit ModeVector(CVector coefficients);

  /// Two-oscillator mode cos(alpha) a1 + e^{i phi} sin(alpha) a2.
  static ModeVector from_angles(double alpha, double phi);

  const CVector& coefficients() const { return c_; }
  Eigen::Index size() const { return c_.size(); }
  Complex operator[](Eigen::Index i) const { return c_(i); }

 private:
  CVector c_;
};

struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;
};

struct Tolerances {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double positivity = 1e-10;
};

class DensityMatrix {
 public:
  /// No physics validation beyond shape; see checked() and diagnostics().
  DensityMatrix(TruncationSpec spec, CMatrix entries);

  /// Validates Hermiticity, unit trace and positivity against `tol`;
  /// throws std::invalid_argument with the offending measure.
  static DensityMatrix checked(TruncationSpec spec, CMatrix entries, const Tolerances& tol = {});

  static DensityMatrix vacuum(const TruncationSpec& spec);
  static DensityMatrix pure(const TruncationSpec& spec, const CVector& ket);

  const TruncationSpec& spec() const { return spec_; }
  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  StateDiagnostics diagnostics() const;
  Complex trace() const { return m_.trace(); }

 private:
  TruncationSpec spec_;
  CMatrix m_;
};

struct FockBasisState {
  std::vector<int> occupations;
};

/// Annihilation matrix of `mode` on the full tensor space. The top level of
/// each mode is truncated, so [a, a^dagger] = 1 only below it.
CMatrix ladder_operator(int mode, const TruncationSpec& spec);
CMatrix number_operator(int mode, const TruncationSpec& spec);
CVector basis_vector(const TruncationSpec& spec, const FockBasisState& state);

/// sum_i c_i a_i^dagger |0...0>
CVector one_photon_vector(const ModeVector& mode, const TruncationSpec& spec);
DensityMatrix one_photon_state(const ModeVector& mode, const TruncationSpec& spec);

/// Two-oscillator state  sum_{n,m} rho_{nm} |n><m|  in the number basis of
/// the collective mode A2 = -sin(theta) a1 + cos(theta) a2, with A1 in its
/// vacuum, expanded binomially in the original basis. `coeffs` must be a
/// Hermitian PSD unit-trace matrix of size at most max_excitation+1.
DensityMatrix dfs_state(const CMatrix& coeffs, double theta, const TruncationSpec& spec);

/// Fock-space unitary W mapping |m> to prod_i (B_i^dagger)^{m_i}/sqrt(m_i!) |0>,
/// where B_i = sum_j rotation(i, j) a_j are the collective modes. Exact on every
/// total-excitation sector that fits in the truncation (total <= max); the
/// identity on the remaining, partially truncated sectors.
CMatrix collective_transform(const CMatrix& rotation, const TruncationSpec& spec);

/// Overlap fidelity Tr(rho sigma).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double purity(const DensityMatrix& rho);
/// (1/2) || rho - sigma ||_1
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
/// <psi|rho|psi> with psi the one-photon state of `mode`.
double mode_population(const DensityMatrix& rho, const ModeVector& mode);
/// Tr(rho op)
Complex expectation(const DensityMatrix& rho, const CMatrix& op);

/// Copies entries onto a different per-mode truncation (same mode count).
/// Entries with an occupation above the target maximum are dropped.
DensityMatrix change_truncation(const DensityMatrix& rho, const TruncationSpec& target);

/// Ascending eigenvalues of the Hermitian part.
RVector hermitian_eigenvalues(const CMatrix& m);

nlohmann::json to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

}  // namespace wds::fock
