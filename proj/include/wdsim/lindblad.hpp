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

// Master-equation generators and the fixed-step RK4 propagator.
//
// A generator is
//
//   d rho/dt = -i [H(t), rho]
//              + sum_m r_m(t) (2 L_m rho R_m^dagger - R_m^dagger L_m rho - rho R_m^dagger L_m)
//
// with hbar = 1. Diagonal terms have L = R; a Kossakowski cross term pairs
// (L, R, r) with (R, L, conj(r)).

#pragma once

#include "wdsim/common.hpp"
#include "wdsim/coupling.hpp"
#include "wdsim/fock.hpp"
#include "wdsim/memory_kernel.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace wds::lindblad {

/// Constant, or piecewise-linear on increasing nodes (no extrapolation).
class Schedule {
 public:
  static Schedule constant(double value);
  static Schedule tabulated(std::vector<double> times, std::vector<double> values);

  /// Throws std::out_of_range outside the tabulated span.
  double at(double t) const;
  double max_abs() const;
  bool is_constant() const { return times_.empty(); }
  std::pair<double, double> span() const;

 private:
  double constant_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

struct DissipatorTerm {
  CMatrix left;
  CMatrix right;
  Complex rate;
  Schedule scale = Schedule::constant(1.0);
};

struct HamiltonianTerm {
  CMatrix op;
  Schedule coefficient;
};

class LindbladGenerator {
 public:
  LindbladGenerator(fock::TruncationSpec spec, CMatrix hamiltonian);

  void add_dissipator(DissipatorTerm term);
  void add_hamiltonian_term(HamiltonianTerm term);

  const fock::TruncationSpec& spec() const { return spec_; }
  const CMatrix& hamiltonian() const { return hamiltonian_; }
  const std::vector<DissipatorTerm>& dissipators() const { return terms_; }
  const std::vector<HamiltonianTerm>& hamiltonian_terms() const { return h_terms_; }
  bool time_dependent() const;
  /// Intersection of all tabulated schedule spans; nullopt if time independent.
  std::optional<std::pair<double, double>> time_span() const;

  /// d rho / dt at time t.
  CMatrix apply(double t, const CMatrix& rho) const;

  /// Upper bound on the induced 2-norm of the superoperator over all t,
  /// from sqrt(||X||_1 ||X||_inf) bounds on the component matrices.
  double norm_bound() const;

  /// Dense dim^2 x dim^2 matrix acting on column-stacked rho.
  CMatrix superoperator_matrix(double t = 0.0) const;

 private:
  struct Prepared {
    CMatrix left_t;     // L^T
    CMatrix right_adj;  // R^dagger
    CMatrix rdag_l;     // R^dagger L
  };
  void left_right_ops(double t, CMatrix& k_left_t, CMatrix& k_right) const;

  fock::TruncationSpec spec_;
  CMatrix hamiltonian_;
  std::vector<DissipatorTerm> terms_;
  std::vector<Prepared> prepared_;
  std::vector<HamiltonianTerm> h_terms_;
};

/// Collective operators A_i = sum_j R(i, j) a_j for R = collective_rotation(G).
std::vector<CMatrix> collective_operators(const CVector& G, const fock::TruncationSpec& spec);

/// Born-Markov generator: H = w sum_i A_i^dagger A_i, dissipators
/// (A1, k(nbar+1)) and (A1^dagger, k nbar) with k = sum_i k_i.
/// The collective direction is `G` when given, else G_i = sqrt(k_i).
LindbladGenerator build_bm_generator(const coupling::RateModel& rates, double omega, const fock::TruncationSpec& spec,
                                     const std::optional<CVector>& G = std::nullopt);

/// Same from a coupling model: requires separable couplings (rank-1 g) and
/// degenerate oscillator frequencies, else PhysicsGuardError. `collective_rate`
/// is k = sum_i k_i.
LindbladGenerator build_bm_generator(const coupling::CouplingModel& model, double collective_rate, double nbar,
                                     const fock::TruncationSpec& spec);

/// Zero-temperature two-oscillator generator with local rates k1, k2, cross
/// rate k3 and frequencies omega1, omega2. Refuses |k3|^2 > k1 k2 with
/// PhysicsGuardError unless allow_unphysical.
LindbladGenerator build_realistic_generator(const coupling::RateModel& rates, double omega1, double omega2,
                                            const fock::TruncationSpec& spec, bool allow_unphysical = false);

/// Time-dependent generator fed by a memory-kernel solution:
/// H = w sum_i A_i^dagger A_i + delta(t) A1^dagger A1, rates lambda + epsilon on
/// A1 and epsilon on A1^dagger, linearly interpolated on the kernel grid.
LindbladGenerator build_time_dependent_generator(const memory::MemoryKernelSolution& kernel, const CVector& G,
                                                 const fock::TruncationSpec& spec);

struct StepperConfig {
  /// Fixed RK4 step; 0 picks 0.09 / norm_bound().
  double step = 0.0;
  /// Combine steps h and h/2 as (16 y_{h/2} - y_h) / 15 per output interval.
  bool richardson = false;
  bool renormalize_trace = false;
  /// Compute the minimum eigenvalue at every output time.
  bool track_positivity = true;
};

struct PropagationResult {
  std::vector<double> times;
  std::vector<fock::DensityMatrix> states;
  std::vector<double> trace_error;
  std::vector<double> min_eigenvalue;
  std::vector<double> hermiticity_error;
  double step = 0.0;

  double max_trace_error() const;
  double worst_min_eigenvalue() const;
  double max_hermiticity_error() const;
};

/// Propagates rho0 (taken at times.front()) to every time in `times`.
/// Throws NumericError when h * norm_bound() >= 0.1 or a NaN appears.
PropagationResult propagate(const LindbladGenerator& gen, const fock::DensityMatrix& rho0,
                            const std::vector<double>& times, const StepperConfig& cfg = {});

struct SteadyStateConfig {
  double tolerance = 1e-10;  // on || d rho/dt ||_1
  double t_max = 1e4;
  double check_interval = 1.0;
  StepperConfig stepper;
};

/// Integrates until || L rho ||_1 < tolerance. Throws NumericError on
/// non-convergence and std::invalid_argument for time-dependent generators.
fock::DensityMatrix steady_state(const LindbladGenerator& gen, const fock::DensityMatrix& rho0,
                                 const SteadyStateConfig& cfg = {});

/// Named scalar of (time, state).
using Observable = std::pair<std::string, std::function<double(double, const fock::DensityMatrix&)>>;

/// CSV: time, trace_error, min_eig, then one column per observable.
void write_csv(const PropagationResult& result, const std::vector<Observable>& observables, std::ostream& out);

}  // namespace wds::lindblad
