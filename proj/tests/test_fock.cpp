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

#include "support.hpp"
#include "wdsim/fock.hpp"
#include "wdsim/propagator.hpp"

#include <doctest.h>

#include <cmath>

using namespace wds;
using fock::TruncationSpec;

namespace {

void check_physical(const fock::DensityMatrix& rho) {
  const auto d = rho.diagnostics();
  CHECK(d.hermiticity_error < 1e-12);
  CHECK(d.trace_error < 1e-10);
  CHECK(d.min_eigenvalue > -1e-10);
}

}  // namespace

TEST_CASE("ladder operator examples") {
  const TruncationSpec one(1, 1);
  const CMatrix a = fock::ladder_operator(0, one);
  CHECK(std::abs(a(0, 1) - 1.0) < 1e-15);

  const TruncationSpec two(1, 2);
  const CVector out = fock::ladder_operator(0, two) * fock::basis_vector(two, {{2}});
  CHECK(std::abs(out(1) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(out(0)) + std::abs(out(2)) == 0.0);

  // a1 leaves the mode-2 occupation alone.
  const TruncationSpec pair(2, 1);
  const CMatrix a1 = fock::ladder_operator(0, pair);
  for (int n2 = 0; n2 <= 1; ++n2) {
    const CVector v = a1 * fock::basis_vector(pair, {{1, n2}});
    CHECK(test::max_abs(v - fock::basis_vector(pair, {{0, n2}})) < 1e-15);
  }
}

TEST_CASE("basis indexing is lexicographic with mode 0 slowest") {
  const TruncationSpec spec(3, 2);
  CHECK(spec.dim() == 27);
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    const auto occ = spec.occupations_of(i);
    CHECK(spec.index_of(occ) == i);
    CHECK(i == occ[0] * 9 + occ[1] * 3 + occ[2]);
  }
  CHECK_THROWS_AS(TruncationSpec(0, 3), std::invalid_argument);
}

TEST_CASE("canonical commutator holds below the truncation edge") {
  const TruncationSpec spec(2, 3);
  for (int mode = 0; mode < 2; ++mode) {
    const CMatrix a = fock::ladder_operator(mode, spec);
    const CMatrix comm = a * a.adjoint() - a.adjoint() * a;
    for (Eigen::Index i = 0; i < spec.dim(); ++i) {
      if (spec.occupations_of(i)[static_cast<std::size_t>(mode)] < 3) CHECK(std::abs(comm(i, i) - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("one-photon states from angles") {
  const TruncationSpec spec(2, 1);
  const auto i10 = spec.index_of(std::vector{1, 0}), i01 = spec.index_of(std::vector{0, 1});
  auto rho = fock::one_photon_state(fock::ModeVector::from_angles(0.0, 0.0), spec);
  CHECK(std::abs(rho(i10, i10) - 1.0) < 1e-15);
  rho = fock::one_photon_state(fock::ModeVector::from_angles(kPi / 2, 0.0), spec);
  CHECK(std::abs(rho(i01, i01) - 1.0) < 1e-15);
  rho = fock::one_photon_state(fock::ModeVector::from_angles(kPi / 4, kPi / 2), spec);
  CHECK(std::abs(rho(i10, i10) - 0.5) < 1e-15);
  CHECK(std::abs(rho(i01, i10) - Complex(0.0, 0.5)) < 1e-15);
  CHECK(std::abs(rho(i10, i01) - Complex(0.0, -0.5)) < 1e-15);
  check_physical(rho);
}

TEST_CASE("dfs_state examples") {
  const TruncationSpec spec(2, 3);
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = 1.0;
  auto rho = fock::dfs_state(c, 0.3, spec);
  CHECK(test::max_abs(rho.matrix() - fock::DensityMatrix::vacuum(spec).matrix()) < 1e-15);

  c.setZero();
  c(1, 1) = 1.0;
  rho = fock::dfs_state(c, kPi / 4, spec);
  const auto i10 = spec.index_of(std::vector{1, 0}), i01 = spec.index_of(std::vector{0, 1});
  CHECK(std::abs(rho(i10, i10) - 0.5) < 1e-15);
  CHECK(std::abs(rho(i10, i01) + 0.5) < 1e-15);

  // tan(theta) = sqrt(k2/k1) = 2: populations (sin^2, cos^2) = (4/5, 1/5).
  rho = fock::dfs_state(c, std::atan(2.0), spec);
  CHECK(std::abs(rho(i10, i10) - 0.8) < 1e-14);
  CHECK(std::abs(rho(i01, i01) - 0.2) < 1e-14);
}

TEST_CASE("constructors produce physical states for random inputs") {
  std::mt19937_64 rng(11);
  const TruncationSpec spec(2, 3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 20; ++trial) {
    check_physical(fock::one_photon_state(fock::ModeVector::from_angles(u(rng), u(rng)), spec));
    const int d = 1 + trial % 4;
    CMatrix x = test::random_matrix(rng, d, 2);
    CMatrix c = x * x.adjoint();
    c /= c.trace();
    check_physical(fock::dfs_state(c, u(rng), spec));
  }
  CMatrix bad = CMatrix::Identity(2, 2);
  CHECK_THROWS(fock::dfs_state(bad, 0.1, spec));
  CHECK_THROWS(fock::DensityMatrix::checked(spec, CMatrix::Identity(spec.dim(), spec.dim())));
}

TEST_CASE("collective transform is unitary and maps to collective products") {
  std::mt19937_64 rng(5);
  const TruncationSpec spec(2, 3);
  const CMatrix rot = propagator::rotation_for_theta(0.4);
  const CMatrix w = fock::collective_transform(rot, spec);
  CHECK(test::max_abs(w.adjoint() * w - CMatrix::Identity(spec.dim(), spec.dim())) < 1e-12);
  // |1,0> maps to B_1^dagger |0> with B_1 = cos a1 + sin a2.
  const CVector col = w.col(spec.index_of(std::vector{1, 0}));
  CHECK(std::abs(col(spec.index_of(std::vector{1, 0})) - std::cos(0.4)) < 1e-14);
  CHECK(std::abs(col(spec.index_of(std::vector{0, 1})) - std::sin(0.4)) < 1e-14);
}

TEST_CASE("metrics") {
  const TruncationSpec spec(2, 1);
  const auto a = fock::one_photon_state(fock::ModeVector::from_angles(0.0, 0.0), spec);
  const auto b = fock::one_photon_state(fock::ModeVector::from_angles(kPi / 2, 0.0), spec);
  CHECK(std::abs(fock::fidelity(a, a) - 1.0) < 1e-15);
  CHECK(std::abs(fock::fidelity(a, b)) < 1e-15);
  CHECK(std::abs(fock::purity(a) - 1.0) < 1e-15);
  CHECK(std::abs(fock::trace_distance(a, b) - 1.0) < 1e-12);
  const fock::DensityMatrix mixed(spec, 0.5 * (a.matrix() + b.matrix()));
  CHECK(std::abs(fock::purity(mixed) - 0.5) < 1e-15);

  const auto m = fock::ModeVector::from_angles(0.7, 1.1);
  CHECK(std::abs(fock::mode_population(fock::one_photon_state(m, spec), m) - 1.0) < 1e-14);
  CHECK(std::abs(fock::mode_population(fock::DensityMatrix::vacuum(spec), m)) < 1e-15);
}

TEST_CASE("asymptotic weight and fidelity against the initial state") {
  const TruncationSpec spec(2, 1);
  // k1 = k2, alpha = pi/4, phi = 0 is the strongly damped mode: nothing survives.
  auto r = propagator::asymptotic_state(1.0, 1.0, kPi / 4, 0.0);
  CHECK(std::abs(r.fidelity) < 1e-15);
  const auto rho0 = fock::one_photon_state(fock::ModeVector::from_angles(kPi / 4, 0.0), spec);
  CHECK(std::abs(fock::fidelity(rho0, propagator::asymptotic_density(r, spec))) < 1e-15);

  r = propagator::asymptotic_state(1.0, 3.0, 0.3, 0.8);
  const auto start = fock::one_photon_state(fock::ModeVector::from_angles(0.3, 0.8), spec);
  const auto inf = propagator::asymptotic_density(r, spec);
  CHECK(std::abs(fock::fidelity(start, inf) - r.fidelity) < 1e-14);
  CHECK(std::abs(fock::mode_population(inf, r.psi) - r.weight) < 1e-14);
}

TEST_CASE("change_truncation and JSON round trip") {
  std::mt19937_64 rng(3);
  const TruncationSpec small(2, 2), big(2, 4);
  const auto rho = test::random_state(rng, small, 2);
  const auto up = fock::change_truncation(rho, big);
  const auto back = fock::change_truncation(up, small);
  CHECK(test::max_abs(back.matrix() - rho.matrix()) == 0.0);
  const auto copy = fock::density_matrix_from_json(fock::to_json(rho));
  CHECK(copy.spec() == rho.spec());
  CHECK(test::max_abs(copy.matrix() - rho.matrix()) == 0.0);
}
