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
#include "wdsim/coupling.hpp"
#include "wdsim/lindblad.hpp"
#include "wdsim/propagator.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wds;
using namespace wds::propagator;
using fock::TruncationSpec;

TEST_CASE("Markov coefficients") {
  auto c = markov_coefficients(0.3, 0.5, 0.7, 1.1, 0.0);
  CHECK(c.v == 1.0);
  CHECK(c.x == Complex(0.0));
  CHECK(c.z == 0.0);

  const double k = 0.8, w = 1.1, t = 0.9;
  c = markov_coefficients(0.3, 0.5, 0.0, w, t);
  CHECK(c.v == 1.0);
  CHECK(std::abs(c.x - Complex(-k * t, -w * t)) < 1e-15);
  CHECK(std::abs(c.z - (1.0 - std::exp(-2.0 * k * t))) < 1e-15);

  c = markov_coefficients(0.3, 0.5, 1.0, w, 60.0);
  CHECK(std::abs(c.v - 0.5) < 1e-15);
  CHECK(std::abs(c.z - 1.0) < 1e-15);
  CHECK(std::abs(c.theta - std::atan(std::sqrt(0.5 / 0.3))) < 1e-15);
}

TEST_CASE("coefficients from eta") {
  const memory::TimeGrid grid{0.01, 201};
  const double k1 = 0.2, k2 = 0.6, k = k1 + k2, nbar = 0.5, w = 1.4;
  std::vector<Complex> eta;
  std::vector<double> cap, zero(grid.count, 0.0);
  for (std::size_t i = 0; i < grid.count; ++i) {
    eta.push_back(std::exp(Complex(-k, -w) * grid[i]));
    cap.push_back(nbar * -std::expm1(-2.0 * k * grid[i]));
  }
  const double theta = coupling::theta_from_rates(k1, k2);
  const auto from_eta = coefficients_from_eta(eta, cap, grid, theta, w);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const auto m = markov_coefficients(k1, k2, nbar, w, grid[i]);
    CHECK(std::abs(from_eta[i].v - m.v) < 1e-10);
    CHECK(std::abs(from_eta[i].x - m.x) < 1e-10);
    CHECK(std::abs(from_eta[i].z - m.z) < 1e-10);
  }
  CHECK(from_eta[0].v == 1.0);
  CHECK(std::abs(from_eta[0].x) == 0.0);
  CHECK(from_eta[0].z == 0.0);

  const auto cold = coefficients_from_eta(eta, zero, grid, theta, w);
  for (std::size_t i = 0; i < grid.count; ++i) {
    CHECK(cold[i].v == 1.0);
    CHECK(std::abs(cold[i].z - (1.0 - std::norm(eta[i]))) < 1e-15);
  }
  eta[5] = 0.0;
  CHECK_THROWS_AS(coefficients_from_eta(eta, zero, grid, theta, w), NumericError);
}

TEST_CASE("map at t = 0 and on vacuum") {
  std::mt19937_64 rng(8);
  const TruncationSpec spec(2, 4);
  const auto rho = test::random_state(rng, spec, 2);
  const auto same = apply_superoperator(markov_coefficients(0.3, 0.7, 0.0, 1.0, 0.0), rho);
  CHECK(test::max_abs(same.matrix() - rho.matrix()) < 1e-14);
  const auto vac = apply_superoperator(markov_coefficients(0.3, 0.7, 0.0, 1.0, 2.0), fock::DensityMatrix::vacuum(spec));
  CHECK(test::max_abs(vac.matrix() - fock::DensityMatrix::vacuum(spec).matrix()) < 1e-15);
}

TEST_CASE("DFS family only rotates") {
  std::mt19937_64 rng(21);
  const TruncationSpec spec(2, 3);
  const double k1 = 0.4, k2 = 1.1, w = 0.9, t = 2.3;
  CMatrix x = test::random_matrix(rng, 4, 2);
  CMatrix c = x * x.adjoint();
  c /= c.trace();
  const auto rho = fock::dfs_state(c, coupling::theta_from_rates(k1, k2), spec);
  const auto out = apply_superoperator(markov_coefficients(k1, k2, 0.0, w, t), rho);
  CMatrix expected = rho.matrix();
  for (Eigen::Index b = 0; b < spec.dim(); ++b) {
    for (Eigen::Index a = 0; a < spec.dim(); ++a) {
      expected(a, b) *= std::polar(1.0, -w * t * (spec.total_excitation(a) - spec.total_excitation(b)));
    }
  }
  CHECK(fock::trace_distance(out, fock::DensityMatrix(spec, expected)) < 1e-10);
}

TEST_CASE("one photon in the coupled mode") {
  const TruncationSpec spec(2, 2);
  const double k1 = 0.5, k2 = 1.5;
  const auto c = markov_coefficients(k1, k2, 0.0, 1.0, 0.25);
  const CVector ket =
      fock::one_photon_vector(fock::ModeVector::from_angles(coupling::theta_from_rates(k1, k2), 0.0), spec);
  const auto out = apply_superoperator(c, fock::DensityMatrix(spec, ket * ket.adjoint()));
  const auto a1 = lindblad::collective_operators(coupling::coupling_from_rates({k1, k2}), spec)[0];
  CHECK(std::abs(fock::expectation(out, a1.adjoint() * a1).real() - 0.36787944117144233) < 1e-8);
}

TEST_CASE("closed-form map matches independent integration") {
  for (const auto& o : test::oracles().at("bm_map")) {
    const double nbar = o.at("nbar").get<double>();
    const TruncationSpec small(2, 3);
    const auto c = markov_coefficients(o.at("k1").get<double>(), o.at("k2").get<double>(), nbar,
                                       o.at("omega").get<double>(), o.at("t").get<double>());
    const fock::DensityMatrix rho0(small, test::unpack(o.at("rho0")));
    const TruncationSpec work(2, nbar > 0.0 ? 20 : 3);
    const auto out = fock::change_truncation(apply_superoperator(c, fock::change_truncation(rho0, work)), small);
    CHECK(test::max_abs(out.matrix() - test::unpack(o.at("rho_t"))) < 1e-8);
  }
}

TEST_CASE("truncation overflow is reported") {
  const TruncationSpec spec(2, 2);
  const auto rho = fock::one_photon_state(fock::ModeVector::from_angles(0.3, 0.0), spec);
  CHECK_THROWS_AS(apply_superoperator(markov_coefficients(0.5, 0.5, 2.0, 1.0, 3.0), rho), NumericError);
}

TEST_CASE("asymptotic weight") {
  const double k1 = 1.0, k2 = 4.0;
  // Aligned with the decoupled mode (sqrt k2, -sqrt k1): survives with certainty.
  CHECK(std::abs(asymptotic_state(k1, k2, std::atan(-std::sqrt(k1 / k2)), 0.0).weight - 1.0) < 1e-15);
  // Aligned with the coupled mode: leaks completely.
  CHECK(std::abs(asymptotic_state(k1, k2, std::atan(std::sqrt(k2 / k1)), 0.0).weight) < 1e-15);
  const auto r = asymptotic_state(1.0, 1.0, 0.0, 0.0);
  CHECK(std::abs(r.weight - 0.5) < 1e-15);
  CHECK(std::abs(r.fidelity - 0.25) < 1e-15);
}

TEST_CASE("coefficients CSV") {
  std::ostringstream out;
  const std::vector<PropagatorCoefficients> c{markov_coefficients(0.5, 0.5, 0.0, 1.0, 0.0)};
  write_coefficients_csv(c, out);
  CHECK(out.str() == "t,v,re_x,im_x,z\n0,1,0,0,0\n");
}
