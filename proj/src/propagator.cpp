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

#include "wdsim/propagator.hpp"

#include "wdsim/coupling.hpp"
#include "wdsim/io.hpp"
#include "wdsim/kernels.hpp"

#include <cmath>
#include <sstream>

namespace wds::propagator {

PropagatorCoefficients markov_coefficients(double k1, double k2, double nbar, double omega, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("markov_coefficients: t must be >= 0");
  if (!(nbar >= 0.0)) throw std::invalid_argument("markov_coefficients: nbar must be >= 0");
  const double k = k1 + k2;
  const double decay = -std::expm1(-2.0 * k * t);  // 1 - e^{-2kt}
  const double grow = 1.0 + nbar * decay;
  PropagatorCoefficients c;
  c.v = 1.0 / grow;
  c.x = Complex(-k * t - std::log1p(nbar * decay), -omega * t);
  c.z = (nbar + 1.0) * decay / grow;
  c.theta = coupling::theta_from_rates(k1, k2);
  c.omega = omega;
  c.t = t;
  return c;
}

std::vector<PropagatorCoefficients> coefficients_from_eta(std::span<const Complex> eta,
                                                          std::span<const double> capacity,
                                                          const memory::TimeGrid& grid, double theta, double omega) {
  if (eta.size() != grid.count || capacity.size() != grid.count) {
    throw std::invalid_argument("coefficients_from_eta: trajectories do not match the grid");
  }
  std::vector<PropagatorCoefficients> out(grid.count);
  double phase = 0.0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    if (!(std::abs(eta[i]) > 0.0)) {
      std::ostringstream msg;
      msg << "coefficients_from_eta: eta vanishes at t = " << grid[i];
      throw NumericError(msg.str());
    }
    phase = i == 0 ? std::arg(eta[0]) : phase + std::arg(eta[i] / eta[i - 1]);
    const double one_n = 1.0 + capacity[i];
    auto& c = out[i];
    c.v = 1.0 / one_n;
    c.x = Complex(std::log(std::abs(eta[i])) - std::log(one_n), phase);
    c.z = 1.0 - std::norm(eta[i]) / one_n;
    c.theta = theta;
    c.omega = omega;
    c.t = grid[i];
  }
  return out;
}

CMatrix rotation_for_theta(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  CMatrix r(2, 2);
  r << c, s, -s, c;
  return r;
}

namespace {

// X -> W^dagger X W and X -> W X W^dagger with W block sparse; both routed
// through the zero-skipping gemm with W (or conj W) as the right operand.
CMatrix to_collective(const CMatrix& w, const CMatrix& x) {
  const Eigen::Index n = x.rows();
  CMatrix xw = CMatrix::Zero(n, n);
  kernels::gemm_acc(1.0, x, w, xw);
  const CMatrix xw_t = xw.transpose();
  CMatrix out_t = CMatrix::Zero(n, n);
  kernels::gemm_acc(1.0, xw_t, w.conjugate(), out_t);  // (W^dagger X W)^T = (XW)^T conj(W)
  return out_t.transpose();
}

CMatrix from_collective(const CMatrix& w, const CMatrix& x) {
  const Eigen::Index n = x.rows();
  const CMatrix w_adj = w.adjoint();
  CMatrix xw = CMatrix::Zero(n, n);
  kernels::gemm_acc(1.0, x, w_adj, xw);
  const CMatrix xw_t = xw.transpose();
  CMatrix out_t = CMatrix::Zero(n, n);
  kernels::gemm_acc(1.0, xw_t, w.transpose(), out_t);  // (W X W^dagger)^T = (X W^dagger)^T W^T
  return out_t.transpose();
}

// Index of the state with one more (up) or one fewer (down) quantum in mode 0.
struct ShiftTable {
  std::vector<Eigen::Index> up, down;
  std::vector<double> n1;
};

ShiftTable shift_table(const fock::TruncationSpec& spec) {
  ShiftTable t;
  const auto n = static_cast<std::size_t>(spec.dim());
  t.up.assign(n, -1);
  t.down.assign(n, -1);
  t.n1.resize(n);
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    auto occ = spec.occupations_of(i);
    t.n1[static_cast<std::size_t>(i)] = occ[0];
    if (occ[0] < spec.max_excitation()) {
      ++occ[0];
      t.up[static_cast<std::size_t>(i)] = spec.index_of(occ);
      --occ[0];
    }
    if (occ[0] > 0) {
      --occ[0];
      t.down[static_cast<std::size_t>(i)] = spec.index_of(occ);
    }
  }
  return t;
}

// a X a^dagger: (r, c) <- sqrt((n1_r + 1)(n1_c + 1)) X(up_r, up_c)
CMatrix lower(const ShiftTable& s, const CMatrix& x) {
  const Eigen::Index n = x.rows();
  CMatrix out = CMatrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index uc = s.up[static_cast<std::size_t>(c)];
    if (uc < 0) continue;
    const double fc = std::sqrt(s.n1[static_cast<std::size_t>(c)] + 1.0);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index ur = s.up[static_cast<std::size_t>(r)];
      if (ur >= 0) out(r, c) = std::sqrt(s.n1[static_cast<std::size_t>(r)] + 1.0) * fc * x(ur, uc);
    }
  }
  return out;
}

// a^dagger X a: (r, c) <- sqrt(n1_r n1_c) X(down_r, down_c)
CMatrix raise(const ShiftTable& s, const CMatrix& x) {
  const Eigen::Index n = x.rows();
  CMatrix out = CMatrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index dc = s.down[static_cast<std::size_t>(c)];
    if (dc < 0) continue;
    const double fc = std::sqrt(s.n1[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index dr = s.down[static_cast<std::size_t>(r)];
      if (dr >= 0) out(r, c) = std::sqrt(s.n1[static_cast<std::size_t>(r)]) * fc * x(dr, dc);
    }
  }
  return out;
}

}  // namespace

fock::DensityMatrix apply_superoperator(const PropagatorCoefficients& c, const fock::DensityMatrix& rho0) {
  const auto& spec = rho0.spec();
  if (spec.num_modes() != 2) throw std::invalid_argument("apply_superoperator: two-mode state required");
  if (!(c.v > 0.0 && c.v <= 1.0) || !(c.z >= 0.0 && c.z <= 1.0)) {
    throw std::invalid_argument("apply_superoperator: coefficients outside v in (0, 1], z in [0, 1]");
  }
  const Eigen::Index dim = spec.dim();
  const int top = spec.max_excitation();
  const CMatrix w = fock::collective_transform(rotation_for_theta(c.theta), spec);
  const ShiftTable shifts = shift_table(spec);

  CMatrix rho = to_collective(w, rho0.matrix());

  // Lowering series; terminates after max_excitation terms.
  if (c.z > 0.0) {
    CMatrix term = rho;
    for (int j = 1; j <= top; ++j) {
      term = (c.z / j) * lower(shifts, term);
      rho += term;
    }
  }

  std::vector<int> n2(static_cast<std::size_t>(dim)), total(n2.size());
  std::vector<Complex> ex(n2.size());
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto occ = spec.occupations_of(i);
    const auto k = static_cast<std::size_t>(i);
    n2[k] = occ[1];
    total[k] = occ[0] + occ[1];
    ex[k] = std::exp(c.x * static_cast<double>(occ[0]));
  }
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Complex ec = std::conj(ex[static_cast<std::size_t>(col)]);
    for (Eigen::Index row = 0; row < dim; ++row) rho(row, col) *= ex[static_cast<std::size_t>(row)] * ec;
  }

  const double up = 1.0 - c.v;
  if (up > 0.0) {
    CMatrix term = rho;
    for (int j = 1; j <= top; ++j) {
      term = (up / j) * raise(shifts, term);
      rho += term;
    }
    double edge = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (total[static_cast<std::size_t>(i)] >= top) edge += std::abs(rho(i, i).real());
    }
    if (edge * c.v > 1e-8) {
      std::ostringstream msg;
      msg << "apply_superoperator: truncation overflow, population " << edge * c.v
          << " at total excitation >= " << top;
      throw NumericError(msg.str());
    }
  }
  rho *= c.v;

  for (Eigen::Index col = 0; col < dim; ++col) {
    for (Eigen::Index row = 0; row < dim; ++row) {
      const int dn = n2[static_cast<std::size_t>(row)] - n2[static_cast<std::size_t>(col)];
      if (dn != 0) rho(row, col) *= std::polar(1.0, -c.omega * c.t * dn);
    }
  }

  CMatrix out = from_collective(w, rho);
  out = 0.5 * (out + out.adjoint()).eval();
  const double drift = std::abs(out.trace() - rho0.trace());
  if (drift > 1e-8) {
    std::ostringstream msg;
    msg << "apply_superoperator: trace changed by " << drift;
    throw NumericError(msg.str());
  }
  return fock::DensityMatrix(spec, std::move(out));
}

AsymptoticResult asymptotic_state(double k1, double k2, double alpha, double phi) {
  if (!(k1 >= 0.0) || !(k2 >= 0.0) || !(k1 + k2 > 0.0)) {
    throw std::invalid_argument("asymptotic_state: need k1, k2 >= 0 and k1 + k2 > 0");
  }
  const double k = k1 + k2;
  CVector psi(2);
  psi << std::sqrt(k2), -std::sqrt(k1);
  const Complex overlap = std::sqrt(k2) * std::cos(alpha) - std::sqrt(k1) * std::polar(1.0, phi) * std::sin(alpha);
  const double p = std::norm(overlap) / k;
  return {fock::ModeVector(psi), p, p * p};
}

fock::DensityMatrix asymptotic_density(const AsymptoticResult& r, const fock::TruncationSpec& spec) {
  const CVector ket = fock::one_photon_vector(r.psi, spec);
  CMatrix m = r.weight * (ket * ket.adjoint());
  m(0, 0) += 1.0 - r.weight;
  return fock::DensityMatrix(spec, std::move(m));
}

void write_coefficients_csv(std::span<const PropagatorCoefficients> coeffs, std::ostream& out) {
  out << "t,v,re_x,im_x,z\n";
  for (const auto& c : coeffs) {
    out << io::format_double(c.t) << ',' << io::format_double(c.v) << ',' << io::format_double(c.x.real()) << ','
        << io::format_double(c.x.imag()) << ',' << io::format_double(c.z) << '\n';
  }
}

}  // namespace wds::propagator
