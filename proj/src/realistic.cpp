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

#include "wdsim/realistic.hpp"

#include "wdsim/io.hpp"

#include <cmath>
#include <sstream>

namespace wds::realistic {

namespace {

struct Params {
  Complex R, c, r;
};

Params params(double k1, double k2, Complex k3, double omega1, double omega2) {
  Params p;
  p.R = Complex(0.5 * (k1 + k2), 0.5 * (omega1 + omega2));
  p.c = Complex(k2 - k1, omega2 - omega1);
  p.r = branch_r(k1, k2, k3, omega1, omega2);
  return p;
}

}  // namespace

Complex branch_r(double k1, double k2, Complex k3, double omega1, double omega2) {
  const Complex c(k2 - k1, omega2 - omega1);
  Complex r = std::sqrt(c * c + 4.0 * std::norm(k3));
  if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
  const double scale = std::abs(c) + std::abs(k3) + std::abs(k1) + std::abs(k2);
  if (std::abs(r) <= 1e-14 * std::max(scale, 1e-300)) {
    throw NumericError("realistic model: exceptional point r = 0; use the numeric engine");
  }
  return r;
}

AuxiliaryCoefficients auxiliary_coefficients(double k1, double k2, Complex k3, double omega1, double omega2, double t) {
  const Params p = params(k1, k2, k3, omega1, omega2);
  AuxiliaryCoefficients a;
  a.R = p.R;
  a.c = p.c;
  a.r = p.r;
  a.delta_plus = p.c + p.r;
  a.delta_minus = p.c - p.r;
  const Complex ert = std::exp(p.r * t);
  const Complex den = a.delta_plus * ert - a.delta_minus;
  a.q = 2.0 * k3 * (1.0 - ert) / den;
  a.exp_ma = std::exp(-p.R * t) / (2.0 * p.r) * std::exp(-0.5 * p.r * t) * den;
  a.exp_mb = std::exp(-2.0 * p.R * t) / a.exp_ma;
  const double q2 = std::norm(a.q);
  const double inv_mb2 = 1.0 / std::norm(a.exp_mb);
  a.j_b = (1.0 + q2) * inv_mb2 - 1.0;
  a.j_a = std::norm(1.0 / a.exp_ma + a.q * a.q / a.exp_mb) + q2 * inv_mb2 - 1.0;
  a.z = -a.q / (std::conj(a.exp_ma) * a.exp_mb) - std::conj(a.q) * (1.0 + q2) * inv_mb2;
  return a;
}

Eigen::Matrix2cd transfer_matrix(double k1, double k2, Complex k3, double omega1, double omega2, double t) {
  const Params p = params(k1, k2, k3, omega1, omega2);
  const Complex e = std::exp(-p.R * t);
  const Complex em = std::exp(-0.5 * p.r * t);
  const Complex ep = std::exp(0.5 * p.r * t);
  const Complex cr = p.c / p.r;
  Eigen::Matrix2cd m;
  m(0, 0) = 0.5 * e * (em * (1.0 - cr) + ep * (1.0 + cr));
  m(1, 1) = 0.5 * e * (em * (1.0 + cr) + ep * (1.0 - cr));
  m(0, 1) = std::conj(k3) / p.r * e * (em - ep);
  m(1, 0) = k3 / p.r * e * (em - ep);
  return m;
}

OnePhotonSolution one_photon_evolution(double k1, double k2, Complex k3, double omega1, double omega2, double alpha,
                                       double phi, std::span<const double> times) {
  Eigen::Vector2cd c0(std::cos(alpha), std::polar(1.0, phi) * std::sin(alpha));
  OnePhotonSolution s;
  s.times.assign(times.begin(), times.end());
  for (double t : times) {
    const Eigen::Matrix2cd m = transfer_matrix(k1, k2, k3, omega1, omega2, t);
    const Eigen::Vector2cd amp = m * c0;
    const double p = amp.squaredNorm();
    s.m_plus.push_back(m(0, 0));
    s.m_minus.push_back(m(1, 1));
    s.q12.push_back(m(0, 1));
    s.q21.push_back(m(1, 0));
    s.p.push_back(p);
    s.psi.push_back(p > 1e-12 ? CVector(amp / std::sqrt(p)) : CVector(CVector::Zero(2)));
  }
  return s;
}

fock::DensityMatrix OnePhotonSolution::density(std::size_t i, const fock::TruncationSpec& spec) const {
  if (spec.num_modes() != 2) throw std::invalid_argument("OnePhotonSolution: two-mode truncation required");
  CMatrix m = CMatrix::Zero(spec.dim(), spec.dim());
  if (p.at(i) > 1e-12) {
    const CVector ket = fock::one_photon_vector(fock::ModeVector(psi[i]), spec);
    m += p[i] * (ket * ket.adjoint());
  }
  m(0, 0) += 1.0 - p[i];
  return fock::DensityMatrix(spec, std::move(m));
}

ApproxModeSplit approx_amplitudes(double k1, double k2, double delta_k, double delta_omega, double alpha,
                                  double phi) {
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw std::invalid_argument("approx_amplitudes: rates must be positive");
  const double k = k1 + k2;
  const double g = std::sqrt(k1 * k2);
  const double ca = std::cos(alpha);
  const Complex sa = std::polar(1.0, phi) * std::sin(alpha);
  const Complex idw(0.0, delta_omega);
  ApproxModeSplit s;
  s.zeta1 = ((k1 - idw) * ca + g * sa) / k;
  s.zeta2 = ((k2 + idw) * ca - g * sa) / k;
  s.xi1 = ((k2 + idw) * sa + g * ca) / k;
  s.xi2 = ((k1 - idw) * sa - g * ca) / k;
  s.rate_wd = 2.0 * delta_k * g / k;
  s.rate_sd = k;
  s.validity = std::max(std::abs(delta_omega) / (0.5 * k), std::abs(delta_k) / g);
  return s;
}

nlohmann::json to_json(const ApproxModeSplit& s) {
  auto cj = [](Complex z) { return nlohmann::json::array({z.real(), z.imag()}); };
  return {{"zeta1", cj(s.zeta1)}, {"zeta2", cj(s.zeta2)}, {"xi1", cj(s.xi1)},       {"xi2", cj(s.xi2)},
          {"rate_wd", s.rate_wd}, {"rate_sd", s.rate_sd}, {"validity", s.validity}};
}

InitialConditions sd_wd_initial_conditions(double k1, double k2, double delta_omega, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("sd_wd_initial_conditions: k must be positive");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw std::invalid_argument("sd_wd_initial_conditions: rates must be positive");
  return {{std::atan(std::sqrt(k2 / k1)), delta_omega / k}, {-std::atan(std::sqrt(k1 / k2)), -delta_omega / k}};
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> values, double t_a, double t_b) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay_rate: length mismatch");
  if (times.empty() || !(t_a < t_b) || t_a < times.front() || t_b > times.back()) {
    throw std::invalid_argument("fit_decay_rate: window outside the series");
  }
  double st = 0.0, sy = 0.0;
  std::size_t n = 0;
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_a || times[i] > t_b) continue;
    if (!(values[i] > 0.0)) {
      std::ostringstream msg;
      msg << "fit_decay_rate: non-positive value at t = " << times[i];
      throw std::invalid_argument(msg.str());
    }
    ts.push_back(times[i]);
    ys.push_back(std::log(values[i]));
    st += times[i];
    sy += ys.back();
    ++n;
  }
  if (n < 10) throw std::invalid_argument("fit_decay_rate: fewer than 10 points in the window");
  const double mt = st / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sty / stt;
  const double r2 = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  return {-slope, r2, n};
}

EigenRates eigen_rates(double k1, double k2, Complex k3, double omega1, double omega2) {
  const Params p = params(k1, k2, k3, omega1, omega2);
  return {p.R.real() - 0.5 * p.r.real(), p.R.real() + 0.5 * p.r.real()};
}

void write_csv(const OnePhotonSolution& s, std::ostream& out) {
  out << "t,re_m_plus,im_m_plus,re_m_minus,im_m_minus,re_q,im_q,p,re_psi1,im_psi1,re_psi2,im_psi2\n";
  auto f = [](double v) { return io::format_double(v); };
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << f(s.times[i]) << ',' << f(s.m_plus[i].real()) << ',' << f(s.m_plus[i].imag()) << ','
        << f(s.m_minus[i].real()) << ',' << f(s.m_minus[i].imag()) << ',' << f(s.q21[i].real()) << ','
        << f(s.q21[i].imag()) << ',' << f(s.p[i]) << ',' << f(s.psi[i](0).real()) << ',' << f(s.psi[i](0).imag())
        << ',' << f(s.psi[i](1).real()) << ',' << f(s.psi[i](1).imag()) << '\n';
  }
}

}  // namespace wds::realistic
