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

#include "wdsim/coupling.hpp"

#include <cmath>

namespace wds::coupling {

CVector CouplingModel::collective_bath_coupling() const {
  const auto* f = std::get_if<FactorizedCoupling>(&coupling);
  if (f == nullptr) throw std::logic_error("collective_bath_coupling: coupling is not factorized");
  return f->G.squaredNorm() * f->D.conjugate();
}

CMatrix CouplingModel::coupling_matrix() const {
  if (const auto* f = std::get_if<FactorizedCoupling>(&coupling)) return f->G * f->D.transpose();
  return std::get<CMatrix>(coupling);
}

void CouplingModel::validate() const {
  if (frequencies.size() < 1) throw ConfigError("coupling model: need at least one oscillator");
  const Eigen::Index n = frequencies.size();
  const Eigen::Index nb = bath_frequencies.size();
  if (const auto* f = std::get_if<FactorizedCoupling>(&coupling)) {
    if (f->G.size() != n) throw ConfigError("coupling model: G must have one entry per oscillator");
    if (f->D.size() != nb) throw ConfigError("coupling model: D must have one entry per bath mode");
  } else {
    const auto& g = std::get<CMatrix>(coupling);
    if (g.rows() != n || g.cols() != nb) throw ConfigError("coupling model: g must be N x K");
  }
  if (std::isnan(beta) || beta < 0.0) throw ConfigError("coupling model: beta must be >= 0");
}

double RateModel::total() const {
  double s = 0.0;
  for (double ki : k) s += ki;
  return s;
}

DeviationParams DeviationParams::from(double k1, double k2, Complex k3, double omega1, double omega2) {
  return {std::sqrt(k1 * k2) - std::abs(k3), 0.5 * (omega2 - omega1)};
}

SeparabilityResult separability_check(const CMatrix& g, double tol) {
  if (g.size() == 0 || g.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("separability_check: all-zero coupling matrix");
  }
  Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  SeparabilityResult out;
  out.defect = sv.size() > 1 ? sv(1) / sv(0) : 0.0;
  out.separable = out.defect <= tol;
  if (out.separable) {
    CVector G = sv(0) * svd.matrixU().col(0);
    CVector D = svd.matrixV().col(0).conjugate();
    // Move the phase of the largest G component into D.
    Eigen::Index imax = 0;
    G.cwiseAbs().maxCoeff(&imax);
    const Complex phase = G(imax) / std::abs(G(imax));
    G /= phase;
    D *= phase;
    out.factors = FactorizedCoupling{std::move(G), std::move(D)};
  }
  return out;
}

CMatrix collective_rotation(const CVector& G) {
  const Eigen::Index n = G.size();
  const double norm = G.norm();
  if (n == 0 || !(norm > 0.0)) throw std::invalid_argument("collective_rotation: zero coupling vector");
  CMatrix rows = CMatrix::Zero(n, n);
  rows.row(0) = G.transpose() / norm;
  // Gram-Schmidt on e_2, ..., e_N, e_1 with <u, w> = sum_j u_j conj(w_j).
  Eigen::Index filled = 1;
  for (Eigen::Index step = 0; step < n && filled < n; ++step) {
    const Eigen::Index axis = (step + 1) % n;
    Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Zero(n);
    v(axis) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index r = 0; r < filled; ++r) {
        const Complex proj = (v.array() * rows.row(r).conjugate().array()).sum();
        v -= proj * rows.row(r);
      }
    }
    const double vn = v.norm();
    if (vn < 1e-8) continue;
    v /= vn;
    // Real nonnegative diagonal entry where one exists.
    if (std::abs(v(filled)) > 1e-14) v *= std::abs(v(filled)) / v(filled);
    rows.row(filled++) = v;
  }
  return rows;
}

CVector coupling_from_rates(const std::vector<double>& k) {
  CVector G(static_cast<Eigen::Index>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(k[i] >= 0.0)) throw std::invalid_argument("coupling_from_rates: rates must be >= 0");
    G(static_cast<Eigen::Index>(i)) = std::sqrt(k[i]);
  }
  return G;
}

double theta_from_rates(double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 >= 0.0)) {
    throw std::invalid_argument("theta_from_rates: requires k1 > 0 and k2 >= 0");
  }
  return std::atan(std::sqrt(k2 / k1));
}

ModePair wd_sd_modes(double k1, double k2, double delta_omega, std::optional<double> k) {
  const double kbar = k.value_or(0.5 * (k1 + k2));
  if (!(kbar > 0.0)) throw std::invalid_argument("wd_sd_modes: averaged damping must be positive");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw std::invalid_argument("wd_sd_modes: rates must be positive");
  const Complex phase = std::polar(1.0, delta_omega / kbar);
  CVector wd(2), sd(2);
  wd << std::sqrt(k2), -std::sqrt(k1) * std::conj(phase);
  sd << std::sqrt(k1), std::sqrt(k2) * phase;
  return {fock::ModeVector(wd), fock::ModeVector(sd)};
}

PredictedRates predicted_rates(double k1, double k2, double delta_k) {
  if (!(k1 >= 0.0) || !(k2 >= 0.0) || !(delta_k >= 0.0) || !(k1 + k2 > 0.0)) {
    throw std::invalid_argument("predicted_rates: negative input");
  }
  return {2.0 * delta_k * std::sqrt(k1 * k2) / (k1 + k2), k1 + k2};
}

CauchySchwarzResult cauchy_schwarz_check(const RateModel& rates) {
  if (rates.k.size() != 2) throw std::invalid_argument("cauchy_schwarz_check: needs two oscillators");
  const double slack = rates.k[0] * rates.k[1] - std::norm(rates.k3);
  return {slack >= -1e-12, slack};
}

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("expected a number or [re, im] pair, got " + j.dump());
}

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

namespace {

CVector complex_vector(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

RVector real_vector(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

}  // namespace

CouplingModel coupling_model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("coupling model must be an object");
  const bool has_g = j.contains("g");
  const bool has_factors = j.contains("G") || j.contains("D");
  if (has_g == has_factors) {
    throw ConfigError("coupling model: give exactly one of \"g\" or the pair \"G\"/\"D\"");
  }
  CouplingModel m;
  if (!j.contains("frequencies")) throw ConfigError("coupling model: missing \"frequencies\"");
  m.frequencies = real_vector(j.at("frequencies"), "frequencies");
  if (j.contains("bath_frequencies")) m.bath_frequencies = real_vector(j.at("bath_frequencies"), "bath_frequencies");
  if (has_g) {
    const auto& g = j.at("g");
    if (!g.is_array() || g.empty() || !g[0].is_array()) throw ConfigError("coupling model: g must be a matrix");
    CMatrix mat(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g[0].size()));
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (g[r].size() != g[0].size()) throw ConfigError("coupling model: ragged g");
      for (std::size_t c = 0; c < g[r].size(); ++c) {
        mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(g[r][c]);
      }
    }
    m.coupling = std::move(mat);
  } else {
    if (!j.contains("G") || !j.contains("D")) throw ConfigError("coupling model: need both G and D");
    m.coupling = FactorizedCoupling{complex_vector(j.at("G"), "G"), complex_vector(j.at("D"), "D")};
  }
  if (j.contains("beta") && !j.at("beta").is_null()) {
    if (!j.at("beta").is_number()) throw ConfigError("coupling model: beta must be a number or null");
    m.beta = j.at("beta").get<double>();
  }
  m.validate();
  return m;
}

}  // namespace wds::coupling
