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

#include "wdsim/memory_kernel.hpp"

#include "wdsim/coupling.hpp"
#include "wdsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wds::memory {

double OhmicDensity::operator()(double w) const {
  if (w <= 0.0) return 0.0;
  return amplitude * w * std::exp(-w / cutoff);
}

SpectralDensity SpectralDensity::discrete(std::vector<BathMode> modes) {
  for (const auto& m : modes) {
    if (!std::isfinite(m.omega) || !std::isfinite(std::abs(m.coupling))) {
      throw std::invalid_argument("SpectralDensity: non-finite bath mode");
    }
  }
  SpectralDensity sd;
  sd.modes_ = std::move(modes);
  return sd;
}

SpectralDensity SpectralDensity::ohmic(OhmicDensity density) {
  if (!(density.amplitude >= 0.0) || !(density.cutoff > 0.0) || density.order < 1) {
    throw std::invalid_argument("SpectralDensity: ohmic density needs amplitude >= 0, cutoff > 0, order >= 1");
  }
  // Golub-Welsch: nodes are the eigenvalues of the Legendre Jacobi matrix,
  // weights 2 v_0^2 from the normalized eigenvectors.
  const int n = density.order;
  RVector diag = RVector::Zero(n);
  RVector sub(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) sub(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const double half = 5.0 * density.cutoff;  // maps [-1, 1] onto [0, 10 w_c]
  std::vector<BathMode> modes;
  modes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double w = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    const double omega = half * (x + 1.0);
    modes.push_back({omega, std::sqrt(density(omega) * half * w / kPi)});
  }
  SpectralDensity sd;
  sd.modes_ = std::move(modes);
  sd.continuum_ = density;
  return sd;
}

SpectralDensity spectral_density_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError("spectral_density: object with a string \"type\" required");
  }
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "discrete") {
      std::vector<BathMode> modes;
      for (const auto& m : j.at("modes")) {
        modes.push_back({m.at("omega").get<double>(), coupling::complex_from_json(m.at("coupling"))});
      }
      return SpectralDensity::discrete(std::move(modes));
    }
    if (type == "ohmic") {
      OhmicDensity d{j.at("amplitude").get<double>(), j.at("cutoff").get<double>(), j.value("order", 400)};
      return SpectralDensity::ohmic(d);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("spectral_density: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("spectral_density: unknown type \"" + type + "\"");
}

std::vector<double> TimeGrid::values() const {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = (*this)[i];
  return t;
}

namespace {

void check_grid(const TimeGrid& grid) {
  if (grid.count < 2 || !(grid.step > 0.0) || !std::isfinite(grid.step)) {
    throw std::invalid_argument("time grid needs count >= 2 and a positive step");
  }
}

void check_length(std::size_t n, const TimeGrid& grid, const char* what) {
  if (n != grid.count) throw std::invalid_argument(std::string(what) + ": trajectory length differs from the grid");
}

// H(u) = -i w - L(u),  L(u) = int_0^u K, sampled at u = j * h/2.
std::vector<Complex> integrated_kernel(const SpectralDensity& sd, double omega, double h, std::size_t samples,
                                       KernelSign sign) {
  const double s = sign == KernelSign::kConjugate ? -1.0 : 1.0;
  std::vector<Complex> out(samples, Complex(0.0, -omega));
  if (const auto& oh = sd.continuum()) {
    // int_0^inf (J(w)/pi) int_0^u exp(i s w v) dv dw for the ohmic J
    const double a = oh->amplitude / kPi;
    const double inv = 1.0 / oh->cutoff;
    for (std::size_t j = 0; j < samples; ++j) {
      const double u = 0.5 * h * static_cast<double>(j);
      out[j] -= a * s * (1.0 / Complex(inv, -s * u) - oh->cutoff) / kI;
    }
    return out;
  }
  for (const auto& m : sd.modes()) {
    const double c2 = std::norm(m.coupling);
    if (c2 == 0.0) continue;
    const double wk = m.omega;
    for (std::size_t j = 0; j < samples; ++j) {
      const double u = 0.5 * h * static_cast<double>(j);
      // int_0^u exp(i s w_k v) dv
      const Complex l = wk == 0.0 ? Complex(u) : (std::polar(1.0, s * wk * u) - 1.0) / (kI * (s * wk));
      out[j] -= c2 * l;
    }
  }
  return out;
}

}  // namespace

std::vector<Complex> solve_eta(const SpectralDensity& sd, double omega, const TimeGrid& grid, KernelSign sign) {
  check_grid(grid);
  const double h = grid.step;
  // Work on an even number of intervals; an extra node is discarded.
  const std::size_t intervals = (grid.count - 1) + ((grid.count - 1) % 2);
  const std::size_t nodes = intervals + 1;
  const std::vector<Complex> half = integrated_kernel(sd, omega, h, 2 * nodes, sign);
  std::vector<Complex> hk(nodes);  // H(i h)
  for (std::size_t i = 0; i < nodes; ++i) hk[i] = half[2 * i];
  // hr[i] = H((nodes-1-i) h): the history sum becomes a contiguous dot product.
  std::vector<Complex> hr(hk.rbegin(), hk.rend());
  const Complex h0 = hk[0], h1 = hk[1], h2 = hk[2], hh = half[1];

  std::vector<Complex> y(nodes);
  std::vector<Complex> wy(nodes);  // interior Simpson weights (4 odd, 2 even) times y
  y[0] = 1.0;
  wy[0] = 2.0 * y[0];
  const auto& dot = kernels::active().dot;

  // Matrix of the local 2x2 system is the same for every block.
  const Complex a11 = 1.0 - (h / 6.0) * (3.0 * hh + h0);
  const Complex a12 = (h / 6.0) * (0.5 * hh);
  const Complex a21 = -(h / 3.0) * 4.0 * h1;
  const Complex a22 = 1.0 - (h / 3.0) * h0;
  const Complex det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-300) throw NumericError("solve_eta: singular block system");

  for (std::size_t m2 = 0; m2 + 2 <= intervals; m2 += 2) {
    // Composite Simpson over [0, t_{m2}] evaluated at t_{m2+1} and t_{m2+2}.
    Complex s1 = 0.0, s2 = 0.0;
    if (m2 > 0) {
      const std::size_t len = m2 + 1;
      const std::size_t p1 = m2 + 1, p2 = m2 + 2;
      s1 = dot(len, wy.data(), hr.data() + (nodes - 1 - p1));
      s2 = dot(len, wy.data(), hr.data() + (nodes - 1 - p2));
      // End weights are 1, not 2.
      s1 -= y[0] * hk[p1] + y[m2] * hk[p1 - m2];
      s2 -= y[0] * hk[p2] + y[m2] * hk[p2 - m2];
      s1 *= h / 3.0;
      s2 *= h / 3.0;
    }
    const Complex y0 = y[m2];
    const Complex b1 = 1.0 + s1 + (h / 6.0) * (h1 + 1.5 * hh) * y0;
    const Complex b2 = 1.0 + s2 + (h / 3.0) * h2 * y0;
    const Complex y1 = (b1 * a22 - a12 * b2) / det;
    const Complex y2 = (a11 * b2 - a21 * b1) / det;
    y[m2 + 1] = y1;
    y[m2 + 2] = y2;
    wy[m2 + 1] = 4.0 * y1;
    wy[m2 + 2] = 2.0 * y2;
    if (!(std::abs(y1) <= 10.0) || !(std::abs(y2) <= 10.0)) {
      std::ostringstream msg;
      msg << "solve_eta: |eta| exceeded 10 near t = " << grid[m2 + 1];
      throw NumericError(msg.str());
    }
  }
  y.resize(grid.count);
  return y;
}

Rates extract_rates(std::span<const Complex> eta, double omega, const TimeGrid& grid) {
  check_grid(grid);
  check_length(eta.size(), grid, "extract_rates");
  const std::size_t n = eta.size();
  std::vector<double> lnabs(n), phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(eta[i]) >= 1e-12)) {
      std::ostringstream msg;
      msg << "extract_rates: eta vanishes at t = " << grid[i];
      throw NumericError(msg.str());
    }
    lnabs[i] = std::log(std::abs(eta[i]));
    phase[i] = i == 0 ? std::arg(eta[0]) : phase[i - 1] + std::arg(eta[i] / eta[i - 1]);
  }
  auto derivative = [&grid, n](const std::vector<double>& f) {
    const double h = grid.step;
    std::vector<double> d(n);
    if (n == 2) {
      d[0] = d[1] = (f[1] - f[0]) / h;
      return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
  };
  Rates r{derivative(lnabs), derivative(phase)};
  for (std::size_t i = 0; i < n; ++i) {
    r.lambda[i] = -r.lambda[i];
    r.delta[i] = -r.delta[i] - omega;
  }
  return r;
}

std::vector<Complex> reconstruct_eta(std::span<const double> lambda, std::span<const double> delta, double omega,
                                     const TimeGrid& grid) {
  check_grid(grid);
  check_length(lambda.size(), grid, "reconstruct_eta");
  check_length(delta.size(), grid, "reconstruct_eta");
  std::vector<Complex> eta(grid.count);
  double il = 0.0, id = 0.0;
  eta[0] = 1.0;
  for (std::size_t i = 1; i < grid.count; ++i) {
    il += 0.5 * grid.step * (lambda[i - 1] + lambda[i]);
    id += 0.5 * grid.step * (delta[i - 1] + delta[i]);
    eta[i] = std::exp(-il) * std::polar(1.0, -omega * grid[i] - id);
  }
  return eta;
}

std::vector<double> thermal_occupation(const SpectralDensity& sd, double beta, std::span<const Complex> eta,
                                       const TimeGrid& grid) {
  check_grid(grid);
  check_length(eta.size(), grid, "thermal_occupation");
  if (std::isnan(beta) || !(beta > 0.0)) throw std::invalid_argument("thermal_occupation: beta must be > 0");
  std::vector<double> n(grid.count, 0.0);
  if (std::isinf(beta)) return n;
  const double h = grid.step;
  for (const auto& m : sd.modes()) {
    const double c2 = std::norm(m.coupling);
    if (c2 == 0.0) continue;
    if (!(m.omega > 0.0)) throw std::invalid_argument("thermal_occupation: bath frequencies must be > 0");
    const double nk = 1.0 / std::expm1(beta * m.omega);
    const double weight = c2 * nk;
    if (weight == 0.0) continue;
    const Complex rot = std::polar(1.0, -m.omega * h);
    Complex integral = 0.0;
    for (std::size_t i = 1; i < grid.count; ++i) {
      integral = rot * integral + 0.5 * h * (rot * eta[i - 1] + eta[i]);
      n[i] += weight * std::norm(integral);
    }
  }
  return n;
}

std::vector<double> epsilon_thermal(const SpectralDensity& sd, double beta, std::span<const Complex> eta,
                                    const TimeGrid& grid) {
  if (std::isnan(beta) || !(beta > 0.0)) throw std::invalid_argument("epsilon_thermal: beta must be > 0");
  check_grid(grid);
  check_length(eta.size(), grid, "epsilon_thermal");
  const std::size_t n = grid.count;
  std::vector<double> eps(n, 0.0);
  if (std::isinf(beta)) return eps;
  const std::vector<double> occ = thermal_occupation(sd, beta, eta, grid);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = std::norm(eta[i]);
    if (!(a2 >= 1e-24)) throw NumericError("epsilon_thermal: eta vanishes on the grid");
    f[i] = occ[i] / a2;
  }
  const double h = grid.step;
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (n == 2) {
      d = (f[1] - f[0]) / h;
    } else if (i == 0) {
      d = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    } else if (i + 1 == n) {
      d = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    } else {
      d = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    eps[i] = 0.5 * std::norm(eta[i]) * d;
  }
  return eps;
}

std::vector<double> capacity_n(std::span<const double> epsilon, std::span<const Complex> eta, const TimeGrid& grid) {
  check_grid(grid);
  check_length(epsilon.size(), grid, "capacity_n");
  check_length(eta.size(), grid, "capacity_n");
  const std::size_t n = grid.count;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = std::norm(eta[i]);
    if (!(a2 >= 1e-24)) throw NumericError("capacity_n: eta vanishes on the grid");
    g[i] = epsilon[i] / a2;
  }
  // Cumulative integral of g with cubic-interpolation panels (fourth order);
  // plain trapezoid when fewer than four nodes are available.
  const double h = grid.step;
  std::vector<double> out(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double panel;
    if (n < 4) {
      panel = 0.5 * h * (g[i] + g[i + 1]);
    } else if (i == 0) {
      panel = h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    } else if (i + 2 == n) {
      panel = h / 24.0 * (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]);
    } else {
      panel = h / 24.0 * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
    }
    acc += panel;
    out[i + 1] = 2.0 * std::norm(eta[i + 1]) * acc;
  }
  return out;
}

MemoryKernelSolution solve_memory_kernel(const SpectralDensity& sd, double omega, double beta, const TimeGrid& grid,
                                         KernelSign sign) {
  std::vector<Complex> eta = solve_eta(sd, omega, grid, sign);
  Rates rates = extract_rates(eta, omega, grid);
  std::vector<double> eps = epsilon_thermal(sd, beta, eta, grid);
  std::vector<double> cap = capacity_n(eps, eta, grid);
  MemoryKernelSolution sol =
      make_solution(grid, omega, std::move(eta), std::move(rates.lambda), std::move(rates.delta), std::move(eps),
                    std::move(cap));
  sol.sign = sign;
  return sol;
}

MemoryKernelSolution make_solution(const TimeGrid& grid, double omega, std::vector<Complex> eta,
                                   std::vector<double> lambda, std::vector<double> delta,
                                   std::vector<double> epsilon, std::vector<double> capacity) {
  check_grid(grid);
  check_length(eta.size(), grid, "make_solution");
  check_length(lambda.size(), grid, "make_solution");
  check_length(delta.size(), grid, "make_solution");
  check_length(epsilon.size(), grid, "make_solution");
  check_length(capacity.size(), grid, "make_solution");
  MemoryKernelSolution sol;
  sol.grid = grid;
  sol.omega = omega;
  sol.eta = std::move(eta);
  sol.lambda = std::move(lambda);
  sol.delta = std::move(delta);
  sol.epsilon = std::move(epsilon);
  sol.capacity = std::move(capacity);
  return sol;
}

}  // namespace wds::memory
