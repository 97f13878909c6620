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

#include "wdsim/lindblad.hpp"

#include "wdsim/io.hpp"
#include "wdsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wds::lindblad {

Schedule Schedule::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("Schedule: non-finite value");
  Schedule s;
  s.constant_ = value;
  return s;
}

Schedule Schedule::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw std::invalid_argument("Schedule: need >= 2 nodes and matching value count");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("Schedule: nodes must increase");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("Schedule: non-finite value");
  }
  Schedule s;
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double Schedule::at(double t) const {
  if (times_.empty()) return constant_;
  const double lo = times_.front();
  const double hi = times_.back();
  // Absorb rounding in stage times computed as t0 + i*h.
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (!(t >= lo - slack) || !(t <= hi + slack)) {
    std::ostringstream msg;
    msg << "Schedule: t = " << t << " outside [" << lo << ", " << hi << "]";
    throw std::out_of_range(msg.str());
  }
  if (t <= lo) return values_.front();
  if (t >= hi) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[j - 1]) / (times_[j] - times_[j - 1]);
  return (1.0 - w) * values_[j - 1] + w * values_[j];
}

double Schedule::max_abs() const {
  if (times_.empty()) return std::abs(constant_);
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::pair<double, double> Schedule::span() const {
  if (times_.empty()) {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }
  return {times_.front(), times_.back()};
}

namespace {

double norm_estimate(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double n1 = m.cwiseAbs().colwise().sum().maxCoeff();
  const double ninf = m.cwiseAbs().rowwise().sum().maxCoeff();
  return std::sqrt(n1 * ninf);
}

void check_square(const CMatrix& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw std::invalid_argument(std::string("LindbladGenerator: ") + what + " has wrong shape");
  }
}

}  // namespace

LindbladGenerator::LindbladGenerator(fock::TruncationSpec spec, CMatrix hamiltonian)
    : spec_(std::move(spec)), hamiltonian_(std::move(hamiltonian)) {
  check_square(hamiltonian_, spec_.dim(), "Hamiltonian");
  if (!hamiltonian_.allFinite()) throw std::invalid_argument("LindbladGenerator: non-finite Hamiltonian");
}

void LindbladGenerator::add_dissipator(DissipatorTerm term) {
  check_square(term.left, spec_.dim(), "jump operator");
  check_square(term.right, spec_.dim(), "jump operator");
  if (!std::isfinite(term.rate.real()) || !std::isfinite(term.rate.imag())) {
    throw std::invalid_argument("LindbladGenerator: non-finite rate");
  }
  Prepared p{term.left.transpose(), term.right.adjoint(), term.right.adjoint() * term.left};
  terms_.push_back(std::move(term));
  prepared_.push_back(std::move(p));
}

void LindbladGenerator::add_hamiltonian_term(HamiltonianTerm term) {
  check_square(term.op, spec_.dim(), "Hamiltonian term");
  h_terms_.push_back(std::move(term));
}

bool LindbladGenerator::time_dependent() const {
  for (const auto& h : h_terms_) {
    if (!h.coefficient.is_constant()) return true;
  }
  for (const auto& d : terms_) {
    if (!d.scale.is_constant()) return true;
  }
  return false;
}

std::optional<std::pair<double, double>> LindbladGenerator::time_span() const {
  if (!time_dependent()) return std::nullopt;
  std::pair<double, double> span{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  auto narrow = [&span](const Schedule& s) {
    const auto [lo, hi] = s.span();
    span.first = std::max(span.first, lo);
    span.second = std::min(span.second, hi);
  };
  for (const auto& h : h_terms_) narrow(h.coefficient);
  for (const auto& d : terms_) narrow(d.scale);
  return span;
}

// K = -i H(t) - sum r R^dagger L acts from the left, K' = i H(t) - sum r R^dagger L
// from the right.
void LindbladGenerator::left_right_ops(double t, CMatrix& k_left_t, CMatrix& k_right) const {
  CMatrix h = hamiltonian_;
  for (const auto& term : h_terms_) h += term.coefficient.at(t) * term.op;
  CMatrix d = CMatrix::Zero(spec_.dim(), spec_.dim());
  for (std::size_t m = 0; m < terms_.size(); ++m) {
    d += (terms_[m].rate * terms_[m].scale.at(t)) * prepared_[m].rdag_l;
  }
  k_left_t = (-kI * h - d).transpose();
  k_right = kI * h - d;
}

CMatrix LindbladGenerator::apply(double t, const CMatrix& rho) const {
  const Eigen::Index n = spec_.dim();
  check_square(rho, n, "density matrix");
  CMatrix k_left_t, k_right;
  left_right_ops(t, k_left_t, k_right);

  // Left products are accumulated transposed, (X A)^T = A^T X^T, so that the
  // sparse operator is always the right-hand gemm operand.
  const CMatrix rho_t = rho.transpose();
  CMatrix acc_t = CMatrix::Zero(n, n);
  kernels::gemm_acc(1.0, rho_t, k_left_t, acc_t);
  CMatrix x(n, n);
  for (std::size_t m = 0; m < terms_.size(); ++m) {
    const Complex w = 2.0 * terms_[m].rate * terms_[m].scale.at(t);
    if (w == Complex(0.0)) continue;
    x.setZero();
    kernels::gemm_acc(1.0, rho, prepared_[m].right_adj, x);  // rho R^dagger
    const CMatrix x_t = x.transpose();
    kernels::gemm_acc(w, x_t, prepared_[m].left_t, acc_t);   // (L rho R^dagger)^T
  }
  CMatrix out = acc_t.transpose();
  kernels::gemm_acc(1.0, rho, k_right, out);
  return out;
}

double LindbladGenerator::norm_bound() const {
  double h = norm_estimate(hamiltonian_);
  for (const auto& term : h_terms_) h += term.coefficient.max_abs() * norm_estimate(term.op);
  double b = 2.0 * h;
  for (std::size_t m = 0; m < terms_.size(); ++m) {
    const double r = std::abs(terms_[m].rate) * terms_[m].scale.max_abs();
    b += r * (2.0 * norm_estimate(prepared_[m].rdag_l) +
              2.0 * norm_estimate(terms_[m].left) * norm_estimate(terms_[m].right));
  }
  return b;
}

CMatrix LindbladGenerator::superoperator_matrix(double t) const {
  const Eigen::Index n = spec_.dim();
  CMatrix s(n * n, n * n);
  CMatrix e = CMatrix::Zero(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      e(r, c) = 1.0;
      const CMatrix col = apply(t, e);
      s.col(r + c * n) = col.reshaped();
      e(r, c) = 0.0;
    }
  }
  return s;
}

std::vector<CMatrix> collective_operators(const CVector& G, const fock::TruncationSpec& spec) {
  if (G.size() != spec.num_modes()) {
    throw std::invalid_argument("collective_operators: G length must equal the mode count");
  }
  const CMatrix rot = coupling::collective_rotation(G);
  std::vector<CMatrix> ladders;
  for (int j = 0; j < spec.num_modes(); ++j) ladders.push_back(fock::ladder_operator(j, spec));
  std::vector<CMatrix> out;
  for (int i = 0; i < spec.num_modes(); ++i) {
    CMatrix a = CMatrix::Zero(spec.dim(), spec.dim());
    for (int j = 0; j < spec.num_modes(); ++j) {
      if (rot(i, j) != Complex(0.0)) a += rot(i, j) * ladders[static_cast<std::size_t>(j)];
    }
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

LindbladGenerator bm_from_direction(const CVector& G, double k, double nbar, double omega,
                                    const fock::TruncationSpec& spec) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("build_bm_generator: k must be finite and >= 0");
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw std::invalid_argument("build_bm_generator: nbar must be finite and >= 0");
  }
  const auto ops = collective_operators(G, spec);
  CMatrix h = CMatrix::Zero(spec.dim(), spec.dim());
  for (const auto& a : ops) h += omega * (a.adjoint() * a);
  LindbladGenerator gen(spec, std::move(h));
  const CMatrix& a1 = ops.front();
  gen.add_dissipator({a1, a1, k * (nbar + 1.0)});
  if (nbar > 0.0) {
    const CMatrix a1d = a1.adjoint();
    gen.add_dissipator({a1d, a1d, k * nbar});
  }
  return gen;
}

}  // namespace

LindbladGenerator build_bm_generator(const coupling::RateModel& rates, double omega, const fock::TruncationSpec& spec,
                                     const std::optional<CVector>& G) {
  if (rates.k.size() != static_cast<std::size_t>(spec.num_modes())) {
    throw std::invalid_argument("build_bm_generator: one rate per mode required");
  }
  const CVector dir = G.value_or(coupling::coupling_from_rates(rates.k));
  return bm_from_direction(dir, rates.total(), rates.nbar, omega, spec);
}

LindbladGenerator build_bm_generator(const coupling::CouplingModel& model, double collective_rate, double nbar,
                                     const fock::TruncationSpec& spec) {
  model.validate();
  if (model.num_oscillators() != spec.num_modes()) {
    throw std::invalid_argument("build_bm_generator: oscillator count differs from the truncation");
  }
  CVector G;
  if (const auto* f = std::get_if<coupling::FactorizedCoupling>(&model.coupling)) {
    G = f->G;
  } else {
    const auto sep = coupling::separability_check(std::get<CMatrix>(model.coupling));
    if (!sep.separable) {
      throw PhysicsGuardError("build_bm_generator: coupling is not separable (defect " +
                              std::to_string(sep.defect) + ")");
    }
    G = sep.factors->G;
  }
  const double w0 = model.frequencies(0);
  for (Eigen::Index i = 1; i < model.frequencies.size(); ++i) {
    if (std::abs(model.frequencies(i) - w0) > 1e-12 * std::max(1.0, std::abs(w0))) {
      throw PhysicsGuardError("build_bm_generator: oscillator frequencies are not degenerate");
    }
  }
  return bm_from_direction(G, collective_rate, nbar, w0, spec);
}

LindbladGenerator build_realistic_generator(const coupling::RateModel& rates, double omega1, double omega2,
                                            const fock::TruncationSpec& spec, bool allow_unphysical) {
  if (spec.num_modes() != 2 || rates.k.size() != 2) {
    throw std::invalid_argument("build_realistic_generator: two oscillators required");
  }
  if (rates.nbar != 0.0) {
    throw std::invalid_argument("build_realistic_generator: only the zero-temperature form is available");
  }
  const double k1 = rates.k[0];
  const double k2 = rates.k[1];
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) throw std::invalid_argument("build_realistic_generator: rates must be >= 0");
  const auto cs = coupling::cauchy_schwarz_check(rates);
  if (!cs.physical && !allow_unphysical) {
    std::ostringstream msg;
    msg << "build_realistic_generator: |k3|^2 exceeds k1 k2 by " << -cs.slack << " (not completely positive)";
    throw PhysicsGuardError(msg.str());
  }
  const CMatrix a1 = fock::ladder_operator(0, spec);
  const CMatrix a2 = fock::ladder_operator(1, spec);
  LindbladGenerator gen(spec, omega1 * (a1.adjoint() * a1) + omega2 * (a2.adjoint() * a2));
  gen.add_dissipator({a1, a1, k1});
  gen.add_dissipator({a2, a2, k2});
  if (rates.k3 != Complex(0.0)) {
    gen.add_dissipator({a1, a2, rates.k3});
    gen.add_dissipator({a2, a1, std::conj(rates.k3)});
  }
  return gen;
}

LindbladGenerator build_time_dependent_generator(const memory::MemoryKernelSolution& kernel, const CVector& G,
                                                 const fock::TruncationSpec& spec) {
  const std::size_t n = kernel.grid.count;
  if (n < 2 || kernel.lambda.size() != n || kernel.delta.size() != n || kernel.epsilon.size() != n) {
    throw std::invalid_argument("build_time_dependent_generator: kernel trajectories do not match the grid");
  }
  const auto ops = collective_operators(G, spec);
  CMatrix h = CMatrix::Zero(spec.dim(), spec.dim());
  for (const auto& a : ops) h += kernel.omega * (a.adjoint() * a);
  LindbladGenerator gen(spec, std::move(h));

  const std::vector<double> t = kernel.grid.values();
  std::vector<double> down(n);
  for (std::size_t i = 0; i < n; ++i) down[i] = kernel.lambda[i] + kernel.epsilon[i];
  const CMatrix& a1 = ops.front();
  gen.add_hamiltonian_term({a1.adjoint() * a1, Schedule::tabulated(t, kernel.delta)});
  gen.add_dissipator({a1, a1, 1.0, Schedule::tabulated(t, std::move(down))});
  const bool thermal = std::any_of(kernel.epsilon.begin(), kernel.epsilon.end(), [](double e) { return e != 0.0; });
  if (thermal) {
    const CMatrix a1d = a1.adjoint();
    gen.add_dissipator({a1d, a1d, 1.0, Schedule::tabulated(t, kernel.epsilon)});
  }
  return gen;
}

double PropagationResult::max_trace_error() const {
  return trace_error.empty() ? 0.0 : *std::max_element(trace_error.begin(), trace_error.end());
}

double PropagationResult::worst_min_eigenvalue() const {
  return min_eigenvalue.empty() ? 0.0 : *std::min_element(min_eigenvalue.begin(), min_eigenvalue.end());
}

double PropagationResult::max_hermiticity_error() const {
  return hermiticity_error.empty() ? 0.0 : *std::max_element(hermiticity_error.begin(), hermiticity_error.end());
}

namespace {

void rk4_step(const LindbladGenerator& gen, double t, double h, CMatrix& y) {
  const CMatrix k1 = gen.apply(t, y);
  const CMatrix k2 = gen.apply(t + 0.5 * h, y + (0.5 * h) * k1);
  const CMatrix k3 = gen.apply(t + 0.5 * h, y + (0.5 * h) * k2);
  const CMatrix k4 = gen.apply(t + h, y + h * k3);
  y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_finite(const CMatrix& y, double t) {
  if (!y.allFinite()) {
    std::ostringstream msg;
    msg << "propagate: non-finite density matrix at t = " << io::format_double(t);
    throw NumericError(msg.str());
  }
}

// n equal steps from t0 to t1; the final stage time is exactly t1.
void advance(const LindbladGenerator& gen, double t0, double t1, long n, bool renormalize, CMatrix& y) {
  const double h = (t1 - t0) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    const double hs = (i + 1 == n) ? t1 - t : h;
    rk4_step(gen, t, hs, y);
    check_finite(y, t + hs);
    if (renormalize) y /= y.trace().real();
  }
}

}  // namespace

PropagationResult propagate(const LindbladGenerator& gen, const fock::DensityMatrix& rho0,
                            const std::vector<double>& times, const StepperConfig& cfg) {
  if (!(rho0.spec() == gen.spec())) throw std::invalid_argument("propagate: state and generator truncations differ");
  if (times.empty()) throw std::invalid_argument("propagate: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("propagate: times must be strictly increasing");
  }
  if (const auto span = gen.time_span()) {
    if (times.front() < span->first || times.back() > span->second) {
      std::ostringstream msg;
      msg << "propagate: requested times [" << times.front() << ", " << times.back()
          << "] outside the generator span [" << span->first << ", " << span->second << "]";
      throw std::out_of_range(msg.str());
    }
  }
  const double bound = gen.norm_bound();
  double h = cfg.step;
  if (h <= 0.0) h = bound > 0.0 ? 0.09 / bound : std::numeric_limits<double>::infinity();
  if (bound > 0.0 && !(h * bound < 0.1)) {
    std::ostringstream msg;
    msg << "propagate: step " << h << " too large for generator norm bound " << bound << " (need h*|L| < 0.1)";
    throw NumericError(msg.str());
  }

  PropagationResult res;
  res.step = h;
  CMatrix y = rho0.matrix();
  auto record = [&](double t) {
    fock::DensityMatrix state(gen.spec(), y);
    res.times.push_back(t);
    res.trace_error.push_back(std::abs(y.trace() - Complex(1.0)));
    res.hermiticity_error.push_back((y - y.adjoint()).cwiseAbs().maxCoeff());
    res.min_eigenvalue.push_back(cfg.track_positivity ? fock::hermitian_eigenvalues(y).minCoeff()
                                                      : std::numeric_limits<double>::quiet_NaN());
    res.states.push_back(std::move(state));
  };
  record(times.front());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t0 = times[i - 1];
    const double t1 = times[i];
    const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / h * (1.0 - 1e-12))));
    if (cfg.richardson) {
      CMatrix coarse = y;
      advance(gen, t0, t1, n, false, coarse);
      advance(gen, t0, t1, 2 * n, false, y);
      y = (16.0 * y - coarse) / 15.0;
      if (cfg.renormalize_trace) y /= y.trace().real();
    } else {
      advance(gen, t0, t1, n, cfg.renormalize_trace, y);
    }
    record(t1);
  }
  return res;
}

fock::DensityMatrix steady_state(const LindbladGenerator& gen, const fock::DensityMatrix& rho0,
                                 const SteadyStateConfig& cfg) {
  if (gen.time_dependent()) throw std::invalid_argument("steady_state: generator is time dependent");
  if (!(cfg.check_interval > 0.0) || !(cfg.t_max > 0.0)) {
    throw std::invalid_argument("steady_state: check_interval and t_max must be positive");
  }
  auto residual = [&gen](const CMatrix& y) {
    return fock::hermitian_eigenvalues(gen.apply(0.0, y)).cwiseAbs().sum();
  };
  StepperConfig step = cfg.stepper;
  step.track_positivity = false;
  CMatrix y = rho0.matrix();
  double t = 0.0;
  double r = residual(y);
  while (r >= cfg.tolerance) {
    if (t >= cfg.t_max) {
      std::ostringstream msg;
      msg << "steady_state: residual " << r << " above " << cfg.tolerance << " at t_max = " << cfg.t_max;
      throw NumericError(msg.str());
    }
    const auto res = propagate(gen, fock::DensityMatrix(gen.spec(), y), {0.0, cfg.check_interval}, step);
    y = res.states.back().matrix();
    t += cfg.check_interval;
    r = residual(y);
  }
  return fock::DensityMatrix(gen.spec(), std::move(y));
}

void write_csv(const PropagationResult& result, const std::vector<Observable>& observables, std::ostream& out) {
  out << "time,trace_error,min_eig";
  for (const auto& [name, fn] : observables) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    out << io::format_double(result.times[i]) << ',' << io::format_double(result.trace_error[i]) << ','
        << io::format_double(result.min_eigenvalue[i]);
    for (const auto& [name, fn] : observables) out << ',' << io::format_double(fn(result.times[i], result.states[i]));
    out << '\n';
  }
}

}  // namespace wds::lindblad
