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

#include "wdsim/fock.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wds::fock {

TruncationSpec::TruncationSpec(int num_modes, int max_excitation_per_mode)
    : num_modes_(num_modes), max_excitation_(max_excitation_per_mode), dim_(1) {
  if (num_modes < 1) throw std::invalid_argument("TruncationSpec: num_modes must be >= 1");
  if (max_excitation_per_mode < 1) {
    throw std::invalid_argument("TruncationSpec: max_excitation_per_mode must be >= 1");
  }
  for (int i = 0; i < num_modes; ++i) {
    dim_ *= (max_excitation_per_mode + 1);
    if (dim_ > (1 << 20)) throw std::invalid_argument("TruncationSpec: dimension too large");
  }
}

Eigen::Index TruncationSpec::index_of(std::span<const int> occupations) const {
  if (static_cast<int>(occupations.size()) != num_modes_) {
    throw std::invalid_argument("TruncationSpec::index_of: wrong number of modes");
  }
  Eigen::Index idx = 0;
  for (int n : occupations) {
    if (n < 0 || n > max_excitation_) {
      throw std::out_of_range("TruncationSpec::index_of: occupation outside truncation");
    }
    idx = idx * (max_excitation_ + 1) + n;
  }
  return idx;
}

std::vector<int> TruncationSpec::occupations_of(Eigen::Index index) const {
  if (index < 0 || index >= dim_) throw std::out_of_range("TruncationSpec::occupations_of");
  std::vector<int> occ(static_cast<std::size_t>(num_modes_));
  for (int i = num_modes_ - 1; i >= 0; --i) {
    occ[static_cast<std::size_t>(i)] = static_cast<int>(index % (max_excitation_ + 1));
    index /= (max_excitation_ + 1);
  }
  return occ;
}

int TruncationSpec::total_excitation(Eigen::Index index) const {
  const auto occ = occupations_of(index);
  int total = 0;
  for (int n : occ) total += n;
  return total;
}

ModeVector::ModeVector(CVector coefficients) : c_(std::move(coefficients)) {
  const double norm = c_.norm();
  if (c_.size() == 0 || !(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("ModeVector: zero-norm mode");
  }
  c_ /= norm;
}

ModeVector ModeVector::from_angles(double alpha, double phi) {
  CVector c(2);
  c << std::cos(alpha), std::polar(1.0, phi) * std::sin(alpha);
  return ModeVector(std::move(c));
}

DensityMatrix::DensityMatrix(TruncationSpec spec, CMatrix entries) : spec_(spec), m_(std::move(entries)) {
  if (m_.rows() != spec_.dim() || m_.cols() != spec_.dim()) {
    throw std::invalid_argument("DensityMatrix: matrix shape does not match truncation");
  }
}

RVector hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

StateDiagnostics DensityMatrix::diagnostics() const {
  StateDiagnostics d;
  d.hermiticity_error = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m_.trace() - Complex(1.0));
  d.min_eigenvalue = hermitian_eigenvalues(m_).minCoeff();
  return d;
}

DensityMatrix DensityMatrix::checked(TruncationSpec spec, CMatrix entries, const Tolerances& tol) {
  DensityMatrix rho(spec, std::move(entries));
  const auto d = rho.diagnostics();
  std::ostringstream err;
  if (!(d.hermiticity_error <= tol.hermiticity)) {
    err << "not Hermitian (max |rho - rho^dagger| = " << d.hermiticity_error << ")";
  } else if (!(d.trace_error <= tol.trace)) {
    err << "trace differs from 1 by " << d.trace_error;
  } else if (!(d.min_eigenvalue >= -tol.positivity)) {
    err << "not positive (min eigenvalue " << d.min_eigenvalue << ")";
  }
  if (!err.str().empty()) throw std::invalid_argument("DensityMatrix: " + err.str());
  return rho;
}

DensityMatrix DensityMatrix::vacuum(const TruncationSpec& spec) {
  CMatrix m = CMatrix::Zero(spec.dim(), spec.dim());
  m(0, 0) = 1.0;
  return DensityMatrix(spec, std::move(m));
}

DensityMatrix DensityMatrix::pure(const TruncationSpec& spec, const CVector& ket) {
  if (ket.size() != spec.dim()) throw std::invalid_argument("DensityMatrix::pure: ket dimension");
  const double norm = ket.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("DensityMatrix::pure: zero ket");
  const CVector k = ket / norm;
  return DensityMatrix(spec, k * k.adjoint());
}

CMatrix ladder_operator(int mode, const TruncationSpec& spec) {
  if (mode < 0 || mode >= spec.num_modes()) throw std::out_of_range("ladder_operator: mode index");
  const Eigen::Index dim = spec.dim();
  Eigen::Index stride = 1;
  for (int i = spec.num_modes() - 1; i > mode; --i) stride *= (spec.max_excitation() + 1);
  CMatrix a = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int n = static_cast<int>((col / stride) % (spec.max_excitation() + 1));
    if (n > 0) a(col - stride, col) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

CMatrix number_operator(int mode, const TruncationSpec& spec) {
  if (mode < 0 || mode >= spec.num_modes()) throw std::out_of_range("number_operator: mode index");
  CMatrix n = CMatrix::Zero(spec.dim(), spec.dim());
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    n(i, i) = static_cast<double>(spec.occupations_of(i)[static_cast<std::size_t>(mode)]);
  }
  return n;
}

CVector basis_vector(const TruncationSpec& spec, const FockBasisState& state) {
  CVector v = CVector::Zero(spec.dim());
  v(spec.index_of(state.occupations)) = 1.0;
  return v;
}

CVector one_photon_vector(const ModeVector& mode, const TruncationSpec& spec) {
  if (mode.size() != spec.num_modes()) {
    throw std::invalid_argument("one_photon_vector: mode size differs from number of modes");
  }
  CVector v = CVector::Zero(spec.dim());
  std::vector<int> occ(static_cast<std::size_t>(spec.num_modes()), 0);
  for (int i = 0; i < spec.num_modes(); ++i) {
    occ[static_cast<std::size_t>(i)] = 1;
    v(spec.index_of(occ)) = mode[i];
    occ[static_cast<std::size_t>(i)] = 0;
  }
  return v;
}

DensityMatrix one_photon_state(const ModeVector& mode, const TruncationSpec& spec) {
  const CVector v = one_photon_vector(mode, spec);
  return DensityMatrix(spec, v * v.adjoint());
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

DensityMatrix dfs_state(const CMatrix& coeffs, double theta, const TruncationSpec& spec) {
  if (spec.num_modes() != 2) throw std::invalid_argument("dfs_state: requires two modes");
  if (coeffs.rows() != coeffs.cols() || coeffs.rows() == 0) {
    throw std::invalid_argument("dfs_state: coefficient table must be square and nonempty");
  }
  const int nmax = static_cast<int>(coeffs.rows()) - 1;
  if (nmax > spec.max_excitation()) {
    throw std::invalid_argument("dfs_state: truncation too small for coefficient table");
  }
  if ((coeffs - coeffs.adjoint()).cwiseAbs().maxCoeff() > 1e-12 ||
      std::abs(coeffs.trace() - Complex(1.0)) > 1e-10 || hermitian_eigenvalues(coeffs).minCoeff() < -1e-10) {
    throw std::invalid_argument("dfs_state: coefficients must be Hermitian PSD with unit trace");
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  // |n>_A2 = sum_{n1} sqrt(C(n, n1)) (-sin)^{n1} cos^{n-n1} |n1, n-n1>
  std::vector<CVector> kets;
  for (int n = 0; n <= nmax; ++n) {
    CVector v = CVector::Zero(spec.dim());
    for (int n1 = 0; n1 <= n; ++n1) {
      const int occ[2] = {n1, n - n1};
      v(spec.index_of(occ)) = std::sqrt(binomial(n, n1)) * std::pow(-s, n1) * std::pow(c, n - n1);
    }
    kets.push_back(std::move(v));
  }
  CMatrix rho = CMatrix::Zero(spec.dim(), spec.dim());
  for (int n = 0; n <= nmax; ++n) {
    for (int m = 0; m <= nmax; ++m) {
      if (coeffs(n, m) == Complex{}) continue;
      rho.noalias() += coeffs(n, m) * kets[static_cast<std::size_t>(n)] * kets[static_cast<std::size_t>(m)].adjoint();
    }
  }
  return DensityMatrix(spec, std::move(rho));
}

CMatrix collective_transform(const CMatrix& rotation, const TruncationSpec& spec) {
  const int modes = spec.num_modes();
  if (rotation.rows() != modes || rotation.cols() != modes) {
    throw std::invalid_argument("collective_transform: rotation must be num_modes x num_modes");
  }
  std::vector<Eigen::SparseMatrix<Complex>> creators;
  for (int i = 0; i < modes; ++i) {
    CMatrix b = CMatrix::Zero(spec.dim(), spec.dim());
    for (int j = 0; j < modes; ++j) {
      if (rotation(i, j) == Complex{}) continue;
      b += std::conj(rotation(i, j)) * ladder_operator(j, spec).adjoint();
    }
    creators.push_back(b.sparseView());
  }
  CMatrix w = CMatrix::Zero(spec.dim(), spec.dim());
  for (Eigen::Index col = 0; col < spec.dim(); ++col) {
    const auto occ = spec.occupations_of(col);
    int total = 0;
    for (int n : occ) total += n;
    if (total > spec.max_excitation()) {
      w(col, col) = 1.0;
      continue;
    }
    CVector v = CVector::Zero(spec.dim());
    v(0) = 1.0;
    for (int i = 0; i < modes; ++i) {
      const int n = occ[static_cast<std::size_t>(i)];
      for (int p = 1; p <= n; ++p) {
        v = (creators[static_cast<std::size_t>(i)] * v / std::sqrt(static_cast<double>(p))).eval();
      }
    }
    w.col(col) = v;
  }
  return w;
}

namespace {

void require_same(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
  if (a.dim() != b.dim()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same(rho, sigma, "fidelity");
  // Tr(rho sigma) = sum_ij rho_ij sigma_ji
  const Complex f = (rho.matrix().array() * sigma.matrix().transpose().array()).sum();
  return std::clamp(f.real(), 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix().array() * rho.matrix().transpose().array()).sum().real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same(rho, sigma, "trace_distance");
  return 0.5 * hermitian_eigenvalues(rho.matrix() - sigma.matrix()).cwiseAbs().sum();
}

double mode_population(const DensityMatrix& rho, const ModeVector& mode) {
  const CVector psi = one_photon_vector(mode, rho.spec());
  return std::clamp((psi.adjoint() * rho.matrix() * psi)(0, 0).real(), 0.0, 1.0);
}

Complex expectation(const DensityMatrix& rho, const CMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return (rho.matrix().array() * op.transpose().array()).sum();
}

DensityMatrix change_truncation(const DensityMatrix& rho, const TruncationSpec& target) {
  const auto& src = rho.spec();
  if (src.num_modes() != target.num_modes()) {
    throw std::invalid_argument("change_truncation: mode count differs");
  }
  std::vector<Eigen::Index> map(static_cast<std::size_t>(src.dim()), -1);
  for (Eigen::Index i = 0; i < src.dim(); ++i) {
    const auto occ = src.occupations_of(i);
    if (std::all_of(occ.begin(), occ.end(), [&](int n) { return n <= target.max_excitation(); })) {
      map[static_cast<std::size_t>(i)] = target.index_of(occ);
    }
  }
  CMatrix out = CMatrix::Zero(target.dim(), target.dim());
  for (Eigen::Index c = 0; c < src.dim(); ++c) {
    const auto tc = map[static_cast<std::size_t>(c)];
    if (tc < 0) continue;
    for (Eigen::Index r = 0; r < src.dim(); ++r) {
      const auto tr = map[static_cast<std::size_t>(r)];
      if (tr >= 0) out(tr, tc) = rho(r, c);
    }
  }
  return DensityMatrix(target, std::move(out));
}

nlohmann::json to_json(const DensityMatrix& rho) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index r = 0; r < rho.dim(); ++r) {
    for (Eigen::Index c = 0; c < rho.dim(); ++c) {
      entries.push_back({rho(r, c).real(), rho(r, c).imag()});
    }
  }
  return {{"dim", rho.dim()},
          {"spec", {{"num_modes", rho.spec().num_modes()}, {"max_excitation", rho.spec().max_excitation()}}},
          {"entries", std::move(entries)}};
}

DensityMatrix density_matrix_from_json(const nlohmann::json& j) {
  try {
    const TruncationSpec spec(j.at("spec").at("num_modes").get<int>(), j.at("spec").at("max_excitation").get<int>());
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto& entries = j.at("entries");
    if (dim != spec.dim() || static_cast<Eigen::Index>(entries.size()) != dim * dim) {
      throw std::invalid_argument("density matrix JSON: dim/entries inconsistent with spec");
    }
    CMatrix m(dim, dim);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c, ++k) {
        m(r, c) = Complex(entries[k].at(0).get<double>(), entries[k].at(1).get<double>());
      }
    }
    return DensityMatrix(spec, std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("density matrix JSON: ") + e.what());
  }
}

}  // namespace wds::fock
