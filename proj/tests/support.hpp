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

// Shared test helpers: the frozen oracle file and seeded random inputs.

#pragma once

#include "wdsim/common.hpp"
#include "wdsim/fock.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace wds::test {

inline const nlohmann::json& oracles() {
  static const nlohmann::json j = [] {
    std::ifstream in(std::string(WDSIM_ORACLE_DIR) + "/oracles.json");
    if (!in) throw std::runtime_error("oracles.json not found");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline CMatrix unpack(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  CMatrix m(static_cast<Eigen::Index>(re.size()), static_cast<Eigen::Index>(re[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = {re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>(),
                 im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>()};
    }
  }
  return m;
}

inline Complex cplx(const nlohmann::json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = {n(rng), n(rng)};
  }
  return m;
}

/// Random density matrix of the given rank supported on total excitation <= cap.
inline fock::DensityMatrix random_state(std::mt19937_64& rng, const fock::TruncationSpec& spec, int cap, int rank = 2) {
  CMatrix x = random_matrix(rng, spec.dim(), rank);
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    if (spec.total_excitation(i) > cap) x.row(i).setZero();
  }
  CMatrix rho = x * x.adjoint();
  rho /= rho.trace();
  return fock::DensityMatrix(spec, rho);
}

}  // namespace wds::test
