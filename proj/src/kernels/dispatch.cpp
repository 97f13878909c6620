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

#include "wdsim/kernels.hpp"

#include <cstdlib>
#include <string>

namespace wds::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("WDSIM_ISA")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(WDSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
#ifdef WDSIM_HAVE_AVX2
  if (isa == Isa::kAvx2) {
    if (!isa_supported(Isa::kAvx2)) throw std::runtime_error("AVX2 kernels not supported on this CPU");
    return avx2::kTable;
  }
#else
  if (isa == Isa::kAvx2) throw std::runtime_error("AVX2 kernels not built");
#endif
  return scalar::kTable;
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  if (x.size() != y.size()) throw std::invalid_argument("caxpy: length mismatch");
  active().caxpy(x.size(), a, x.data(), y.data());
}

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  return active().dot(x.size(), x.data(), y.data());
}

void gemm_acc(Complex alpha, const CMatrix& a, const CMatrix& b, CMatrix& c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
    throw std::invalid_argument("gemm_acc: shape mismatch");
  }
  active().gemm_acc(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.cols()),
                    static_cast<std::size_t>(a.cols()), alpha, a.data(), b.data(), c.data());
}

}  // namespace wds::kernels
