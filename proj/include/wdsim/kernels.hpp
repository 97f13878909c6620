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

// Complex double inner-loop kernels.
//
// Every kernel has a portable scalar reference and, when the build enables it,
// an AVX2/FMA variant. The variant is chosen once at first use from CPUID;
// setting WDSIM_ISA=scalar in the environment pins the reference path.
// Both variants are exposed through table() so tests can compare them.

#pragma once

#include "wdsim/common.hpp"

#include <cstddef>
#include <span>
#include <string_view>

namespace wds::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  /// y[i] += a * x[i]
  void (*caxpy)(std::size_t n, Complex a, const Complex* x, Complex* y);
  /// sum_i x[i] * y[i]  (no conjugation)
  Complex (*dot)(std::size_t n, const Complex* x, const Complex* y);
  /// C += alpha * A * B, column-major, A is m x k, B is k x n, C is m x n,
  /// leading dimensions equal to the row counts.
  void (*gemm_acc)(std::size_t m, std::size_t n, std::size_t k, Complex alpha,
                   const Complex* a, const Complex* b, Complex* c);
};

bool isa_supported(Isa isa);
const KernelTable& table(Isa isa);

/// The table in use for this process.
const KernelTable& active();
Isa active_isa();
std::string_view isa_name(Isa isa);

// Span/matrix front ends over active().

void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
Complex dot(std::span<const Complex> x, std::span<const Complex> y);

/// c += alpha * a * b
void gemm_acc(Complex alpha, const CMatrix& a, const CMatrix& b, CMatrix& c);

namespace scalar {
extern const KernelTable kTable;
}
#ifdef WDSIM_HAVE_AVX2
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace wds::kernels
