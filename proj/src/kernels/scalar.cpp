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

namespace wds::kernels::scalar {
namespace {

// Real arithmetic spelled out: std::complex operator* carries NaN/Inf
// recovery branches that dominate these loops.

void caxpy(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const double ar = a.real();
  const double ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = Complex(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
  }
}

Complex dot(std::size_t n, const Complex* x, const Complex* y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    const double yr = y[i].real();
    const double yi = y[i].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, Complex alpha, const Complex* a,
              const Complex* b, Complex* c) {
  for (std::size_t j = 0; j < n; ++j) {
    Complex* cj = c + j * m;
    for (std::size_t p = 0; p < k; ++p) {
      const Complex bpj = alpha * b[j * k + p];
      if (bpj == Complex{}) continue;
      caxpy(m, bpj, a + p * m, cj);
    }
  }
}

}  // namespace

const KernelTable kTable{&caxpy, &dot, &gemm_acc};

}  // namespace wds::kernels::scalar
