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

// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the dispatcher has confirmed CPU support.

#include "wdsim/kernels.hpp"

#include <immintrin.h>

namespace wds::kernels::avx2 {
namespace {

// One __m256d holds two interleaved complex doubles: [re0, im0, re1, im1].

inline __m256d load2(const Complex* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(Complex* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// a * x for broadcast a = (ar, ai)
inline __m256d cmul_bcast(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

void caxpy(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y0 = _mm256_add_pd(load2(y + i), cmul_bcast(ar, ai, load2(x + i)));
    const __m256d y1 = _mm256_add_pd(load2(y + i + 2), cmul_bcast(ar, ai, load2(x + i + 2)));
    store2(y + i, y0);
    store2(y + i + 2, y1);
  }
  for (; i + 2 <= n; i += 2) {
    store2(y + i, _mm256_add_pd(load2(y + i), cmul_bcast(ar, ai, load2(x + i))));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real();
    const double xi = x[i].imag();
    y[i] = Complex(y[i].real() + a.real() * xr - a.imag() * xi,
                   y[i].imag() + a.real() * xi + a.imag() * xr);
  }
}

Complex dot(std::size_t n, const Complex* x, const Complex* y) {
  // acc_a collects [xr*yr, xr*yi], acc_b collects [xi*yi, xi*yr];
  // addsub at the end yields [re, im].
  __m256d acc_a0 = _mm256_setzero_pd();
  __m256d acc_b0 = _mm256_setzero_pd();
  __m256d acc_a1 = _mm256_setzero_pd();
  __m256d acc_b1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = load2(x + i);
    const __m256d y0 = load2(y + i);
    const __m256d x1 = load2(x + i + 2);
    const __m256d y1 = load2(y + i + 2);
    acc_a0 = _mm256_fmadd_pd(_mm256_movedup_pd(x0), y0, acc_a0);
    acc_b0 = _mm256_fmadd_pd(_mm256_permute_pd(x0, 0b1111), _mm256_permute_pd(y0, 0b0101), acc_b0);
    acc_a1 = _mm256_fmadd_pd(_mm256_movedup_pd(x1), y1, acc_a1);
    acc_b1 = _mm256_fmadd_pd(_mm256_permute_pd(x1, 0b1111), _mm256_permute_pd(y1, 0b0101), acc_b1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = load2(x + i);
    const __m256d y0 = load2(y + i);
    acc_a0 = _mm256_fmadd_pd(_mm256_movedup_pd(x0), y0, acc_a0);
    acc_b0 = _mm256_fmadd_pd(_mm256_permute_pd(x0, 0b1111), _mm256_permute_pd(y0, 0b0101), acc_b0);
  }
  const __m256d acc = _mm256_addsub_pd(_mm256_add_pd(acc_a0, acc_a1), _mm256_add_pd(acc_b0, acc_b1));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double re = lanes[0] + lanes[2];
  double im = lanes[1] + lanes[3];
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, Complex alpha, const Complex* a,
              const Complex* b, Complex* c) {
  // Column j of C gathers the nonzero B(p, j) first; ladder-operator products
  // are very sparse and the zero multipliers are skipped entirely.
  constexpr std::size_t kMaxBatch = 4;
  for (std::size_t j = 0; j < n; ++j) {
    Complex* cj = c + j * m;
    std::size_t idx[kMaxBatch];
    Complex coef[kMaxBatch];
    std::size_t batch = 0;
    auto flush = [&]() {
      if (batch == 0) return;
      if (batch < kMaxBatch) {
        for (std::size_t q = 0; q < batch; ++q) caxpy(m, coef[q], a + idx[q] * m, cj);
        batch = 0;
        return;
      }
      const Complex* a0 = a + idx[0] * m;
      const Complex* a1 = a + idx[1] * m;
      const Complex* a2 = a + idx[2] * m;
      const Complex* a3 = a + idx[3] * m;
      const __m256d r0 = _mm256_set1_pd(coef[0].real()), i0 = _mm256_set1_pd(coef[0].imag());
      const __m256d r1 = _mm256_set1_pd(coef[1].real()), i1 = _mm256_set1_pd(coef[1].imag());
      const __m256d r2 = _mm256_set1_pd(coef[2].real()), i2 = _mm256_set1_pd(coef[2].imag());
      const __m256d r3 = _mm256_set1_pd(coef[3].real()), i3 = _mm256_set1_pd(coef[3].imag());
      std::size_t i = 0;
      for (; i + 2 <= m; i += 2) {
        __m256d acc = load2(cj + i);
        acc = _mm256_add_pd(acc, cmul_bcast(r0, i0, load2(a0 + i)));
        acc = _mm256_add_pd(acc, cmul_bcast(r1, i1, load2(a1 + i)));
        acc = _mm256_add_pd(acc, cmul_bcast(r2, i2, load2(a2 + i)));
        acc = _mm256_add_pd(acc, cmul_bcast(r3, i3, load2(a3 + i)));
        store2(cj + i, acc);
      }
      for (; i < m; ++i) {
        cj[i] += coef[0] * a0[i] + coef[1] * a1[i] + coef[2] * a2[i] + coef[3] * a3[i];
      }
      batch = 0;
    };
    for (std::size_t p = 0; p < k; ++p) {
      const Complex bpj = b[j * k + p];
      if (bpj == Complex{}) continue;
      idx[batch] = p;
      coef[batch] = alpha * bpj;
      if (++batch == kMaxBatch) flush();
    }
    flush();
  }
}

}  // namespace

const KernelTable kTable{&caxpy, &dot, &gemm_acc};

}  // namespace wds::kernels::avx2
