// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace rbws::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpby_avx2(const double* x, double beta, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

inline double row_dot(const CsrView& a, Index i, const double* x) {
  std::int64_t p = a.row_ptr[i];
  const std::int64_t end = a.row_ptr[i + 1];
  __m256d acc = _mm256_setzero_pd();
  for (; p + 4 <= end; p += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a.col_idx + p));
    const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.values + p), xv, acc);
  }
  double sum = hsum(acc);
  for (; p < end; ++p) sum += a.values[p] * x[a.col_idx[p]];
  return sum;
}

void spmv_avx2(const CsrView& a, const double* x, double* y) {
  for (Index i = 0; i < a.rows; ++i) y[i] = row_dot(a, i, x);
}

void residual_avx2(const CsrView& a, const double* b, const double* x, double* r) {
  for (Index i = 0; i < a.rows; ++i) r[i] = b[i] - row_dot(a, i, x);
}

}  // namespace

const KernelTable kAvx2Table{Isa::avx2, dot_avx2, axpy_avx2, xpby_avx2, spmv_avx2, residual_avx2};

}  // namespace rbws::simd::detail
