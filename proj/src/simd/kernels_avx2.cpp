// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "compsupp/simd/kernels.hpp"

namespace compsupp::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double max_abs_avx2(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, vabs(_mm256_loadu_pd(x + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

double axpy_max_abs_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
    m = _mm256_max_pd(m, vabs(r));
  }
  double out = hmax(m);
  for (; i < n; ++i) {
    y[i] = std::fma(a, x[i], y[i]);
    out = std::fmax(out, std::fabs(y[i]));
  }
  return out;
}

double mass_dot_avx2(const double* u, const double* v, std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t segs = n - 1;
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= segs; i += 4) {
    const __m256d u0 = _mm256_loadu_pd(u + i);
    const __m256d u1 = _mm256_loadu_pd(u + i + 1);
    const __m256d v0 = _mm256_loadu_pd(v + i);
    const __m256d v1 = _mm256_loadu_pd(v + i + 1);
    __m256d diag = _mm256_fmadd_pd(u0, v0, _mm256_mul_pd(u1, v1));
    __m256d cross = _mm256_fmadd_pd(u0, v1, _mm256_mul_pd(u1, v0));
    acc = _mm256_add_pd(acc, _mm256_fmadd_pd(two, diag, cross));
  }
  double s = hsum(acc);
  for (; i < segs; ++i) {
    s += 2.0 * u[i] * v[i] + u[i] * v[i + 1] + u[i + 1] * v[i] + 2.0 * u[i + 1] * v[i + 1];
  }
  return s;
}

constexpr KernelTable kAvx2{Isa::avx2, dot_avx2, axpy_avx2, max_abs_avx2, axpy_max_abs_avx2,
                            mass_dot_avx2};

}  // namespace

const KernelTable* avx2_kernels_impl() noexcept { return &kAvx2; }

}  // namespace compsupp::simd
