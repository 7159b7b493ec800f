// aarch64 only; Advanced SIMD is architecturally guaranteed there.
#include <arm_neon.h>

#include <cmath>

#include "compsupp/simd/kernels.hpp"

namespace compsupp::simd {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

double axpy_max_abs_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i));
    vst1q_f64(y + i, r);
    m = vmaxq_f64(m, vabsq_f64(r));
  }
  double out = vmaxvq_f64(m);
  for (; i < n; ++i) {
    y[i] = std::fma(a, x[i], y[i]);
    out = std::fmax(out, std::fabs(y[i]));
  }
  return out;
}

double mass_dot_neon(const double* u, const double* v, std::size_t n) {
  if (n < 2) return 0.0;
  const std::size_t segs = n - 1;
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= segs; i += 2) {
    const float64x2_t u0 = vld1q_f64(u + i);
    const float64x2_t u1 = vld1q_f64(u + i + 1);
    const float64x2_t v0 = vld1q_f64(v + i);
    const float64x2_t v1 = vld1q_f64(v + i + 1);
    float64x2_t diag = vfmaq_f64(vmulq_f64(u1, v1), u0, v0);
    float64x2_t cross = vfmaq_f64(vmulq_f64(u1, v0), u0, v1);
    acc = vaddq_f64(acc, vfmaq_f64(cross, vdupq_n_f64(2.0), diag));
  }
  double s = vaddvq_f64(acc);
  for (; i < segs; ++i) {
    s += 2.0 * u[i] * v[i] + u[i] * v[i + 1] + u[i + 1] * v[i] + 2.0 * u[i + 1] * v[i + 1];
  }
  return s;
}

constexpr KernelTable kNeon{Isa::neon, dot_neon, axpy_neon, max_abs_neon, axpy_max_abs_neon,
                            mass_dot_neon};

}  // namespace

const KernelTable* neon_kernels_impl() noexcept { return &kNeon; }

}  // namespace compsupp::simd
