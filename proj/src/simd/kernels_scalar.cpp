#include <cmath>

#include "compsupp/simd/kernels.hpp"

namespace compsupp::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

double axpy_max_abs_scalar(double a, const double* x, double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += a * x[i];
    m = std::fmax(m, std::fabs(y[i]));
  }
  return m;
}

double mass_dot_scalar(const double* u, const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    s += 2.0 * u[i] * v[i] + u[i] * v[i + 1] + u[i + 1] * v[i] + 2.0 * u[i + 1] * v[i + 1];
  }
  return s;
}

constexpr KernelTable kScalar{Isa::scalar, dot_scalar, axpy_scalar, max_abs_scalar,
                              axpy_max_abs_scalar, mass_dot_scalar};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace compsupp::simd
