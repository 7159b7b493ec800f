#pragma once

// Data-parallel inner loops shared by every module. Each kernel has a scalar
// reference implementation and vectorised variants (AVX2+FMA on x86-64, NEON
// on aarch64) selected once at runtime. The variants are equivalence-tested
// against the scalar reference; results agree to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace compsupp::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
  // y[i] += a * x[i], returns max_i |y[i]| after the update
  double (*axpy_max_abs)(double a, const double* x, double* y, std::size_t n);
  // Unscaled P1 mass form on a uniform grid of n nodes:
  //   sum over segments of 2 u0 v0 + u0 v1 + u1 v0 + 2 u1 v1.
  // Multiply by h/6 for the exact L2 inner product of the interpolants.
  double (*mass_dot)(const double* u, const double* v, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// Vectorised table for this build, or nullptr when not compiled in.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

bool cpu_supports(Isa isa) noexcept;

/// Table used by the library. Chosen on first use: the best ISA the CPU
/// supports, unless COMPSUPP_SIMD=scalar|avx2|neon overrides it.
const KernelTable& active() noexcept;

/// Table for a specific ISA; throws std::runtime_error if unavailable.
const KernelTable& kernels_for(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}

inline double max_abs(std::span<const double> x) {
  return active().max_abs(x.data(), x.size());
}

inline double axpy_max_abs(double a, std::span<const double> x, std::span<double> y) {
  return active().axpy_max_abs(a, x.data(), y.data(), y.size());
}

inline double mass_dot(std::span<const double> u, std::span<const double> v) {
  return active().mass_dot(u.data(), v.data(), u.size());
}

}  // namespace compsupp::simd
