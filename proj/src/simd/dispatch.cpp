#include <cstdlib>
#include <stdexcept>
#include <string>

#include "compsupp/simd/kernels.hpp"

namespace compsupp::simd {

#if defined(COMPSUPP_HAVE_AVX2)
const KernelTable* avx2_kernels_impl() noexcept;
#endif
#if defined(COMPSUPP_HAVE_NEON)
const KernelTable* neon_kernels_impl() noexcept;
#endif

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() noexcept {
#if defined(COMPSUPP_HAVE_AVX2)
  return avx2_kernels_impl();
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#if defined(COMPSUPP_HAVE_NEON)
  return neon_kernels_impl();
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(COMPSUPP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(COMPSUPP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::scalar: return scalar_kernels();
    case Isa::avx2: table = avx2_kernels(); break;
    case Isa::neon: table = neon_kernels(); break;
  }
  if (table == nullptr || !cpu_supports(isa)) {
    throw std::runtime_error("SIMD variant not available: " + std::string(isa_name(isa)));
  }
  return *table;
}

namespace {

const KernelTable& select_default() {
  if (const char* env = std::getenv("COMPSUPP_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2" && cpu_supports(Isa::avx2)) return *avx2_kernels();
    if (want == "neon" && cpu_supports(Isa::neon)) return *neon_kernels();
  }
  if (cpu_supports(Isa::avx2)) return *avx2_kernels();
  if (cpu_supports(Isa::neon)) return *neon_kernels();
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select_default();
  return table;
}

}  // namespace compsupp::simd
