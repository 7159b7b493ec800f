#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "compsupp/dyadic.hpp"
#include "compsupp/simd/kernels.hpp"

using namespace compsupp;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("vector kernels agree with the scalar reference", "[simd]") {
  const auto& ref = simd::scalar_kernels();
  const simd::KernelTable* vec = simd::avx2_kernels();
  if (vec == nullptr || !simd::cpu_supports(simd::Isa::avx2)) vec = &simd::active();

  // odd lengths exercise the remainder loops
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 257u, 1025u}) {
    auto x = random_vec(n, 11 + n);
    auto y = random_vec(n, 97 + n);
    const double scale = 1.0 + static_cast<double>(n);

    CHECK(vec->dot(x.data(), y.data(), n) == Catch::Approx(ref.dot(x.data(), y.data(), n)).margin(1e-12 * scale));
    CHECK(vec->max_abs(x.data(), n) == ref.max_abs(x.data(), n));
    if (n >= 2) {
      CHECK(vec->mass_dot(x.data(), y.data(), n) ==
            Catch::Approx(ref.mass_dot(x.data(), y.data(), n)).margin(1e-11 * scale));
    }

    auto y1 = y, y2 = y;
    ref.axpy(0.37, x.data(), y1.data(), n);
    vec->axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == Catch::Approx(y1[i]).margin(1e-14));

    auto z1 = y, z2 = y;
    double m1 = ref.axpy_max_abs(-1.5, x.data(), z1.data(), n);
    double m2 = vec->axpy_max_abs(-1.5, x.data(), z2.data(), n);
    CHECK(m2 == Catch::Approx(m1).margin(1e-14));
  }
}

TEST_CASE("kernel lookup by isa", "[simd]") {
  CHECK(simd::kernels_for(simd::Isa::scalar).isa == simd::Isa::scalar);
  CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
  if (!simd::cpu_supports(simd::Isa::neon)) CHECK_THROWS(simd::kernels_for(simd::Isa::neon));
}

TEST_CASE("mass form matches Simpson on products of interpolants", "[simd]") {
  // Oracle: for P1 u, v the product is quadratic per segment, so Simpson is exact.
  const int level = 6;
  const std::size_t n = dyadic_size(level);
  const double h = dyadic_step(level);
  auto u = random_vec(n, 5);
  auto v = random_vec(n, 6);
  double simpson = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double um = 0.5 * (u[i] + u[i + 1]), vm = 0.5 * (v[i] + v[i + 1]);
    simpson += h / 6.0 * (u[i] * v[i] + 4.0 * um * vm + u[i + 1] * v[i + 1]);
  }
  CHECK(grid_inner(u, v, level) == Catch::Approx(simpson).margin(1e-13));
}
