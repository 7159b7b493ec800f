#include "compsupp/dyadic.hpp"

#include <cmath>
#include <string>

#include "compsupp/errors.hpp"
#include "compsupp/simd/kernels.hpp"

namespace compsupp {

namespace {
void check_level(int level) {
  if (level < 0 || level > kMaxDyadicLevel) {
    throw DomainError("dyadic level out of range: " + std::to_string(level));
  }
}
}  // namespace

std::size_t dyadic_size(int level) {
  check_level(level);
  return (std::size_t{1} << level) + 1;
}

double dyadic_step(int level) {
  check_level(level);
  return std::ldexp(1.0, -level);
}

std::vector<double> dyadic_points(int level) {
  const std::size_t n = dyadic_size(level);
  const double h = dyadic_step(level);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * h;
  return t;
}

std::vector<double> refine(std::span<const double> values, int from_level, int to_level) {
  if (to_level < from_level) throw DomainError("refine: target level is coarser");
  if (values.size() != dyadic_size(from_level)) throw InputError("refine: size/level mismatch");
  std::vector<double> cur(values.begin(), values.end());
  for (int level = from_level; level < to_level; ++level) {
    std::vector<double> next(2 * cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      next[2 * i] = cur[i];
      next[2 * i + 1] = 0.5 * (cur[i] + cur[i + 1]);
    }
    next.back() = cur.back();
    cur = std::move(next);
  }
  return cur;
}

double grid_inner(std::span<const double> u, std::span<const double> v, int level) {
  if (u.size() != v.size() || u.size() != dyadic_size(level)) {
    throw InputError("grid_inner: size/level mismatch");
  }
  return simd::mass_dot(u, v) * dyadic_step(level) / 6.0;
}

std::vector<double> trapezoid_weights(std::span<const double> grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace compsupp
