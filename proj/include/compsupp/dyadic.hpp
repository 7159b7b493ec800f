#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace compsupp {

constexpr int kMaxDyadicLevel = 20;

/// Number of nodes 2^level + 1 of the uniform dyadic grid.
std::size_t dyadic_size(int level);
double dyadic_step(int level);
std::vector<double> dyadic_points(int level);

/// Exact refinement of nodal values from one dyadic level to a finer one
/// (inserted midpoints take the average of their neighbours).
std::vector<double> refine(std::span<const double> values, int from_level, int to_level);

/// Exact L2 inner product of two piecewise-linear interpolants on the same
/// uniform dyadic grid (P1 mass matrix, SIMD kernel).
double grid_inner(std::span<const double> u, std::span<const double> v, int level);

/// Trapezoid weights of an arbitrary increasing grid over [grid.front(), grid.back()].
std::vector<double> trapezoid_weights(std::span<const double> grid);

}  // namespace compsupp
