#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "compsupp/pl_function.hpp"

namespace compsupp {

/// Franklin coefficients f_i = <f, phi_i>, i = 1..basis_size (stored 0-based).
class CoefficientVector {
 public:
  CoefficientVector() = default;
  explicit CoefficientVector(std::vector<double> coeffs);

  std::size_t basis_size() const noexcept { return coeffs_.size(); }
  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  std::span<const double> values() const noexcept { return coeffs_; }
  std::span<double> values() noexcept { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// Faber-Schauder function number k (1-based): 1, t, then hats at dyadic
/// levels 1, 2, ... ordered left to right. Returned as nodal values on the
/// dyadic grid of `level`, which must be fine enough to hold it.
std::vector<double> schauder_nodal(std::size_t k, int level);

/// Coarsest dyadic level on which the first n Faber-Schauder functions are
/// piecewise linear.
int schauder_level(std::size_t n);

/// Orthonormal Franklin system phi_1..phi_n: modified Gram-Schmidt (plus one
/// re-orthogonalisation sweep) of the Faber-Schauder system under the exact
/// L2 inner product. Every phi_k is stored as nodal values on one common
/// dyadic grid.
class FranklinBasis {
 public:
  /// Throws InputError for n == 0 or tolerance <= 0, ConstructionError when the
  /// measured Gram defect exceeds the tolerance.
  static FranklinBasis build(std::size_t n, double tolerance);

  std::size_t size() const noexcept { return n_; }
  int grid_depth() const noexcept { return level_; }
  std::size_t grid_size() const noexcept { return grid_size_; }
  double gram_defect() const noexcept { return gram_defect_; }
  double tolerance() const noexcept { return tolerance_; }

  /// Nodal values of phi_{i+1} on the basis grid.
  std::span<const double> nodal(std::size_t i) const;
  /// phi_{i+1} as a PLFunction.
  PLFunction function(std::size_t i) const;

  /// max_{i,j} |<phi_i, phi_j> - delta_ij|, recomputed with the given kernels.
  double measure_gram_defect() const;

 private:
  FranklinBasis() = default;

  std::size_t n_ = 0;
  int level_ = 0;
  std::size_t grid_size_ = 0;
  double gram_defect_ = 0.0;
  double tolerance_ = 0.0;
  std::vector<double> rows_;  // n_ x grid_size_
};

inline FranklinBasis build_franklin_basis(std::size_t n, double tolerance) {
  return FranklinBasis::build(n, tolerance);
}

/// Exact Franklin coefficients of f against every basis function.
CoefficientVector analyze(const PLFunction& f, const FranklinBasis& basis);

/// F_n[f] = sum_{i<=n} c_i phi_i, on the basis grid. Throws DomainError when n
/// exceeds the basis size or the coefficient count.
PLFunction partial_sum(const CoefficientVector& c, const FranklinBasis& basis, std::size_t n);

/// max over probes f and n <= basis size of ||F_n f||_sup / ||f||_sup.
/// Throws InputError for an empty probe set or a probe with zero sup norm.
double estimate_franklin_constant(const FranklinBasis& basis, std::span<const PLFunction> probes);

/// Probe family for the Franklin constant: all Faber-Schauder hats up to
/// `hat_level`, the monomials t^0..t^3, |2t-1|, steep ramps and square waves
/// of frequency up to 2^hat_level, all sampled at `level`.
std::vector<PLFunction> default_franklin_probes(int hat_level, int level);

/// The basis resampled (exactly) on a dyadic grid at least as fine as its own,
/// with mass-weighted duals so that coefficients of grid data are plain dot
/// products. This is the fast path for ensembles of paths.
class GridFrame {
 public:
  GridFrame(const FranklinBasis& basis, int level);

  int level() const noexcept { return level_; }
  std::size_t grid_size() const noexcept { return grid_size_; }
  std::size_t size() const noexcept { return n_; }
  double gram_defect() const noexcept { return gram_defect_; }

  std::span<const double> phi(std::size_t i) const;
  std::span<const double> dual(std::size_t i) const;

  /// Nodal values given on a coarser-or-equal dyadic grid, refined to this one.
  std::vector<double> lift(std::span<const double> values, int from_level) const;

  /// coeffs[i] = <x, phi_{i+1}> for i < coeffs.size(); x on this grid.
  void analyze(std::span<const double> x, std::span<double> coeffs) const;
  std::vector<double> analyze(std::span<const double> x) const;

  /// out = sum_i coeffs[i] * phi_{i+1} over i < coeffs.size().
  void synthesize(std::span<const double> coeffs, std::span<double> out) const;

  /// out = sum_i weights[i] * coeffs[i] * phi_{i+1} over i < coeffs.size().
  void synthesize_weighted(std::span<const double> coeffs, std::span<const double> weights,
                           std::span<double> out) const;

  /// tails[m] = ||x - F_m x||_sup for m = 0..coeffs.size().
  void tail_profile(std::span<const double> x, std::span<const double> coeffs,
                    std::span<double> tails) const;

  /// sup norm of sum_{i in [begin,end)} coeffs[i] phi_{i+1}; `scratch` has grid_size entries.
  double range_sup_norm(std::span<const double> coeffs, std::size_t begin, std::size_t end,
                        std::span<double> scratch) const;

 private:
  std::size_t n_ = 0;
  int level_ = 0;
  std::size_t grid_size_ = 0;
  double gram_defect_ = 0.0;
  std::vector<double> phi_;
  std::vector<double> dual_;
};

/// Nodal values -> P1 mass-matrix product on a uniform dyadic grid.
std::vector<double> mass_apply(std::span<const double> u, int level);

}  // namespace compsupp
