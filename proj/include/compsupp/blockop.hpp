#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "compsupp/errors.hpp"
#include "compsupp/franklin.hpp"
#include "compsupp/pl_function.hpp"

namespace compsupp {

class PathEnsemble;

/// How a scheme was fitted; exported with it.
struct BlockFit {
  std::string statistic;  // "quantile" or "luxemburg"
  std::string norm;       // Young function driving a luxemburg fit
  double q = 0.0;
  double target_decay = 0.0;
  double base = 0.0;                     // the statistic of ||xi||_sup
  std::vector<double> targets;           // tail target used for N(k+1), k = 1..K
  std::vector<double> achieved_tails;    // the statistic of ||xi - F_{N(k+1)} xi||_sup
  std::vector<double> achieved_quantiles;  // the statistic of zeta(k), k = 1..K
  double sum_statistic = 0.0;            // the statistic of sum_k w(k) zeta(k)

  nlohmann::json to_json() const;
  static BlockFit from_json(const nlohmann::json& j);
};

/// Blocks [N(k)+1, N(k+1)], k = 1..K, with weights w(k); index 1 carries w(1).
class BlockScheme {
 public:
  /// N has K+1 entries starting at 1, w has K. Throws InputError otherwise or
  /// when N / w are not strictly increasing, or w is not positive.
  BlockScheme(std::vector<std::size_t> N, std::vector<double> w);

  std::size_t K() const noexcept { return w_.size(); }
  /// N(k) for k = 1..K+1.
  std::size_t N(std::size_t k) const;
  /// w(k) for k = 1..K.
  double w(std::size_t k) const;
  std::span<const std::size_t> N() const noexcept { return N_; }
  std::span<const double> w() const noexcept { return w_; }
  /// N(K+1), the truncation of every operator built on the scheme.
  std::size_t truncation() const noexcept { return N_.back(); }
  /// v(n) for n = 1..N(K+1), stored 0-based.
  const std::vector<double>& v() const noexcept { return v_; }

  std::optional<BlockFit> fit;

  nlohmann::json to_json() const;
  static BlockScheme from_json(const nlohmann::json& j);

 private:
  std::vector<std::size_t> N_;
  std::vector<double> w_;
  std::vector<double> v_;
};

std::vector<double> v_weights(const BlockScheme& scheme);

/// The scheme cut at truncation T: blocks ending before T are kept, the block
/// containing T is shortened to end there. Throws InputError for T < 2.
BlockScheme truncate_scheme(const BlockScheme& scheme, std::size_t T);

/// Thrown when the basis runs out before the next block target is met.
class PartialSchemeError : public ConstructionError {
 public:
  PartialSchemeError(const std::string& what, std::vector<std::size_t> N, std::vector<double> achieved_tails,
                     double next_target, double best_tail)
      : ConstructionError(what, best_tail),
        N_(std::move(N)),
        achieved_(std::move(achieved_tails)),
        next_target_(next_target) {}

  const std::vector<std::size_t>& blocks() const noexcept { return N_; }
  const std::vector<double>& achieved_tails() const noexcept { return achieved_; }
  double next_target() const noexcept { return next_target_; }
  nlohmann::json progress() const;

 private:
  std::vector<std::size_t> N_;
  std::vector<double> achieved_;
  double next_target_;
};

/// Q_k[f] for k = 1..K on the basis grid; k = 0 gives f_1 phi_1.
PLFunction block_project(const CoefficientVector& c, const FranklinBasis& basis, const BlockScheme& scheme,
                         std::size_t k);

/// Per-path zeta(k) = ||Q_k xi||_sup, k = 1..K, row-major M x K.
struct BlockNorms {
  std::size_t paths = 0;
  std::size_t blocks = 0;
  std::vector<double> zeta;

  double at(std::size_t i, std::size_t k) const { return zeta[i * blocks + (k - 1)]; }
  /// sum_k w(k) zeta_i(k) per path.
  std::vector<double> weighted_sums(const BlockScheme& scheme) const;
  /// zeta(k) over all paths.
  std::vector<double> block(std::size_t k) const;
};

BlockNorms block_norms(const PathEnsemble& ens, const FranklinBasis& basis, const BlockScheme& scheme,
                       std::size_t threads = 1);

/// ||xi - F_m xi||_sup for m = 0..n, stored by m (column) then path.
struct TailMatrix {
  std::size_t paths = 0;
  std::size_t terms = 0;  // n; there are n + 1 columns
  std::vector<double> data;

  std::span<const double> column(std::size_t m) const { return {data.data() + m * paths, paths}; }
};

TailMatrix tail_matrix(const PathEnsemble& ens, const GridFrame& frame, std::size_t threads = 1);

/// Greedy block growth shared by the support and moment fits. `within(m, thr)`
/// answers whether the tail statistic at truncation m is <= thr. Block 1 is
/// {1}; N(s+1) is the smallest m > N(s) with statistic <= 0.5 decay^s base, and
/// once a tail is numerically zero (<= 1e-12 base) one closing block runs to
/// n_max. Throws PartialSchemeError when no m <= n_max qualifies.
struct BlockGrowth {
  std::vector<std::size_t> N;
  std::vector<double> targets;
};

BlockGrowth grow_blocks(std::size_t n_max, double base, double decay,
                        const std::function<bool(std::size_t, double)>& within,
                        const std::function<double(std::size_t)>& statistic);

/// Fits (N, w) on an ensemble: tail quantile targets relative to the
/// q-quantile of ||xi||_sup, w(k) = decay^{-(k-1)/2}.
BlockScheme select_blocks(const PathEnsemble& ens, const FranklinBasis& basis, double q, double target_decay,
                          std::size_t threads = 1);

struct BilateralRow {
  std::size_t n = 0;
  double delta = 0.0;
  double v_minus = 0.0;
  double v = 0.0;
  double v_plus = 0.0;
  bool clamped = false;  // a w index fell outside [1, K]
  bool holds = false;
};

struct BilateralReport {
  std::vector<BilateralRow> rows;  // n = 2..N(K+1)
  std::size_t violations = 0;
  std::size_t clamped = 0;

  nlohmann::json to_json() const;
};

/// N^{-1} of the piecewise-linear interpolant through (k, N(k)), clamped to [1, K+1].
double inverse_interpolant(const BlockScheme& scheme, double n);

BilateralReport verify_bilateral(const BlockScheme& scheme);

/// sum_n v(n) f_n phi_n and sum_n f_n phi_n / v(n), n <= N(K+1), on the basis
/// grid. DomainError when N(K+1) exceeds the basis.
PLFunction apply_U_inverse(const PLFunction& f, const FranklinBasis& basis, const BlockScheme& scheme);
PLFunction apply_U(const PLFunction& f, const FranklinBasis& basis, const BlockScheme& scheme);

/// Per-path ||U^{-1} xi||_sup at truncation.
std::vector<double> u_inverse_sup_norms(const PathEnsemble& ens, const FranklinBasis& basis,
                                        const BlockScheme& scheme, std::size_t threads = 1);

struct KernelSample {
  std::vector<double> grid;
  std::vector<double> matrix;  // row-major grid x grid
  std::size_t truncation = 0;

  double at(std::size_t i, std::size_t j) const { return matrix[i * grid.size() + j]; }
};

/// R(t_i, s_j) = sum_{n <= N(K+1)} phi_n(t_i) phi_n(s_j) / v(n).
KernelSample kernel(const FranklinBasis& basis, const BlockScheme& scheme, std::span<const double> grid);

struct KernelReport {
  double max_asymmetry = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::vector<double> eigenvalues;  // ascending, quadrature-weighted
  std::optional<double> apply_discrepancy;
  /// Trapezoid error bound sum_j h_j^3/12 |(R f)''| per row, maximised over
  /// rows; exact when f is linear between grid points.
  std::optional<double> apply_quadrature_bound;

  nlohmann::json to_json() const;
};

/// Asymmetry and spectrum of the trapezoid-weighted symmetrised matrix.
KernelReport kernel_checks(const KernelSample& ks);
/// Also compares apply_U(f) at the grid with sum_j weight_j R(t_i, s_j) f(s_j)
/// (trapezoid weights).
KernelReport kernel_checks(const KernelSample& ks, const FranklinBasis& basis, const BlockScheme& scheme,
                           const PLFunction& f);

/// Holdout check of the support fit.
struct SupportVerification {
  double q = 0.0;
  double fit_quantile = 0.0;      // fitting-set q-quantile of sum_k w(k) zeta(k)
  double holdout_quantile = 0.0;
  double coverage = 0.0;          // share of holdout sums below 2 x fit_quantile
  double finite_fraction = 0.0;   // share of holdout paths with finite ||U^{-1} xi||
  double max_u_inverse = 0.0;
  bool pass = false;              // coverage >= 0.90 and every U^{-1} norm finite

  nlohmann::json to_json() const;
};

SupportVerification verify_support(const PathEnsemble& holdout, const FranklinBasis& basis,
                                   const BlockScheme& scheme, std::size_t threads = 1);

/// CSV: header row `,s_1,...`, then `t_i,R(t_i,s_1),...`.
std::string kernel_csv(const KernelSample& ks);

}  // namespace compsupp
