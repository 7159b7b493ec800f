#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "compsupp/blockop.hpp"
#include "compsupp/processes.hpp"
#include "compsupp/stats.hpp"

namespace compsupp {

/// Path j of the result is n^{-1/2} sum_{i<n} (path j of copy i), summed in copy
/// order. Throws InputError when fewer than n copies are given or grids differ.
PathEnsemble normalized_sum(std::span<const PathEnsemble> copies, std::size_t n);

/// S(n) for every n in n_list, generating copies one at a time (copy c uses
/// substreams (base_seed, c, path)). Same arithmetic as normalized_sum.
std::vector<PathEnsemble> normalized_sums(const GeneratorSpec& spec, std::span<const std::size_t> n_list,
                                          std::size_t M, int depth, std::uint64_t base_seed,
                                          std::size_t threads = 1);

/// Per-path ||x||_sup.
std::vector<double> sup_norms(const PathEnsemble& ens);

struct CltNormEstimate {
  double value = 0.0;  // max over n of the q-quantile of ||S(n)||_sup
  double q = 0.95;
  std::vector<std::size_t> n_list;
  std::vector<double> per_n;

  nlohmann::json to_json() const;
};

CltNormEstimate clt_norm_estimate(const GeneratorSpec& spec, std::span<const std::size_t> n_list, std::size_t M,
                                  int depth, std::uint64_t base_seed, double q = 0.95, std::size_t threads = 1);

struct TailDiagnostic {
  std::vector<double> t;
  std::vector<double> exceedance;
  std::vector<double> value;  // t^2 * exceedance
  /// Over the upper half of the grid the last value stays above half the
  /// maximum: t^2 P(||eta|| > t) is not going to zero.
  bool non_vanishing = false;

  nlohmann::json to_json() const;
};

/// Throws InputError unless t_grid is strictly increasing and positive.
TailDiagnostic tail_diagnostic(std::span<const double> sample, std::span<const double> t_grid);

/// `points` levels geometrically spaced from the sample median to its
/// (1 - 20/M)-quantile.
std::vector<double> auto_tail_grid(std::span<const double> sample, std::size_t points = 8);

struct TightnessRow {
  std::size_t n = 0;
  double median = 0.0;
  double q95 = 0.0;
  double q99 = 0.0;
};

struct CoverageRow {
  std::size_t n = 0;
  double t = 0.0;
  double exceedance = 0.0;
  double bound = 0.0;      // min(1, K_hat / t)
  double tolerance = 0.0;  // 3 sqrt(p (1 - p) / M)
  bool holds = false;
};

struct TightnessReport {
  double K_hat = 0.0;  // max over n of the 0.99-quantile of ||U^{-1} S(n)||_sup (an estimate)
  std::size_t paths = 0;
  std::vector<TightnessRow> per_n;
  std::vector<CoverageRow> coverage;
  bool coverage_holds = false;

  nlohmann::json to_json() const;
  /// `n,t,exceedance,bound`
  std::string coverage_csv() const;
};

/// Throws InputError when fit_seed equals base_seed, n_list is empty or the
/// t grid is not positive.
TightnessReport tightness_harness(const GeneratorSpec& spec, const BlockScheme& scheme, const FranklinBasis& basis,
                                  std::span<const std::size_t> n_list, std::span<const double> t_grid,
                                  std::size_t M, int depth, std::uint64_t base_seed,
                                  std::optional<std::uint64_t> fit_seed = std::nullopt, std::size_t threads = 1);

struct InvarianceResult {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  stats::KsResult ks{};
  bool pass = false;  // p >= 0.01

  nlohmann::json to_json() const;
};

/// KS test between ||S(n_a)||_sup and ||S(n_b)||_sup drawn from the substream
/// families seed_a and seed_b. Gaussian kinds only; identical samples are
/// rejected as degenerate.
InvarianceResult gaussian_invariance_test_seeds(const GeneratorSpec& spec, std::size_t n_a, std::size_t n_b,
                                                std::size_t M, int depth, std::uint64_t seed_a, std::uint64_t seed_b,
                                                std::size_t threads = 1);

/// Same with seed_a, seed_b derived from base_seed by domain separation.
InvarianceResult gaussian_invariance_test(const GeneratorSpec& spec, std::size_t n_a, std::size_t n_b,
                                          std::size_t M, int depth, std::uint64_t base_seed,
                                          std::size_t threads = 1);

}  // namespace compsupp
