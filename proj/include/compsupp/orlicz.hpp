#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "compsupp/blockop.hpp"
#include "compsupp/franklin.hpp"

namespace compsupp {

class PathEnsemble;

enum class YoungFamily { power, power_log, exp_alpha };

/// power(p) = |u|^p, power_log(p, r) = |u|^p (1 + ln(e + |u|))^r,
/// exp_alpha(a) = exp(|u|^a) - 1.
struct YoungFunction {
  YoungFamily family = YoungFamily::power;
  double p = 2.0;
  double r = 0.0;
  double alpha = 1.0;

  static YoungFunction power(double p);
  static YoungFunction power_log(double p, double r);
  static YoungFunction exp_alpha(double alpha);

  /// ln Phi(|u|); -inf at 0. Finite wherever ln Phi is representable, even
  /// when Phi itself overflows.
  double log_eval(double u) const;

  /// Parameter ranges plus a numeric check of convexity and monotonicity on a
  /// log grid. Throws InputError.
  void validate() const;

  std::string name() const;
  nlohmann::json to_json() const;
  /// {family: "power"|"power_log"|"exp_alpha", p?, r?, alpha?}; validates.
  static YoungFunction from_json(const nlohmann::json& j);
};

struct YoungValue {
  double value = 0.0;
  bool saturated = false;  // value clamped to the largest double
};

YoungValue young_eval(const YoungFunction& phi, double u);

struct Delta2Verdict {
  bool analytic = false;
  bool numeric = false;
  double max_ratio = 0.0;  // sup of Phi(2u)/Phi(u) over the grid (capped)
  double cap = 0.0;
  std::optional<double> witness;  // first u where the ratio exceeds the cap

  bool holds() const noexcept { return analytic; }
  bool agree() const noexcept { return analytic == numeric; }
  nlohmann::json to_json() const;
};

/// Analytic verdict per family, cross-checked on u = 10^(k/8), k = -48..120.
Delta2Verdict delta2_check(const YoungFunction& phi, double cap = 1e6);

enum class Verdict { yes, no, inconclusive };
std::string to_string(Verdict v);

struct WeakerVerdict {
  Verdict verdict = Verdict::inconclusive;
  bool analytic = false;
  std::vector<double> lambdas;
  std::vector<double> final_log_ratio;  // ln Psi(lambda u)/Phi(u) at the largest u, per lambda

  nlohmann::json to_json() const;
};

/// Psi << Phi: lim Psi(lambda u)/Phi(u) = 0 for lambda in {1/2, 1, 2, 10}.
WeakerVerdict weaker_than_check(const YoungFunction& psi, const YoungFunction& phi);

/// inf{lambda > 0 : mean Phi(x/lambda) <= 1}; 0 for an all-zero sample.
/// Geometric bisection to relative width 1e-13; the returned value satisfies
/// the inequality. Throws InputError for empty, negative or non-finite samples.
double luxemburg_norm(std::span<const double> sample, const YoungFunction& phi);

/// Whether the Luxemburg norm of the sample is <= threshold, without bisection.
bool luxemburg_within(std::span<const double> sample, const YoungFunction& phi, double threshold);

struct MomentConvergenceRow {
  std::size_t n = 0;
  double mean_phi = 0.0;   // mean Phi(||xi - F_n xi||_sup)
  double luxemburg = 0.0;  // Luxemburg norm of the same residuals
  bool saturated = false;
};

struct MomentConvergenceReport {
  std::vector<MomentConvergenceRow> rows;
  bool means_non_increasing = false;
  bool norms_non_increasing = false;

  nlohmann::json to_json() const;
};

MomentConvergenceReport moment_convergence_report(const PathEnsemble& ens, const FranklinBasis& basis,
                                                  const YoungFunction& phi, std::span<const std::size_t> n_list,
                                                  std::size_t threads = 1);

/// Tail targets 0.5 * 4^-s * base in the Luxemburg norm of phi, base the norm of
/// ||xi||_sup; w(k) = 2^(k-1).
BlockScheme select_moment_blocks(const PathEnsemble& ens, const FranklinBasis& basis, const YoungFunction& phi,
                                 std::size_t threads = 1);

/// sum_n v(n) f_n phi_n; the same operator as apply_U_inverse.
PLFunction apply_V_inverse(const PLFunction& f, const FranklinBasis& basis, const BlockScheme& scheme);

struct MomentBoundReport {
  std::string target;
  double slack = 0.0;
  double norm_xi = 0.0;         // Luxemburg norm of ||xi||_sup
  double norm_v_inverse = 0.0;  // Luxemburg norm of ||V^{-1} xi||_sup
  double ratio = 0.0;
  double chain_bound = 0.0;     // w(1) ||f_1|| + sum_k w(k) ||nu(k)||, all in L(Phi)
  bool chain_holds = false;
  double head_norm = 0.0;
  std::vector<double> nu_norms;  // k = 1..K
  bool pass = false;             // ratio <= 1 + slack

  nlohmann::json to_json() const;
};

MomentBoundReport verify_moment_bound(const PathEnsemble& holdout, const FranklinBasis& basis,
                                      const BlockScheme& scheme, const YoungFunction& target, double slack,
                                      std::size_t threads = 1);

}  // namespace compsupp
