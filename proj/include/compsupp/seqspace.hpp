#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace compsupp {

class PathEnsemble;
class GridFrame;

/// M truncated sequences of common length L, row-major.
class SequenceEnsemble {
 public:
  SequenceEnsemble(std::size_t M, std::size_t L, std::vector<double> data, nlohmann::json seed_info = {});

  std::size_t size() const noexcept { return m_; }
  std::size_t length() const noexcept { return l_; }
  std::span<const double> sample(std::size_t i) const;
  std::span<const double> data() const noexcept { return data_; }
  const nlohmann::json& seed_info() const noexcept { return seed_info_; }

 private:
  std::size_t m_;
  std::size_t l_;
  std::vector<double> data_;
  nlohmann::json seed_info_;
};

/// First L Franklin coefficients of every path. Paths on a coarser grid are
/// refined onto the frame's grid first.
SequenceEnsemble coefficient_ensemble(const PathEnsemble& paths, const GridFrame& frame, std::size_t L,
                                      std::size_t threads = 1);

struct Factorization {
  std::vector<double> eps;       // epsilon_n > 0, n = 1..L
  std::vector<double> envelope;  // e_n, the q-quantile of |xi_n|
  double quantile = 0.5;
  double floor = 1e-12;
  double rho = 0.5;
};

/// e_n = q-quantile of |xi_n|; eps_n = running max from the right of
/// max(sqrt(e_n), floor * rho^n). Throws InputError for q outside (0,1),
/// floor <= 0 or rho outside (0,1).
Factorization factorize(const SequenceEnsemble& ens, double q, double floor, double rho = 0.5);

/// eta = xi / eps per sample.
SequenceEnsemble eta(const SequenceEnsemble& ens, const Factorization& fac);

/// (eps_n x_n); InputError when x is longer than eps.
std::vector<double> diagonal_apply(const Factorization& fac, std::span<const double> x);

struct InverseResult {
  std::vector<double> values;
  double sup_norm = 0.0;  // finite sup certifies membership of the domain
};

InverseResult diagonal_inverse_apply(const Factorization& fac, std::span<const double> x);

struct CompactnessReport {
  std::vector<double> tail;  // T(m) = sup_{n >= m} eps_n, m = 1..L
  double threshold = 0.0;
  double final_tail = 0.0;   // T(L)
  bool pass = false;

  nlohmann::json to_json() const;
};

CompactnessReport compactness_diagnostic(const Factorization& fac, double threshold);

/// Sequence CSV (one row per sample) plus a .json sidecar {M, L, seed_info}.
void write_sequences(const SequenceEnsemble& ens, const std::filesystem::path& csv);
SequenceEnsemble read_sequences(const std::filesystem::path& csv);

/// CSV `n,eps` with n 1-based.
void write_factorization(const Factorization& fac, const std::filesystem::path& csv);

}  // namespace compsupp
