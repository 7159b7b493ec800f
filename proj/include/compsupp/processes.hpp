#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "compsupp/pl_function.hpp"

namespace compsupp {

enum class GeneratorKind { zero, brownian, bridge, ou, smooth_fourier, scaled_heavy };

std::string to_string(GeneratorKind kind);
/// Throws InputError for an unknown name.
GeneratorKind parse_generator_kind(const std::string& name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::brownian;
  double theta = 1.0;       // ou mean reversion
  double sigma = 1.0;       // ou volatility
  double decay = 1.0;       // smooth_fourier coefficient decay j^-decay
  double tail_index = 1.5;  // scaled_heavy Pareto index
  GeneratorKind base = GeneratorKind::brownian;  // scaled_heavy base process

  /// Throws InputError when a parameter is outside its range.
  void validate() const;
  /// Every path is a centred Gaussian process (scaled_heavy is not).
  bool is_gaussian() const;

  nlohmann::json to_json() const;
  /// Accepts {"kind": ..., params...}; missing params keep their defaults.
  static GeneratorSpec from_json(const nlohmann::json& j);

  static GeneratorSpec zero() { return {GeneratorKind::zero}; }
  static GeneratorSpec brownian() { return {GeneratorKind::brownian}; }
  static GeneratorSpec bridge() { return {GeneratorKind::bridge}; }
  static GeneratorSpec ou(double theta, double sigma);
  static GeneratorSpec smooth_fourier(double decay);
  static GeneratorSpec scaled_heavy(GeneratorKind base, double tail_index);
};

constexpr int kMaxGenerationDepth = 16;

/// M paths sampled on the dyadic grid of one depth, row-major.
class PathEnsemble {
 public:
  PathEnsemble(GeneratorSpec spec, int depth, std::uint64_t base_seed, std::size_t paths,
               std::vector<double> values);

  std::size_t size() const noexcept { return paths_; }
  int depth() const noexcept { return depth_; }
  std::size_t grid_size() const noexcept { return grid_size_; }
  const GeneratorSpec& spec() const noexcept { return spec_; }
  std::uint64_t base_seed() const noexcept { return base_seed_; }

  std::span<const double> values(std::size_t i) const;
  std::span<double> values(std::size_t i);
  std::span<const double> data() const noexcept { return data_; }
  PLFunction path(std::size_t i) const;
  /// Values of every path at grid node `node`.
  std::vector<double> column(std::size_t node) const;

  nlohmann::json sidecar() const;

 private:
  GeneratorSpec spec_;
  int depth_ = 0;
  std::uint64_t base_seed_ = 0;
  std::size_t paths_ = 0;
  std::size_t grid_size_ = 0;
  std::vector<double> data_;
};

/// Seed of the substream for (base_seed, copy, path); a pure function of its
/// arguments (SplitMix64 finaliser chain).
std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t copy, std::uint64_t path);

/// Throws InputError for invalid spec, M == 0 or depth outside [1, 16].
PathEnsemble generate(const GeneratorSpec& spec, std::size_t M, int depth, std::uint64_t base_seed,
                      std::size_t threads = 1);

/// Copy c uses substreams (base_seed, c, path); copy 0 equals generate().
std::vector<PathEnsemble> iid_copies(const GeneratorSpec& spec, std::size_t n, std::size_t M, int depth,
                                     std::uint64_t base_seed, std::size_t threads = 1);

/// Copy number `copy` alone.
PathEnsemble generate_copy(const GeneratorSpec& spec, std::size_t copy, std::size_t M, int depth,
                           std::uint64_t base_seed, std::size_t threads = 1);

/// CSV (one row per path) plus a JSON sidecar with the extension swapped to .json.
void write_ensemble(const PathEnsemble& ens, const std::filesystem::path& csv);
PathEnsemble read_ensemble(const std::filesystem::path& csv);

}  // namespace compsupp
