#include "compsupp/clt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "compsupp/errors.hpp"
#include "compsupp/io.hpp"
#include "compsupp/simd/kernels.hpp"

namespace compsupp {

namespace {

void add_into(std::vector<double>& acc, const PathEnsemble& e) {
  const auto d = e.data();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
}

PathEnsemble scaled(const PathEnsemble& like, std::vector<double> sum, std::size_t n) {
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : sum) x *= s;
  return PathEnsemble(like.spec(), like.depth(), like.base_seed(), like.size(), std::move(sum));
}

std::vector<std::size_t> sorted_n_list(std::span<const std::size_t> n_list) {
  if (n_list.empty()) throw InputError("n_list must not be empty");
  std::vector<std::size_t> ns(n_list.begin(), n_list.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.front() == 0) throw InputError("n_list entries must be >= 1");
  return ns;
}

}  // namespace

PathEnsemble normalized_sum(std::span<const PathEnsemble> copies, std::size_t n) {
  if (n == 0 || copies.size() < n) throw InputError("normalized_sum needs n >= 1 copies");
  const auto& first = copies.front();
  std::vector<double> acc(first.data().size(), 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    if (copies[c].depth() != first.depth() || copies[c].size() != first.size()) {
      throw InputError("normalized_sum: copies differ in grid or path count");
    }
    add_into(acc, copies[c]);
  }
  return scaled(first, std::move(acc), n);
}

std::vector<PathEnsemble> normalized_sums(const GeneratorSpec& spec, std::span<const std::size_t> n_list,
                                          std::size_t M, int depth, std::uint64_t base_seed,
                                          std::size_t threads) {
  const auto ns = sorted_n_list(n_list);
  std::vector<PathEnsemble> out;
  std::vector<double> acc;
  std::size_t next = 0;
  for (std::size_t c = 0; c < ns.back(); ++c) {
    const auto copy = generate_copy(spec, c, M, depth, base_seed, threads);
    if (acc.empty()) acc.assign(copy.data().size(), 0.0);
    add_into(acc, copy);
    if (c + 1 == ns[next]) {
      out.push_back(scaled(copy, acc, c + 1));
      ++next;
    }
  }
  return out;
}

std::vector<double> sup_norms(const PathEnsemble& ens) {
  std::vector<double> out(ens.size());
  for (std::size_t i = 0; i < ens.size(); ++i) out[i] = simd::max_abs(ens.values(i));
  return out;
}

CltNormEstimate clt_norm_estimate(const GeneratorSpec& spec, std::span<const std::size_t> n_list, std::size_t M,
                                  int depth, std::uint64_t base_seed, double q, std::size_t threads) {
  if (!(q > 0.0 && q < 1.0)) throw InputError("clt_norm_estimate: q must lie in (0,1)");
  CltNormEstimate est;
  est.q = q;
  est.n_list = sorted_n_list(n_list);
  const auto sums = normalized_sums(spec, est.n_list, M, depth, base_seed, threads);
  for (const auto& s : sums) {
    est.per_n.push_back(stats::quantile(sup_norms(s), q));
    est.value = std::max(est.value, est.per_n.back());
  }
  return est;
}

nlohmann::json CltNormEstimate::to_json() const {
  return {{"estimate", value}, {"q", q}, {"n", n_list}, {"per_n", per_n},
          {"note", "truncated quantile proxy: max over the listed n only"}};
}

TailDiagnostic tail_diagnostic(std::span<const double> sample, std::span<const double> t_grid) {
  if (sample.empty()) throw InputError("tail_diagnostic needs a nonempty sample");
  if (t_grid.empty()) throw InputError("tail_diagnostic needs a nonempty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw InputError("t grid must be positive and strictly increasing");
    }
  }
  TailDiagnostic d;
  d.t.assign(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    const double e = stats::exceedance(sample, t);
    d.exceedance.push_back(e);
    d.value.push_back(t * t * e);
  }
  const std::size_t start = d.value.size() / 2;
  const double peak = *std::max_element(d.value.begin() + static_cast<std::ptrdiff_t>(start), d.value.end());
  d.non_vanishing = peak > 0.0 && d.value.back() > 0.5 * peak;
  return d;
}

std::vector<double> auto_tail_grid(std::span<const double> sample, std::size_t points) {
  if (sample.empty() || points < 2) throw InputError("auto_tail_grid needs a sample and >= 2 points");
  const double M = static_cast<double>(sample.size());
  const double lo = stats::quantile(sample, 0.5);
  const double hi = stats::quantile(sample, std::clamp(1.0 - 20.0 / M, 0.5, 1.0));
  if (!(lo > 0.0) || !(hi > lo)) throw InputError("auto_tail_grid: sample has no spread above its median");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return grid;
}

nlohmann::json TailDiagnostic::to_json() const {
  return {{"t", t}, {"exceedance", exceedance}, {"t2_exceedance", value}, {"non_vanishing", non_vanishing}};
}

TightnessReport tightness_harness(const GeneratorSpec& spec, const BlockScheme& scheme, const FranklinBasis& basis,
                                  std::span<const std::size_t> n_list, std::span<const double> t_grid,
                                  std::size_t M, int depth, std::uint64_t base_seed,
                                  std::optional<std::uint64_t> fit_seed, std::size_t threads) {
  if (fit_seed && *fit_seed == base_seed) {
    throw InputError("harness seed must differ from the scheme-fitting seed");
  }
  if (t_grid.empty()) throw InputError("tightness harness needs a t grid");
  for (double t : t_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("t grid values must be positive");
  }
  const auto ns = sorted_n_list(n_list);
  const auto sums = normalized_sums(spec, ns, M, depth, base_seed, threads);

  TightnessReport rep;
  rep.paths = M;
  std::vector<std::vector<double>> norms;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    norms.push_back(u_inverse_sup_norms(sums[j], basis, scheme, threads));
    TightnessRow row;
    row.n = ns[j];
    row.median = stats::quantile(norms.back(), 0.5);
    row.q95 = stats::quantile(norms.back(), 0.95);
    row.q99 = stats::quantile(norms.back(), 0.99);
    rep.K_hat = std::max(rep.K_hat, row.q99);
    rep.per_n.push_back(row);
  }
  rep.coverage_holds = true;
  const double Md = static_cast<double>(M);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (double t : t_grid) {
      CoverageRow c;
      c.n = ns[j];
      c.t = t;
      c.exceedance = stats::exceedance(norms[j], t);
      c.bound = std::min(1.0, rep.K_hat / t);
      c.tolerance = 3.0 * std::sqrt(c.exceedance * (1.0 - c.exceedance) / Md);
      c.holds = c.exceedance <= c.bound + c.tolerance;
      rep.coverage_holds = rep.coverage_holds && c.holds;
      rep.coverage.push_back(c);
    }
  }
  return rep;
}

nlohmann::json TightnessReport::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& r : per_n) per.push_back({{"n", r.n}, {"median", r.median}, {"q95", r.q95}, {"q99", r.q99}});
  nlohmann::json cov = nlohmann::json::array();
  for (const auto& c : coverage) {
    cov.push_back({{"n", c.n},
                   {"t", c.t},
                   {"exceedance", c.exceedance},
                   {"bound", c.bound},
                   {"tolerance", c.tolerance},
                   {"holds", c.holds}});
  }
  return {{"K_hat", K_hat},
          {"K_hat_note", "estimate: max over listed n of the 0.99-quantile, not a certified sup"},
          {"paths", paths},
          {"per_n", per},
          {"coverage", cov},
          {"coverage_holds", coverage_holds}};
}

std::string TightnessReport::coverage_csv() const {
  std::ostringstream out;
  out << "n,t,exceedance,bound\n";
  for (const auto& c : coverage) {
    const double row[4] = {static_cast<double>(c.n), c.t, c.exceedance, c.bound};
    io::write_csv_row(out, row);
  }
  return out.str();
}

InvarianceResult gaussian_invariance_test_seeds(const GeneratorSpec& spec, std::size_t n_a, std::size_t n_b,
                                                std::size_t M, int depth, std::uint64_t seed_a, std::uint64_t seed_b,
                                                std::size_t threads) {
  if (!spec.is_gaussian()) throw InputError("gaussian_invariance_test needs a Gaussian generator");
  if (n_a == 0 || n_b == 0) throw InputError("gaussian_invariance_test needs n >= 1");
  const std::size_t na[1] = {n_a};
  const std::size_t nb[1] = {n_b};
  const auto a = sup_norms(normalized_sums(spec, na, M, depth, seed_a, threads).front());
  const auto b = sup_norms(normalized_sums(spec, nb, M, depth, seed_b, threads).front());
  if (a == b) throw InputError("gaussian_invariance_test: identical samples (substreams are not disjoint)");
  InvarianceResult r;
  r.n_a = n_a;
  r.n_b = n_b;
  r.ks = stats::ks_two_sample(a, b);
  r.pass = r.ks.p_value >= 0.01;
  return r;
}

InvarianceResult gaussian_invariance_test(const GeneratorSpec& spec, std::size_t n_a, std::size_t n_b,
                                          std::size_t M, int depth, std::uint64_t base_seed,
                                          std::size_t threads) {
  return gaussian_invariance_test_seeds(spec, n_a, n_b, M, depth, stream_seed(base_seed, 0x41, 0),
                                        stream_seed(base_seed, 0x42, 0), threads);
}

nlohmann::json InvarianceResult::to_json() const {
  return {{"n_a", n_a}, {"n_b", n_b}, {"ks_statistic", ks.statistic}, {"p_value", ks.p_value}, {"pass", pass}};
}

}  // namespace compsupp
