#include "compsupp/blockop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "compsupp/dyadic.hpp"
#include "compsupp/io.hpp"
#include "compsupp/parallel.hpp"
#include "compsupp/processes.hpp"
#include "compsupp/simd/kernels.hpp"
#include "compsupp/stats.hpp"

namespace compsupp {

nlohmann::json BlockFit::to_json() const {
  nlohmann::json j;
  j["statistic"] = statistic;
  if (!norm.empty()) j["norm"] = norm;
  j["q"] = q;
  j["target_decay"] = target_decay;
  j["base"] = base;
  j["targets"] = targets;
  j["achieved_tails"] = achieved_tails;
  j["achieved_quantiles"] = achieved_quantiles;
  j["sum_statistic"] = sum_statistic;
  return j;
}

BlockFit BlockFit::from_json(const nlohmann::json& j) {
  BlockFit f;
  f.statistic = j.value("statistic", std::string("quantile"));
  f.norm = j.value("norm", std::string());
  f.q = j.value("q", 0.0);
  f.target_decay = j.value("target_decay", 0.0);
  f.base = j.value("base", 0.0);
  f.targets = j.value("targets", std::vector<double>{});
  f.achieved_tails = j.value("achieved_tails", std::vector<double>{});
  f.achieved_quantiles = j.value("achieved_quantiles", std::vector<double>{});
  f.sum_statistic = j.value("sum_statistic", 0.0);
  return f;
}

BlockScheme::BlockScheme(std::vector<std::size_t> N, std::vector<double> w) : N_(std::move(N)), w_(std::move(w)) {
  if (N_.size() < 2) throw InputError("block scheme needs at least one block");
  if (N_.front() != 1) throw InputError("block scheme must start at N(1) = 1");
  if (w_.size() + 1 != N_.size()) throw InputError("block scheme needs exactly one weight per block");
  for (std::size_t k = 1; k < N_.size(); ++k) {
    if (N_[k] <= N_[k - 1]) throw InputError("block boundaries N must be strictly increasing");
  }
  for (std::size_t k = 0; k < w_.size(); ++k) {
    if (!(w_[k] > 0.0) || !std::isfinite(w_[k])) throw InputError("block weights must be positive and finite");
    if (k > 0 && !(w_[k] > w_[k - 1])) throw InputError("block weights must be strictly increasing");
  }
  v_.assign(N_.back(), 0.0);
  v_[0] = w_[0];
  for (std::size_t k = 0; k < w_.size(); ++k) {
    for (std::size_t n = N_[k]; n < N_[k + 1]; ++n) v_[n] = w_[k];
  }
}

std::size_t BlockScheme::N(std::size_t k) const {
  if (k == 0 || k > N_.size()) throw DomainError("block boundary index out of range");
  return N_[k - 1];
}

double BlockScheme::w(std::size_t k) const {
  if (k == 0 || k > w_.size()) throw DomainError("block weight index out of range");
  return w_[k - 1];
}

nlohmann::json BlockScheme::to_json() const {
  nlohmann::json j;
  j["N"] = N_;
  j["w"] = w_;
  j["v"] = v_;
  if (fit) j["fit"] = fit->to_json();
  return j;
}

BlockScheme BlockScheme::from_json(const nlohmann::json& j) {
  try {
    BlockScheme s(j.at("N").get<std::vector<std::size_t>>(), j.at("w").get<std::vector<double>>());
    if (j.contains("fit")) s.fit = BlockFit::from_json(j["fit"]);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad block scheme JSON: ") + e.what());
  }
}

std::vector<double> v_weights(const BlockScheme& scheme) { return scheme.v(); }

BlockScheme truncate_scheme(const BlockScheme& scheme, std::size_t T) {
  if (T < 2) throw InputError("truncate_scheme: truncation must be >= 2");
  if (T >= scheme.truncation()) return scheme;
  std::vector<std::size_t> N{1};
  std::vector<double> w;
  for (std::size_t k = 1; k <= scheme.K() && N.back() < T; ++k) {
    N.push_back(std::min(scheme.N(k + 1), T));
    w.push_back(scheme.w(k));
  }
  return BlockScheme(std::move(N), std::move(w));
}

nlohmann::json PartialSchemeError::progress() const {
  return {{"N", N_}, {"achieved_tails", achieved_}, {"next_target", next_target_}, {"best_tail", achieved()}};
}

namespace {

void require_fits(const BlockScheme& scheme, std::size_t available) {
  if (scheme.truncation() > available) {
    throw DomainError("block scheme truncation " + std::to_string(scheme.truncation()) +
                      " exceeds the basis size " + std::to_string(available));
  }
}

int frame_level(const PathEnsemble& ens, const FranklinBasis& basis) {
  return std::max(ens.depth(), basis.grid_depth());
}

PLFunction combine(const FranklinBasis& basis, std::span<const double> coeffs, std::size_t begin, std::size_t end) {
  std::vector<double> acc(basis.grid_size(), 0.0);
  for (std::size_t i = begin; i < end; ++i) simd::axpy(coeffs[i], basis.nodal(i), acc);
  return PLFunction::on_dyadic_grid(basis.grid_depth(), std::move(acc));
}

}  // namespace

PLFunction block_project(const CoefficientVector& c, const FranklinBasis& basis, const BlockScheme& scheme,
                         std::size_t k) {
  if (k > scheme.K()) throw DomainError("block index exceeds K");
  if (k == 0) {
    if (c.size() == 0) throw DomainError("no coefficients");
    return combine(basis, c.values(), 0, 1);
  }
  const std::size_t end = scheme.N(k + 1);
  require_fits(scheme, std::min(basis.size(), c.size()));
  return combine(basis, c.values(), scheme.N(k), end);
}

std::vector<double> BlockNorms::weighted_sums(const BlockScheme& scheme) const {
  if (scheme.K() != blocks) throw InputError("weighted_sums: scheme and norms disagree on K");
  std::vector<double> out(paths, 0.0);
  for (std::size_t i = 0; i < paths; ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k <= blocks; ++k) s += scheme.w(k) * at(i, k);
    out[i] = s;
  }
  return out;
}

std::vector<double> BlockNorms::block(std::size_t k) const {
  if (k == 0 || k > blocks) throw DomainError("block index out of range");
  std::vector<double> out(paths);
  for (std::size_t i = 0; i < paths; ++i) out[i] = at(i, k);
  return out;
}

BlockNorms block_norms(const PathEnsemble& ens, const FranklinBasis& basis, const BlockScheme& scheme,
                       std::size_t threads) {
  require_fits(scheme, basis.size());
  const GridFrame frame(basis, frame_level(ens, basis));
  BlockNorms out;
  out.paths = ens.size();
  out.blocks = scheme.K();
  out.zeta.assign(out.paths * out.blocks, 0.0);
  const std::size_t T = scheme.truncation();
  parallel_for(ens.size(), threads, [&](std::size_t i) {
    const auto x = frame.lift(ens.values(i), ens.depth());
    std::vector<double> c(T);
    frame.analyze(x, c);
    std::vector<double> scratch(frame.grid_size());
    for (std::size_t k = 1; k <= out.blocks; ++k) {
      out.zeta[i * out.blocks + (k - 1)] = frame.range_sup_norm(c, scheme.N(k), scheme.N(k + 1), scratch);
    }
  });
  return out;
}

TailMatrix tail_matrix(const PathEnsemble& ens, const GridFrame& frame, std::size_t threads) {
  if (ens.depth() > frame.level()) throw InputError("tail_matrix: paths finer than the frame grid");
  TailMatrix t;
  t.paths = ens.size();
  t.terms = frame.size();
  t.data.assign((t.terms + 1) * t.paths, 0.0);
  parallel_for(ens.size(), threads, [&](std::size_t i) {
    const auto x = frame.lift(ens.values(i), ens.depth());
    const auto c = frame.analyze(x);
    std::vector<double> tails(t.terms + 1);
    frame.tail_profile(x, c, tails);
    for (std::size_t m = 0; m <= t.terms; ++m) t.data[m * t.paths + i] = tails[m];
  });
  return t;
}

BlockGrowth grow_blocks(std::size_t n_max, double base, double decay,
                        const std::function<bool(std::size_t, double)>& within,
                        const std::function<double(std::size_t)>& statistic) {
  if (n_max < 2) throw InputError("block growth needs a basis of at least 2 functions");
  if (!(decay > 0.0 && decay < 1.0)) throw InputError("target decay must lie in (0,1)");
  if (!(base >= 0.0) || !std::isfinite(base)) throw InputError("block growth base must be finite and >= 0");
  BlockGrowth g;
  g.N.push_back(1);
  const double zero_level = 1e-12 * base;
  while (true) {
    const auto s = static_cast<double>(g.N.size());
    const double target = 0.5 * std::pow(decay, s) * base;
    std::size_t found = 0;
    for (std::size_t m = g.N.back() + 1; m <= n_max; ++m) {
      if (within(m, target)) {
        found = m;
        break;
      }
    }
    if (found == 0) {
      std::vector<double> achieved;
      for (std::size_t k = 1; k < g.N.size(); ++k) achieved.push_back(statistic(g.N[k]));
      const double best = statistic(n_max);
      std::ostringstream msg;
      msg << "basis of " << n_max << " functions exhausted before block " << g.N.size()
          << " met its tail target " << io::format_double(target) << " (best " << io::format_double(best) << ")";
      throw PartialSchemeError(msg.str(), g.N, std::move(achieved), target, best);
    }
    g.N.push_back(found);
    g.targets.push_back(target);
    if (found == n_max) break;
    if (within(found, zero_level)) {
      g.N.push_back(n_max);
      g.targets.push_back(zero_level);
      break;
    }
  }
  return g;
}

BlockScheme select_blocks(const PathEnsemble& ens, const FranklinBasis& basis, double q, double target_decay,
                          std::size_t threads) {
  if (!(q > 0.0 && q < 1.0)) throw InputError("select_blocks: q must lie in (0,1)");
  if (!(target_decay > 0.0 && target_decay < 1.0)) throw InputError("select_blocks: target_decay must lie in (0,1)");
  const GridFrame frame(basis, frame_level(ens, basis));
  const auto tails = tail_matrix(ens, frame, threads);
  std::vector<double> cache(tails.terms + 1, std::numeric_limits<double>::quiet_NaN());
  const auto statistic = [&](std::size_t m) {
    if (std::isnan(cache[m])) cache[m] = stats::quantile(tails.column(m), q);
    return cache[m];
  };
  const double base = statistic(0);
  const auto growth = grow_blocks(
      basis.size(), base, target_decay, [&](std::size_t m, double thr) { return statistic(m) <= thr; }, statistic);

  std::vector<double> w(growth.N.size() - 1);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::pow(target_decay, -0.5 * static_cast<double>(k));
  BlockScheme scheme(growth.N, std::move(w));

  BlockFit fit;
  fit.statistic = "quantile";
  fit.q = q;
  fit.target_decay = target_decay;
  fit.base = base;
  fit.targets = growth.targets;
  const auto norms = block_norms(ens, basis, scheme, threads);
  for (std::size_t k = 1; k <= scheme.K(); ++k) {
    fit.achieved_tails.push_back(statistic(scheme.N(k + 1)));
    fit.achieved_quantiles.push_back(stats::quantile(norms.block(k), q));
  }
  fit.sum_statistic = stats::quantile(norms.weighted_sums(scheme), q);
  scheme.fit = std::move(fit);
  return scheme;
}

double inverse_interpolant(const BlockScheme& scheme, double n) {
  const auto N = scheme.N();
  if (n <= static_cast<double>(N.front())) return 1.0;
  if (n >= static_cast<double>(N.back())) return static_cast<double>(N.size());
  const auto it = std::upper_bound(N.begin(), N.end(), n, [](double x, std::size_t b) {
    return x < static_cast<double>(b);
  });
  const std::size_t k = static_cast<std::size_t>(it - N.begin());  // N[k-1] <= n < N[k]
  const double lo = static_cast<double>(N[k - 1]);
  const double hi = static_cast<double>(N[k]);
  return static_cast<double>(k) + (n - lo) / (hi - lo);
}

BilateralReport verify_bilateral(const BlockScheme& scheme) {
  BilateralReport r;
  const auto K = static_cast<long long>(scheme.K());
  const auto weight = [&](double idx, bool& clamped) {
    auto k = static_cast<long long>(std::floor(idx));
    if (k < 1 || k > K) {
      clamped = true;
      k = std::clamp<long long>(k, 1, K);
    }
    return scheme.w(static_cast<std::size_t>(k));
  };
  for (std::size_t n = 2; n <= scheme.truncation(); ++n) {
    BilateralRow row;
    row.n = n;
    const double a = inverse_interpolant(scheme, static_cast<double>(n) - 1.0);
    const double b = inverse_interpolant(scheme, static_cast<double>(n));
    row.delta = a - (b - 1.0);
    row.v_minus = weight(b - 1.0, row.clamped) * (row.delta - 1.0);
    row.v_plus = weight(std::floor(a) + 1.0, row.clamped) * (row.delta + 1.0);
    row.v = scheme.v()[n - 1];
    row.holds = row.v_minus <= row.v && row.v <= row.v_plus;
    r.violations += row.holds ? 0 : 1;
    r.clamped += row.clamped ? 1 : 0;
    r.rows.push_back(row);
  }
  return r;
}

nlohmann::json BilateralReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"n", row.n},
                         {"delta", row.delta},
                         {"v_minus", row.v_minus},
                         {"v", row.v},
                         {"v_plus", row.v_plus},
                         {"clamped", row.clamped},
                         {"holds", row.holds}});
  }
  return {{"violations", violations}, {"clamped", clamped}, {"rows", rows_json}};
}

PLFunction apply_U_inverse(const PLFunction& f, const FranklinBasis& basis, const BlockScheme& scheme) {
  require_fits(scheme, basis.size());
  auto c = analyze(f, basis);
  std::vector<double> scaled(scheme.truncation());
  for (std::size_t n = 0; n < scaled.size(); ++n) scaled[n] = scheme.v()[n] * c[n];
  return combine(basis, scaled, 0, scaled.size());
}

PLFunction apply_U(const PLFunction& f, const FranklinBasis& basis, const BlockScheme& scheme) {
  require_fits(scheme, basis.size());
  auto c = analyze(f, basis);
  std::vector<double> scaled(scheme.truncation());
  for (std::size_t n = 0; n < scaled.size(); ++n) scaled[n] = c[n] / scheme.v()[n];
  return combine(basis, scaled, 0, scaled.size());
}

std::vector<double> u_inverse_sup_norms(const PathEnsemble& ens, const FranklinBasis& basis,
                                        const BlockScheme& scheme, std::size_t threads) {
  require_fits(scheme, basis.size());
  const GridFrame frame(basis, frame_level(ens, basis));
  std::vector<double> out(ens.size());
  parallel_for(ens.size(), threads, [&](std::size_t i) {
    const auto x = frame.lift(ens.values(i), ens.depth());
    std::vector<double> c(scheme.truncation());
    frame.analyze(x, c);
    std::vector<double> y(frame.grid_size());
    frame.synthesize_weighted(c, scheme.v(), y);
    out[i] = simd::max_abs(y);
  });
  return out;
}

KernelSample kernel(const FranklinBasis& basis, const BlockScheme& scheme, std::span<const double> grid) {
  require_fits(scheme, basis.size());
  if (grid.empty()) throw InputError("kernel grid is empty");
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("kernel grid points must lie in [0,1]");
  }
  const std::size_t G = grid.size();
  const std::size_t T = scheme.truncation();
  // Column n holds phi_n(t_i) / sqrt(v(n)) so R = P P^T.
  std::vector<double> P(T * G);
  for (std::size_t n = 0; n < T; ++n) {
    const auto phi = basis.function(n);
    const double s = 1.0 / std::sqrt(scheme.v()[n]);
    for (std::size_t i = 0; i < G; ++i) P[n * G + i] = phi.eval_unchecked(grid[i]) * s;
  }
  KernelSample ks;
  ks.grid.assign(grid.begin(), grid.end());
  ks.truncation = T;
  ks.matrix.assign(G * G, 0.0);
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t j = 0; j < G; ++j) {
      double acc = 0.0;
      for (std::size_t n = 0; n < T; ++n) acc += P[n * G + i] * P[n * G + j];
      ks.matrix[i * G + j] = acc;
    }
  }
  return ks;
}

KernelReport kernel_checks(const KernelSample& ks) {
  const std::size_t G = ks.grid.size();
  if (G == 0 || ks.matrix.size() != G * G) throw InputError("kernel sample must be a square matrix over its grid");
  for (std::size_t i = 1; i < G; ++i) {
    if (!(ks.grid[i] > ks.grid[i - 1])) throw InputError("kernel grid must be strictly increasing");
  }
  KernelReport r;
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t j = i + 1; j < G; ++j) r.max_asymmetry = std::max(r.max_asymmetry, std::fabs(ks.at(i, j) - ks.at(j, i)));
  }
  const auto wts = G > 1 ? trapezoid_weights(ks.grid) : std::vector<double>{1.0};
  Eigen::MatrixXd A(G, G);
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t j = 0; j < G; ++j) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::sqrt(wts[i] * wts[j]) * 0.5 * (ks.at(i, j) + ks.at(j, i));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConstructionError("kernel eigen-solve did not converge", 0.0);
  const auto& ev = solver.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  r.min_eigenvalue = r.eigenvalues.front();
  r.max_eigenvalue = r.eigenvalues.back();
  return r;
}

KernelReport kernel_checks(const KernelSample& ks, const FranklinBasis& basis, const BlockScheme& scheme,
                           const PLFunction& f) {
  auto r = kernel_checks(ks);
  const std::size_t G = ks.grid.size();
  const auto wts = G > 1 ? trapezoid_weights(ks.grid) : std::vector<double>{1.0};
  const auto u = apply_U(f, basis, scheme);
  std::vector<double> fs(G);
  for (std::size_t j = 0; j < G; ++j) fs[j] = f.eval_unchecked(ks.grid[j]) * wts[j];
  std::vector<double> fslope(G > 1 ? G - 1 : 0);
  for (std::size_t j = 0; j + 1 < G; ++j) {
    fslope[j] = (f.eval_unchecked(ks.grid[j + 1]) - f.eval_unchecked(ks.grid[j])) / (ks.grid[j + 1] - ks.grid[j]);
  }
  double worst = 0.0;
  double bound = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    const double quad = simd::active().dot(ks.matrix.data() + i * G, fs.data(), G);
    worst = std::max(worst, std::fabs(quad - u.eval_unchecked(ks.grid[i])));
    // On a cell where R(t_i, .) and f are linear, (R f)'' = 2 R' f'.
    double row = 0.0;
    for (std::size_t j = 0; j + 1 < G; ++j) {
      const double h = ks.grid[j + 1] - ks.grid[j];
      const double rslope = (ks.at(i, j + 1) - ks.at(i, j)) / h;
      row += h * h * h / 12.0 * std::fabs(2.0 * rslope * fslope[j]);
    }
    bound = std::max(bound, row);
  }
  r.apply_discrepancy = worst;
  r.apply_quadrature_bound = bound;
  return r;
}

nlohmann::json KernelReport::to_json() const {
  nlohmann::json j{{"max_asymmetry", max_asymmetry},
                   {"min_eigenvalue", min_eigenvalue},
                   {"max_eigenvalue", max_eigenvalue}};
  if (apply_discrepancy) j["apply_discrepancy"] = *apply_discrepancy;
  if (apply_quadrature_bound) j["apply_quadrature_bound"] = *apply_quadrature_bound;
  return j;
}

SupportVerification verify_support(const PathEnsemble& holdout, const FranklinBasis& basis,
                                   const BlockScheme& scheme, std::size_t threads) {
  if (!scheme.fit) throw InputError("verify_support needs a fitted scheme");
  SupportVerification v;
  v.q = scheme.fit->q;
  v.fit_quantile = scheme.fit->sum_statistic;
  const auto sums = block_norms(holdout, basis, scheme, threads).weighted_sums(scheme);
  v.holdout_quantile = stats::quantile(sums, v.q);
  std::size_t covered = 0;
  for (double s : sums) covered += s <= 2.0 * v.fit_quantile ? 1 : 0;
  v.coverage = static_cast<double>(covered) / static_cast<double>(sums.size());
  const auto norms = u_inverse_sup_norms(holdout, basis, scheme, threads);
  std::size_t finite = 0;
  for (double x : norms) {
    if (std::isfinite(x)) {
      ++finite;
      v.max_u_inverse = std::max(v.max_u_inverse, x);
    }
  }
  v.finite_fraction = static_cast<double>(finite) / static_cast<double>(norms.size());
  v.pass = v.coverage >= 0.90 && finite == norms.size();
  return v;
}

nlohmann::json SupportVerification::to_json() const {
  return {{"q", q},
          {"fit_quantile", fit_quantile},
          {"holdout_quantile", holdout_quantile},
          {"coverage", coverage},
          {"finite_fraction", finite_fraction},
          {"max_u_inverse", max_u_inverse},
          {"pass", pass}};
}

std::string kernel_csv(const KernelSample& ks) {
  std::ostringstream out;
  for (double s : ks.grid) out << ',' << io::format_double(s);
  out << '\n';
  const std::size_t G = ks.grid.size();
  for (std::size_t i = 0; i < G; ++i) {
    out << io::format_double(ks.grid[i]);
    for (std::size_t j = 0; j < G; ++j) out << ',' << io::format_double(ks.at(i, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace compsupp
