#include "compsupp/franklin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "compsupp/dyadic.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/io.hpp"
#include "compsupp/simd/kernels.hpp"

namespace compsupp {

CoefficientVector::CoefficientVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InputError("CoefficientVector entries must be finite");
  }
}

namespace {

// Level j >= 1 and position i of hat number m >= 1 (hats counted from k = 3).
std::pair<int, std::size_t> hat_position(std::size_t m) {
  const int j = static_cast<int>(std::bit_width(m));  // floor(log2 m) + 1
  const std::size_t i = m - (std::size_t{1} << (j - 1));
  return {j, i};
}

}  // namespace

int schauder_level(std::size_t n) {
  if (n <= 2) return 0;
  return hat_position(n - 2).first;
}

std::vector<double> schauder_nodal(std::size_t k, int level) {
  if (k == 0) throw DomainError("Faber-Schauder functions are numbered from 1");
  if (schauder_level(k) > level) throw DomainError("grid too coarse for Faber-Schauder function");
  const std::size_t g = dyadic_size(level);
  const double h = dyadic_step(level);
  std::vector<double> v(g);
  if (k == 1) {
    std::fill(v.begin(), v.end(), 1.0);
    return v;
  }
  if (k == 2) {
    for (std::size_t i = 0; i < g; ++i) v[i] = static_cast<double>(i) * h;
    return v;
  }
  const auto [j, pos] = hat_position(k - 2);
  const double width = std::ldexp(1.0, -j);
  const double centre = static_cast<double>(2 * pos + 1) * width;
  for (std::size_t i = 0; i < g; ++i) {
    const double t = static_cast<double>(i) * h;
    v[i] = std::max(0.0, 1.0 - std::fabs(t - centre) / width);
  }
  return v;
}

std::vector<double> mass_apply(std::span<const double> u, int level) {
  const std::size_t g = u.size();
  if (g != dyadic_size(level)) throw InputError("mass_apply: size/level mismatch");
  const double c = dyadic_step(level) / 6.0;
  std::vector<double> out(g);
  out[0] = c * (2.0 * u[0] + u[1]);
  for (std::size_t i = 1; i + 1 < g; ++i) out[i] = c * (u[i - 1] + 4.0 * u[i] + u[i + 1]);
  out[g - 1] = c * (u[g - 2] + 2.0 * u[g - 1]);
  return out;
}

FranklinBasis FranklinBasis::build(std::size_t n, double tolerance) {
  if (n == 0) throw InputError("Franklin basis size must be >= 1");
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw InputError("Franklin basis tolerance must be a positive number");
  }
  FranklinBasis b;
  b.n_ = n;
  b.level_ = schauder_level(n);
  b.grid_size_ = dyadic_size(b.level_);
  b.tolerance_ = tolerance;
  const std::size_t g = b.grid_size_;
  b.rows_.assign(n * g, 0.0);
  std::vector<double> duals(n * g, 0.0);

  const auto row = [&](std::size_t i) { return std::span<double>(b.rows_.data() + i * g, g); };
  const auto dual = [&](std::size_t i) { return std::span<double>(duals.data() + i * g, g); };

  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v = schauder_nodal(k + 1, b.level_);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < k; ++i) {
        const double c = simd::dot(dual(i), v);
        simd::axpy(-c, row(i), v);
      }
    }
    const double norm2 = grid_inner(v, v, b.level_);
    if (!(norm2 > 0.0)) {
      throw ConstructionError("Faber-Schauder function " + std::to_string(k + 1) +
                                  " is numerically dependent on its predecessors",
                              std::numeric_limits<double>::infinity());
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    std::copy(v.begin(), v.end(), row(k).begin());
    const auto mv = mass_apply(v, b.level_);
    std::copy(mv.begin(), mv.end(), dual(k).begin());
  }

  b.gram_defect_ = b.measure_gram_defect();
  if (!(b.gram_defect_ <= tolerance)) {
    throw ConstructionError("Franklin basis Gram defect " + io::format_double(b.gram_defect_) +
                                " exceeds tolerance " + io::format_double(tolerance),
                            b.gram_defect_);
  }
  return b;
}

std::span<const double> FranklinBasis::nodal(std::size_t i) const {
  if (i >= n_) throw DomainError("Franklin basis index out of range");
  return {rows_.data() + i * grid_size_, grid_size_};
}

PLFunction FranklinBasis::function(std::size_t i) const {
  const auto r = nodal(i);
  return PLFunction::on_dyadic_grid(level_, std::vector<double>(r.begin(), r.end()));
}

double FranklinBasis::measure_gram_defect() const {
  const std::size_t g = grid_size_;
  std::vector<std::vector<double>> duals(n_);
  for (std::size_t i = 0; i < n_; ++i) duals[i] = mass_apply(nodal(i), level_);
  double defect = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double ip = simd::active().dot(rows_.data() + i * g, duals[j].data(), g);
      defect = std::max(defect, std::fabs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  return defect;
}

CoefficientVector analyze(const PLFunction& f, const FranklinBasis& basis) {
  const int level = basis.grid_depth();
  const std::size_t g = basis.grid_size();
  const double h = dyadic_step(level);
  const auto grid = dyadic_points(level);
  const auto t = merge_breakpoints(f.breakpoints(), grid);
  const auto fv = f.sample(t);

  // Mass-weighted f on the merged grid, then folded onto the basis grid through
  // the (exact) linear interpolation of each phi_k at the merged points.
  std::vector<double> folded(g, 0.0);
  const auto deposit = [&](double x, double weight) {
    const double pos = x / h;
    auto cell = static_cast<std::size_t>(std::floor(pos));
    if (cell >= g - 1) cell = g - 2;
    const double s = pos - static_cast<double>(cell);
    folded[cell] += (1.0 - s) * weight;
    folded[cell + 1] += s * weight;
  };
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    const double len = t[j + 1] - t[j];
    deposit(t[j], len / 6.0 * (2.0 * fv[j] + fv[j + 1]));
    deposit(t[j + 1], len / 6.0 * (fv[j] + 2.0 * fv[j + 1]));
  }

  std::vector<double> c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) c[k] = simd::dot(basis.nodal(k), folded);
  return CoefficientVector(std::move(c));
}

PLFunction partial_sum(const CoefficientVector& c, const FranklinBasis& basis, std::size_t n) {
  if (n > basis.size() || n > c.size()) {
    throw DomainError("partial_sum: n = " + std::to_string(n) + " exceeds basis or coefficient count");
  }
  std::vector<double> acc(basis.grid_size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) simd::axpy(c[i], basis.nodal(i), acc);
  return PLFunction::on_dyadic_grid(basis.grid_depth(), std::move(acc));
}

double estimate_franklin_constant(const FranklinBasis& basis, std::span<const PLFunction> probes) {
  if (probes.empty()) throw InputError("Franklin constant needs at least one probe");
  double best = 0.0;
  std::vector<double> acc(basis.grid_size());
  for (const auto& f : probes) {
    const double fnorm = pl_sup_norm(f);
    if (!(fnorm > 0.0)) throw InputError("Franklin constant probe has zero sup norm");
    const auto c = analyze(f, basis);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t m = 0; m < basis.size(); ++m) {
      best = std::max(best, simd::axpy_max_abs(c[m], basis.nodal(m), acc) / fnorm);
    }
  }
  return best;
}

std::vector<PLFunction> default_franklin_probes(int hat_level, int level) {
  if (hat_level > level) throw DomainError("probe hats need a grid at least as fine");
  std::vector<PLFunction> probes;
  const std::size_t hats = (std::size_t{1} << hat_level) + 1;
  for (std::size_t k = 3; k <= hats; ++k) {
    probes.push_back(PLFunction::on_dyadic_grid(level, schauder_nodal(k, level)));
  }
  for (int p = 0; p <= 3; ++p) {
    probes.push_back(PLFunction::interpolate([p](double t) { return std::pow(t, p); }, level));
  }
  probes.push_back(PLFunction::interpolate([](double t) { return std::fabs(2.0 * t - 1.0); }, level));
  // Steep ramps and square waves: near-jumps are where projections overshoot.
  const double h = dyadic_step(level);
  for (double at : {1.0 / 3.0, 0.5, 0.7}) {
    probes.push_back(PLFunction::interpolate(
        [at, h](double t) { return std::clamp((t - at) / h, -1.0, 1.0); }, level));
  }
  for (int j = 1; j <= hat_level; ++j) {
    const double freq = std::ldexp(1.0, j);
    probes.push_back(PLFunction::interpolate(
        [freq](double t) { return std::fmod(std::floor(t * freq), 2.0) == 0.0 ? 1.0 : -1.0; }, level));
  }
  return probes;
}

GridFrame::GridFrame(const FranklinBasis& basis, int level)
    : n_(basis.size()), level_(level), gram_defect_(basis.gram_defect()) {
  if (level < basis.grid_depth()) throw DomainError("GridFrame level is coarser than the basis grid");
  grid_size_ = dyadic_size(level);
  phi_.resize(n_ * grid_size_);
  dual_.resize(n_ * grid_size_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto fine = refine(basis.nodal(i), basis.grid_depth(), level);
    const auto mf = mass_apply(fine, level);
    std::copy(fine.begin(), fine.end(), phi_.begin() + static_cast<std::ptrdiff_t>(i * grid_size_));
    std::copy(mf.begin(), mf.end(), dual_.begin() + static_cast<std::ptrdiff_t>(i * grid_size_));
  }
}

std::span<const double> GridFrame::phi(std::size_t i) const {
  return {phi_.data() + i * grid_size_, grid_size_};
}

std::span<const double> GridFrame::dual(std::size_t i) const {
  return {dual_.data() + i * grid_size_, grid_size_};
}

std::vector<double> GridFrame::lift(std::span<const double> values, int from_level) const {
  return refine(values, from_level, level_);
}

void GridFrame::analyze(std::span<const double> x, std::span<double> coeffs) const {
  if (x.size() != grid_size_) throw InputError("GridFrame::analyze: grid size mismatch");
  if (coeffs.size() > n_) throw DomainError("GridFrame::analyze: too many coefficients requested");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = simd::dot(dual(i), x);
}

std::vector<double> GridFrame::analyze(std::span<const double> x) const {
  std::vector<double> c(n_);
  analyze(x, c);
  return c;
}

void GridFrame::synthesize(std::span<const double> coeffs, std::span<double> out) const {
  if (out.size() != grid_size_) throw InputError("GridFrame::synthesize: grid size mismatch");
  if (coeffs.size() > n_) throw DomainError("GridFrame::synthesize: too many coefficients");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) simd::axpy(coeffs[i], phi(i), out);
}

void GridFrame::synthesize_weighted(std::span<const double> coeffs, std::span<const double> weights,
                                    std::span<double> out) const {
  if (weights.size() < coeffs.size()) throw InputError("synthesize_weighted: too few weights");
  if (out.size() != grid_size_) throw InputError("GridFrame::synthesize: grid size mismatch");
  if (coeffs.size() > n_) throw DomainError("GridFrame::synthesize: too many coefficients");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) simd::axpy(weights[i] * coeffs[i], phi(i), out);
}

void GridFrame::tail_profile(std::span<const double> x, std::span<const double> coeffs,
                             std::span<double> tails) const {
  if (tails.size() != coeffs.size() + 1) throw InputError("tail_profile: tails needs coeffs+1 slots");
  if (coeffs.size() > n_) throw DomainError("tail_profile: too many coefficients");
  std::vector<double> r(x.begin(), x.end());
  tails[0] = simd::max_abs(r);
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    tails[m + 1] = simd::axpy_max_abs(-coeffs[m], phi(m), r);
  }
}

double GridFrame::range_sup_norm(std::span<const double> coeffs, std::size_t begin, std::size_t end,
                                 std::span<double> scratch) const {
  if (end > coeffs.size() || end > n_ || begin > end) throw DomainError("range_sup_norm: bad range");
  std::fill(scratch.begin(), scratch.end(), 0.0);
  double m = 0.0;
  for (std::size_t i = begin; i < end; ++i) m = simd::axpy_max_abs(coeffs[i], phi(i), scratch);
  return m;
}

}  // namespace compsupp
