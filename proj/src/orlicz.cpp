#include "compsupp/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compsupp/errors.hpp"
#include "compsupp/parallel.hpp"
#include "compsupp/processes.hpp"
#include "compsupp/simd/kernels.hpp"

namespace compsupp {

namespace {

const double kLogMax = std::log(std::numeric_limits<double>::max());

double log_expm1(double x) {
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

}  // namespace

YoungFunction YoungFunction::power(double p) {
  YoungFunction f;
  f.family = YoungFamily::power;
  f.p = p;
  return f;
}

YoungFunction YoungFunction::power_log(double p, double r) {
  YoungFunction f;
  f.family = YoungFamily::power_log;
  f.p = p;
  f.r = r;
  return f;
}

YoungFunction YoungFunction::exp_alpha(double alpha) {
  YoungFunction f;
  f.family = YoungFamily::exp_alpha;
  f.alpha = alpha;
  return f;
}

double YoungFunction::log_eval(double u) const {
  u = std::fabs(u);
  if (u == 0.0) return -std::numeric_limits<double>::infinity();
  const double lu = std::log(u);
  switch (family) {
    case YoungFamily::power:
      return p * lu;
    case YoungFamily::power_log:
      return p * lu + r * std::log1p(std::log(std::exp(1.0) + u));
    case YoungFamily::exp_alpha:
      return log_expm1(std::exp(alpha * lu));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

YoungValue young_eval(const YoungFunction& phi, double u) {
  const double l = phi.log_eval(u);
  if (l > kLogMax) return {std::numeric_limits<double>::max(), true};
  return {std::exp(l), false};
}

void YoungFunction::validate() const {
  const auto finite_pos = [](double x) { return std::isfinite(x) && x > 0.0; };
  switch (family) {
    case YoungFamily::power:
      if (!finite_pos(p)) throw InputError("power: p must be > 0");
      break;
    case YoungFamily::power_log:
      if (!finite_pos(p) || !std::isfinite(r)) throw InputError("power_log: p must be > 0 and r finite");
      break;
    case YoungFamily::exp_alpha:
      if (!finite_pos(alpha)) throw InputError("exp_alpha: alpha must be > 0");
      break;
  }
  const double h = 1e-2;
  for (int k = -40; k <= 40; ++k) {
    const double u = std::pow(10.0, k / 8.0);
    const auto lo = young_eval(*this, u * (1.0 - h));
    const auto mid = young_eval(*this, u);
    const auto hi = young_eval(*this, u * (1.0 + h));
    if (lo.saturated || mid.saturated || hi.saturated) break;
    if (!(hi.value > mid.value && mid.value > lo.value)) {
      throw InputError(name() + " is not strictly increasing near u = " + std::to_string(u));
    }
    // Second difference on a symmetric stencil; tolerance covers rounding only.
    if (lo.value + hi.value - 2.0 * mid.value < -1e-9 * mid.value) {
      throw InputError(name() + " is not convex near u = " + std::to_string(u));
    }
  }
}

std::string YoungFunction::name() const {
  const auto num = [](double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (family) {
    case YoungFamily::power: return "power(" + num(p) + ")";
    case YoungFamily::power_log: return "power_log(" + num(p) + "," + num(r) + ")";
    case YoungFamily::exp_alpha: return "exp_alpha(" + num(alpha) + ")";
  }
  return "unknown";
}

nlohmann::json YoungFunction::to_json() const {
  switch (family) {
    case YoungFamily::power: return {{"family", "power"}, {"p", p}};
    case YoungFamily::power_log: return {{"family", "power_log"}, {"p", p}, {"r", r}};
    case YoungFamily::exp_alpha: return {{"family", "exp_alpha"}, {"alpha", alpha}};
  }
  return {};
}

YoungFunction YoungFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw InputError("Young function spec needs a string 'family'");
  }
  const auto fam = j["family"].get<std::string>();
  const auto num = [&](const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) throw InputError(std::string("Young parameter '") + key + "' must be a number");
    return j[key].get<double>();
  };
  YoungFunction f;
  if (fam == "power") {
    f = power(num("p", 2.0));
  } else if (fam == "power_log") {
    f = power_log(num("p", 2.0), num("r", 1.0));
  } else if (fam == "exp_alpha") {
    f = exp_alpha(num("alpha", 1.0));
  } else {
    throw InputError("unknown Young family '" + fam + "'");
  }
  f.validate();
  return f;
}

Delta2Verdict delta2_check(const YoungFunction& phi, double cap) {
  Delta2Verdict v;
  v.analytic = phi.family != YoungFamily::exp_alpha;
  v.cap = cap;
  const double log_cap = std::log(cap);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = -48; k <= 120; ++k) {
    const double u = std::pow(10.0, k / 8.0);
    const double lr = phi.log_eval(2.0 * u) - phi.log_eval(u);
    worst = std::max(worst, lr);
    if (!v.witness && lr > log_cap) v.witness = u;
  }
  v.max_ratio = worst > kLogMax ? std::numeric_limits<double>::max() : std::exp(worst);
  v.numeric = !v.witness.has_value();
  return v;
}

nlohmann::json Delta2Verdict::to_json() const {
  nlohmann::json j{{"analytic", analytic}, {"numeric", numeric}, {"agree", agree()}, {"max_ratio", max_ratio},
                   {"cap", cap}};
  j["witness"] = witness ? nlohmann::json(*witness) : nlohmann::json(nullptr);
  return j;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

WeakerVerdict weaker_than_check(const YoungFunction& psi, const YoungFunction& phi) {
  WeakerVerdict out;
  out.lambdas = {0.5, 1.0, 2.0, 10.0};
  if (psi.family == YoungFamily::power && phi.family == YoungFamily::power) {
    out.analytic = true;
    out.verdict = psi.p < phi.p ? Verdict::yes : Verdict::no;
    for (double lam : out.lambdas) {
      const double u = 1e15;
      out.final_log_ratio.push_back(psi.log_eval(lam * u) - phi.log_eval(u));
    }
    return out;
  }
  bool any_no = false;
  bool all_yes = true;
  for (double lam : out.lambdas) {
    std::vector<double> lr;
    for (int k = 8; k <= 60; ++k) {
      const double u = std::pow(10.0, k / 4.0);
      lr.push_back(psi.log_eval(lam * u) - phi.log_eval(u));
    }
    const std::size_t start = lr.size() / 2;
    bool decreasing = true;
    bool non_decreasing = true;
    for (std::size_t i = start; i + 1 < lr.size(); ++i) {
      const double tol = 1e-9 * std::max(1.0, std::fabs(lr[i]));
      if (!(lr[i + 1] < lr[i] - tol)) decreasing = false;
      if (lr[i + 1] < lr[i] - tol) non_decreasing = false;
    }
    out.final_log_ratio.push_back(lr.back());
    if (non_decreasing) {
      any_no = true;
      all_yes = false;
    } else if (!(decreasing && lr.back() < std::log(1e-3))) {
      all_yes = false;
    }
  }
  out.verdict = any_no ? Verdict::no : (all_yes ? Verdict::yes : Verdict::inconclusive);
  return out;
}

nlohmann::json WeakerVerdict::to_json() const {
  return {{"verdict", to_string(verdict)},
          {"analytic", analytic},
          {"lambdas", lambdas},
          {"final_log_ratio", final_log_ratio}};
}

namespace {

void check_sample(std::span<const double> s) {
  if (s.empty()) throw InputError("Luxemburg norm of an empty sample");
  for (double x : s) {
    if (!std::isfinite(x) || x < 0.0) throw InputError("Luxemburg samples must be finite and >= 0");
  }
}

// mean Phi(x / lambda) <= 1, with early exit once the sum passes M.
bool mean_within(std::span<const double> s, const YoungFunction& phi, double lambda) {
  const auto M = static_cast<double>(s.size());
  double sum = 0.0;
  for (double x : s) {
    if (x == 0.0) continue;
    const double l = phi.log_eval(x / lambda);
    if (l > kLogMax) return false;
    sum += std::exp(l);
    if (sum > M) return false;
  }
  return sum <= M;
}

}  // namespace

double luxemburg_norm(std::span<const double> sample, const YoungFunction& phi) {
  check_sample(sample);
  const double xmax = *std::max_element(sample.begin(), sample.end());
  if (xmax == 0.0) return 0.0;
  double hi = xmax;
  while (!mean_within(sample, phi, hi)) hi *= 2.0;
  double lo = 0.5 * hi;
  while (mean_within(sample, phi, lo)) {
    hi = lo;
    lo *= 0.5;
  }
  while (hi / lo - 1.0 > 1e-13) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if (mean_within(sample, phi, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool luxemburg_within(std::span<const double> sample, const YoungFunction& phi, double threshold) {
  check_sample(sample);
  if (threshold < 0.0) return false;
  if (threshold == 0.0) return std::all_of(sample.begin(), sample.end(), [](double x) { return x == 0.0; });
  return mean_within(sample, phi, threshold);
}

MomentConvergenceReport moment_convergence_report(const PathEnsemble& ens, const FranklinBasis& basis,
                                                  const YoungFunction& phi, std::span<const std::size_t> n_list,
                                                  std::size_t threads) {
  if (n_list.empty()) throw InputError("moment_convergence_report needs at least one n");
  std::vector<std::size_t> ns(n_list.begin(), n_list.end());
  std::sort(ns.begin(), ns.end());
  if (ns.back() > basis.size()) throw InputError("moment_convergence_report: n exceeds the basis size");
  const GridFrame frame(basis, std::max(ens.depth(), basis.grid_depth()));
  const auto tails = tail_matrix(ens, frame, threads);
  MomentConvergenceReport rep;
  for (std::size_t n : ns) {
    MomentConvergenceRow row;
    row.n = n;
    const auto col = tails.column(n);
    double sum = 0.0;
    for (double x : col) {
      const auto y = young_eval(phi, x);
      row.saturated = row.saturated || y.saturated;
      sum += y.value;
    }
    row.mean_phi = std::isfinite(sum) ? sum / static_cast<double>(col.size()) : std::numeric_limits<double>::max();
    row.luxemburg = luxemburg_norm(col, phi);
    rep.rows.push_back(row);
  }
  rep.means_non_increasing = true;
  rep.norms_non_increasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.means_non_increasing = rep.means_non_increasing && rep.rows[i].mean_phi <= rep.rows[i - 1].mean_phi;
    rep.norms_non_increasing = rep.norms_non_increasing && rep.rows[i].luxemburg <= rep.rows[i - 1].luxemburg;
  }
  return rep;
}

nlohmann::json MomentConvergenceReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"n", r.n}, {"mean_phi", r.mean_phi}, {"luxemburg", r.luxemburg}, {"saturated", r.saturated}});
  }
  return {{"rows", rows_json},
          {"means_non_increasing", means_non_increasing},
          {"norms_non_increasing", norms_non_increasing}};
}

BlockScheme select_moment_blocks(const PathEnsemble& ens, const FranklinBasis& basis, const YoungFunction& phi,
                                 std::size_t threads) {
  const double decay = 0.25;
  const GridFrame frame(basis, std::max(ens.depth(), basis.grid_depth()));
  const auto tails = tail_matrix(ens, frame, threads);
  std::vector<double> cache(tails.terms + 1, std::numeric_limits<double>::quiet_NaN());
  const auto statistic = [&](std::size_t m) {
    if (std::isnan(cache[m])) cache[m] = luxemburg_norm(tails.column(m), phi);
    return cache[m];
  };
  const double base = statistic(0);
  const auto growth = grow_blocks(
      basis.size(), base, decay,
      [&](std::size_t m, double thr) { return luxemburg_within(tails.column(m), phi, thr); }, statistic);

  std::vector<double> w(growth.N.size() - 1);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::ldexp(1.0, static_cast<int>(k));
  BlockScheme scheme(growth.N, std::move(w));

  BlockFit fit;
  fit.statistic = "luxemburg";
  fit.norm = phi.name();
  fit.target_decay = decay;
  fit.base = base;
  fit.targets = growth.targets;
  const auto norms = block_norms(ens, basis, scheme, threads);
  for (std::size_t k = 1; k <= scheme.K(); ++k) {
    fit.achieved_tails.push_back(statistic(scheme.N(k + 1)));
    fit.achieved_quantiles.push_back(luxemburg_norm(norms.block(k), phi));
  }
  fit.sum_statistic = luxemburg_norm(norms.weighted_sums(scheme), phi);
  scheme.fit = std::move(fit);
  return scheme;
}

PLFunction apply_V_inverse(const PLFunction& f, const FranklinBasis& basis, const BlockScheme& scheme) {
  return apply_U_inverse(f, basis, scheme);
}

MomentBoundReport verify_moment_bound(const PathEnsemble& holdout, const FranklinBasis& basis,
                                      const BlockScheme& scheme, const YoungFunction& target, double slack,
                                      std::size_t threads) {
  if (!(slack >= 0.0) || !std::isfinite(slack)) throw InputError("verify_moment_bound: slack must be >= 0");
  MomentBoundReport rep;
  rep.target = target.name();
  rep.slack = slack;

  const GridFrame frame(basis, std::max(holdout.depth(), basis.grid_depth()));
  std::vector<double> sup_xi(holdout.size());
  std::vector<double> head(holdout.size());
  parallel_for(holdout.size(), threads, [&](std::size_t i) {
    const auto x = frame.lift(holdout.values(i), holdout.depth());
    sup_xi[i] = simd::max_abs(x);
    head[i] = std::fabs(simd::dot(frame.dual(0), x)) * simd::max_abs(frame.phi(0));
  });
  const auto v_inv = u_inverse_sup_norms(holdout, basis, scheme, threads);
  rep.norm_xi = luxemburg_norm(sup_xi, target);
  rep.norm_v_inverse = luxemburg_norm(v_inv, target);
  rep.ratio = rep.norm_xi > 0.0 ? rep.norm_v_inverse / rep.norm_xi : (rep.norm_v_inverse > 0.0 ? INFINITY : 0.0);

  const auto norms = block_norms(holdout, basis, scheme, threads);
  rep.head_norm = luxemburg_norm(head, target);
  rep.chain_bound = scheme.w(1) * rep.head_norm;
  for (std::size_t k = 1; k <= scheme.K(); ++k) {
    rep.nu_norms.push_back(luxemburg_norm(norms.block(k), target));
    rep.chain_bound += scheme.w(k) * rep.nu_norms.back();
  }
  rep.chain_holds = rep.norm_v_inverse <= rep.chain_bound * (1.0 + 1e-6);
  rep.pass = rep.ratio <= 1.0 + slack;
  return rep;
}

nlohmann::json MomentBoundReport::to_json() const {
  return {{"target", target},
          {"slack", slack},
          {"norm_xi", norm_xi},
          {"norm_v_inverse", norm_v_inverse},
          {"ratio", ratio},
          {"chain_bound", chain_bound},
          {"chain_holds", chain_holds},
          {"head_norm", head_norm},
          {"nu_norms", nu_norms},
          {"pass", pass}};
}

}  // namespace compsupp
