#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "compsupp/errors.hpp"
#include "compsupp/franklin.hpp"
#include "compsupp/orlicz.hpp"
#include "compsupp/processes.hpp"

using namespace compsupp;

namespace {

double mean_phi(std::span<const double> s, const YoungFunction& phi, double lambda) {
  double acc = 0;
  for (double x : s) acc += young_eval(phi, x / lambda).value;
  return acc / s.size();
}

std::vector<double> abs_normal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> s(n);
  for (auto& x : s) x = std::abs(g(rng));
  return s;
}

}  // namespace

TEST_CASE("Young function evaluation", "[orlicz]") {
  CHECK(young_eval(YoungFunction::power(2), 3.0).value == Catch::Approx(9.0));
  CHECK(young_eval(YoungFunction::power(2), -3.0).value == Catch::Approx(9.0));
  CHECK(young_eval(YoungFunction::exp_alpha(1), 1.0).value == Catch::Approx(std::exp(1.0) - 1));
  CHECK(young_eval(YoungFunction::power_log(2, 1), 1.0).value == Catch::Approx(1.0 + std::log(std::exp(1.0) + 1)));
  CHECK(young_eval(YoungFunction::power(2), 0.0).value == 0.0);
  auto big = young_eval(YoungFunction::exp_alpha(1), 1e5);
  CHECK(big.saturated);
  CHECK(std::isfinite(big.value));
  CHECK(YoungFunction::exp_alpha(2).log_eval(1e100) == Catch::Approx(1e200));
  CHECK(YoungFunction::power(2).log_eval(1e300) == Catch::Approx(2 * std::log(1e300)));
}

TEST_CASE("Young function validation and json", "[orlicz]") {
  CHECK_THROWS_AS(YoungFunction::power(0.5).validate(), InputError);
  CHECK_THROWS_AS(YoungFunction::exp_alpha(0.5).validate(), InputError);
  CHECK_THROWS_AS(YoungFunction::from_json({{"family", "cosh"}}), InputError);
  auto f = YoungFunction::from_json(YoungFunction::power_log(3, 2).to_json());
  CHECK(f.family == YoungFamily::power_log);
  CHECK(f.p == 3.0);
  CHECK(f.r == 2.0);
}

TEST_CASE("Delta2 classification", "[orlicz]") {
  for (double p : {1.0, 1.5, 2.0, 4.0, 8.0}) {
    auto v = delta2_check(YoungFunction::power(p));
    CHECK(v.holds());
    CHECK(v.agree());
    for (double r : {0.5, 1.0, 3.0}) {
      auto w = delta2_check(YoungFunction::power_log(p, r));
      CHECK(w.holds());
      CHECK(w.agree());
    }
  }
  for (double a : {1.0, 1.5, 2.0}) {
    auto v = delta2_check(YoungFunction::exp_alpha(a));
    CHECK_FALSE(v.holds());
    CHECK(v.agree());
    CHECK(v.witness.has_value());
  }
}

TEST_CASE("weaker-than verdicts", "[orlicz]") {
  CHECK(weaker_than_check(YoungFunction::power(2), YoungFunction::power(4)).verdict == Verdict::yes);
  CHECK(weaker_than_check(YoungFunction::power(2), YoungFunction::power(2)).verdict == Verdict::no);
  CHECK(weaker_than_check(YoungFunction::power_log(2, 1), YoungFunction::power(3)).verdict == Verdict::yes);
  CHECK(weaker_than_check(YoungFunction::power(2), YoungFunction::exp_alpha(1)).verdict == Verdict::yes);
  CHECK(weaker_than_check(YoungFunction::power(3), YoungFunction::power(2)).verdict == Verdict::no);
  CHECK(to_string(Verdict::inconclusive) == "inconclusive");
}

TEST_CASE("Luxemburg norm examples", "[orlicz]") {
  auto sq = YoungFunction::power(2);
  CHECK(luxemburg_norm(std::vector<double>{2, 2, 2}, sq) == Catch::Approx(2.0).epsilon(1e-12));
  CHECK(luxemburg_norm(std::vector<double>{0, 0}, sq) == 0.0);
  CHECK(luxemburg_norm(std::vector<double>{1, 3}, sq) == Catch::Approx(std::sqrt(5.0)).epsilon(1e-10));
  CHECK_THROWS_AS(luxemburg_norm(std::vector<double>{}, sq), InputError);
  CHECK_THROWS_AS(luxemburg_norm(std::vector<double>{-1.0}, sq), InputError);
  CHECK_THROWS_AS(luxemburg_norm(std::vector<double>{INFINITY}, sq), InputError);
}

TEST_CASE("property: Luxemburg gauge, RMS and homogeneity", "[orlicz]") {
  const std::vector<YoungFunction> phis = {YoungFunction::power(1.5), YoungFunction::power(2),
                                           YoungFunction::power_log(2, 1), YoungFunction::exp_alpha(1),
                                           YoungFunction::exp_alpha(2)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto s = abs_normal(100, seed);
    double rms = 0;
    for (double x : s) rms += x * x;
    rms = std::sqrt(rms / s.size());
    CHECK(luxemburg_norm(s, YoungFunction::power(2)) == Catch::Approx(rms).epsilon(1e-10));

    for (const auto& phi : phis) {
      double lam = luxemburg_norm(s, phi);
      CHECK(mean_phi(s, phi, lam) <= 1.0);
      CHECK(mean_phi(s, phi, lam * (1 - 1e-6)) > 1.0);
      std::vector<double> cs(s);
      for (auto& x : cs) x *= 3.7;
      CHECK(luxemburg_norm(cs, phi) == Catch::Approx(3.7 * lam).epsilon(1e-9));
      CHECK(luxemburg_within(s, phi, lam * (1 + 1e-9)));
      CHECK_FALSE(luxemburg_within(s, phi, lam * (1 - 1e-6)));
    }
  }
}

TEST_CASE("moment convergence on Brownian paths", "[orlicz]") {
  auto b = FranklinBasis::build(257, 1e-10);
  auto e = generate(GeneratorSpec::brownian(), 500, 8, 3, 4);
  std::vector<std::size_t> ns = {16, 64, 256};
  auto r = moment_convergence_report(e, b, YoungFunction::power(2), ns, 4);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[1].mean_phi < r.rows[0].mean_phi);
  CHECK(r.rows[2].mean_phi < r.rows[1].mean_phi);
  CHECK(r.means_non_increasing);
  CHECK(r.norms_non_increasing);

  auto z = moment_convergence_report(generate(GeneratorSpec::zero(), 10, 8, 1), b, YoungFunction::power(2), ns);
  for (const auto& row : z.rows) CHECK(row.luxemburg == 0.0);
}

TEST_CASE("moment blocks", "[orlicz]") {
  auto b = FranklinBasis::build(257, 1e-10);
  auto phi = YoungFunction::power(2);

  auto z = select_moment_blocks(generate(GeneratorSpec::zero(), 10, 8, 1), b, phi);
  CHECK(std::vector<std::size_t>(z.N().begin(), z.N().end()) == std::vector<std::size_t>{1, 2, 257});

  // paths in the span of phi_1..phi_4
  std::vector<double> vals;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> c = {g(rng), g(rng), g(rng), g(rng)};
    auto f = partial_sum(CoefficientVector(c), b, 4);
    for (int j = 0; j <= 256; ++j) vals.push_back(f(j / 256.0));
  }
  PathEnsemble span4(GeneratorSpec::zero(), 8, 0, 20, vals);
  auto s4 = select_moment_blocks(span4, b, phi);
  CHECK(s4.truncation() == 257);
  std::size_t last = 0;
  for (std::size_t k = 1; k <= s4.K(); ++k)
    if (s4.N(k) < 4) last = k;
  CHECK(s4.N(last + 1) <= 4);

  auto fit = generate(GeneratorSpec::brownian(), 500, 8, 1, 4);
  auto s = select_moment_blocks(fit, b, phi, 4);
  REQUIRE(s.fit.has_value());
  CHECK(s.fit->statistic == "luxemburg");
  for (std::size_t k = 1; k <= s.K(); ++k) CHECK(s.w(k) == std::pow(2.0, static_cast<double>(k) - 1));
  for (std::size_t k = 0; k < s.fit->achieved_tails.size(); ++k)
    CHECK(s.fit->achieved_tails[k] <= s.fit->targets[k] * (1 + 1e-12));

  auto hold = generate(GeneratorSpec::brownian(), 500, 8, 2, 4);
  auto rep = verify_moment_bound(hold, b, s, phi, 0.10, 4);
  CHECK(rep.pass);
  CHECK(rep.chain_holds);
  double base = rep.norm_xi;
  // block 1 is the head; block k carries the 4^-(k-1) target
  for (std::size_t k = 0; k < rep.nu_norms.size(); ++k)
    CHECK(rep.nu_norms[k] <= 2.0 * std::pow(4.0, -static_cast<double>(k)) * base);
}

TEST_CASE("V inverse shares the U inverse", "[orlicz]") {
  auto b = FranklinBasis::build(16, 1e-12);
  BlockScheme s({1, 2, 4}, {2, 4});
  CHECK(pl_sup_norm(apply_V_inverse(b.function(1), b, s) - 2.0 * b.function(1)) <= 1e-10);
  CHECK(pl_sup_norm(apply_V_inverse(PLFunction(), b, s)) == 0.0);
  auto f = b.function(3) + b.function(1);
  CHECK(pl_sup_norm(apply_U(apply_V_inverse(f, b, s), b, s) - f) <= 1e-10);
}
