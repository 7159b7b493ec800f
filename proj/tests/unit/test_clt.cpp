#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "compsupp/blockop.hpp"
#include "compsupp/clt.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/franklin.hpp"
#include "compsupp/processes.hpp"
#include "compsupp/stats.hpp"

using namespace compsupp;

TEST_CASE("normalized sum of identical copies scales by sqrt n", "[clt]") {
  auto e = generate(GeneratorSpec::brownian(), 10, 5, 1);
  std::vector<PathEnsemble> same(4, e);
  auto s = normalized_sum(same, 4);
  for (std::size_t i = 0; i < e.data().size(); ++i)
    CHECK(s.data()[i] == Catch::Approx(2.0 * e.data()[i]).margin(1e-15));
  CHECK_THROWS_AS(normalized_sum(same, 5), InputError);
}

TEST_CASE("streamed sums match explicit copies", "[clt]") {
  auto spec = GeneratorSpec::ou(1.0, 1.0);
  auto copies = iid_copies(spec, 4, 50, 6, 9);
  auto direct = normalized_sum(copies, 4);
  std::vector<std::size_t> ns = {4, 1};
  auto streamed = normalized_sums(spec, ns, 50, 6, 9, 3);
  REQUIRE(streamed.size() == 2);
  CHECK(std::equal(streamed[1].data().begin(), streamed[1].data().end(), direct.data().begin()));
  CHECK(std::equal(streamed[0].data().begin(), streamed[0].data().end(), copies[0].data().begin()));
}

TEST_CASE("Gaussian stability of the sums", "[clt]") {
  std::vector<std::size_t> ns = {1, 4, 16};
  auto sums = normalized_sums(GeneratorSpec::brownian(), ns, 2000, 6, 21, 4);
  auto s16 = sums[2].column(sums[2].grid_size() - 1);
  double var = stats::variance(s16);
  CHECK(var >= 0.85);
  CHECK(var <= 1.15);

  auto est = clt_norm_estimate(GeneratorSpec::brownian(), ns, 2000, 6, 21, 0.95, 4);
  double lo = *std::min_element(est.per_n.begin(), est.per_n.end());
  double hi = *std::max_element(est.per_n.begin(), est.per_n.end());
  CHECK(hi <= 1.05 * lo);
  CHECK(est.value == hi);
}

TEST_CASE("norm estimate", "[clt]") {
  std::vector<std::size_t> one = {1};
  CHECK(clt_norm_estimate(GeneratorSpec::zero(), one, 100, 5, 1).value == 0.0);
  double a = clt_norm_estimate(GeneratorSpec::brownian(), one, 2000, 7, 1, 0.95, 4).value;
  double b = clt_norm_estimate(GeneratorSpec::brownian(), one, 2000, 7, 2, 0.95, 4).value;
  CHECK(a > 0.0);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) <= 0.05 * a);
}

TEST_CASE("tail diagnostic", "[clt]") {
  std::vector<double> one = {1.0};
  auto d = tail_diagnostic(one, std::vector<double>{0.5, 2.0});
  CHECK(d.value[0] == Catch::Approx(0.25));
  CHECK(d.value[1] == 0.0);
  CHECK_THROWS_AS(tail_diagnostic(one, std::vector<double>{2.0, 1.0}), InputError);
  CHECK_THROWS_AS(tail_diagnostic(one, std::vector<double>{0.0, 1.0}), InputError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> pareto(5000), bounded(5000);
  for (auto& x : pareto) x = std::pow(1 - u(rng), -1.0 / 1.5);
  for (auto& x : bounded) x = u(rng);
  auto grid = auto_tail_grid(pareto);
  auto p = tail_diagnostic(pareto, grid);
  CHECK(p.non_vanishing);
  std::size_t half = grid.size() / 2;
  CHECK(p.value.back() > p.value[half]);

  auto q = tail_diagnostic(bounded, std::vector<double>{0.5, 0.9, 1.5});
  CHECK(q.value.back() == 0.0);

  // t^2 times a non-increasing step function
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    CHECK(p.value[i] >= 0.0);
    CHECK(p.value[i] == Catch::Approx(p.t[i] * p.t[i] * p.exceedance[i]));
    if (i > 0) CHECK(p.exceedance[i] <= p.exceedance[i - 1]);
  }
}

TEST_CASE("harness", "[clt]") {
  auto basis = FranklinBasis::build(257, 1e-10);
  std::vector<std::size_t> ns = {1, 4};
  std::vector<double> ts = {0.5, 1, 2, 4, 8};

  BlockScheme small({1, 2, 4, 8}, {1, 2, 3});
  auto z = tightness_harness(GeneratorSpec::zero(), small, basis, ns, ts, 50, 8, 3, 1);
  CHECK(z.K_hat == 0.0);
  for (const auto& row : z.coverage) CHECK(row.exceedance == 0.0);
  CHECK_THROWS_AS(tightness_harness(GeneratorSpec::zero(), small, basis, ns, ts, 50, 8, 3, 3), InputError);
  CHECK_THROWS_AS(tightness_harness(GeneratorSpec::zero(), small, basis, std::vector<std::size_t>{}, ts, 50, 8, 3),
                  InputError);

  auto fit = generate(GeneratorSpec::brownian(), 500, 8, 1, 4);
  auto scheme = select_blocks(fit, basis, 0.95, 0.25, 4);
  auto r = tightness_harness(GeneratorSpec::brownian(), scheme, basis, ns, ts, 500, 8, 2, 1, 4);
  CHECK(std::isfinite(r.K_hat));
  CHECK(r.coverage_holds);
  for (const auto& row : r.coverage) {
    CHECK(row.bound == Catch::Approx(std::min(1.0, r.K_hat / row.t)));
    CHECK(row.exceedance <= row.bound + row.tolerance);
  }
  CHECK(r.coverage_csv().rfind("n,t,exceedance,bound\n", 0) == 0);

  auto heavy = tightness_harness(GeneratorSpec::scaled_heavy(GeneratorKind::brownian, 1.5), scheme, basis,
                                 std::vector<std::size_t>{1, 16}, ts, 500, 8, 2, 1, 4);
  CHECK(heavy.per_n[1].q99 > heavy.per_n[0].q99);
}

TEST_CASE("Gaussian invariance", "[clt]") {
  auto r = gaussian_invariance_test(GeneratorSpec::brownian(), 1, 16, 2000, 6, 7, 4);
  CHECK(r.pass);
  CHECK(r.ks.p_value >= 0.01);
  auto s = gaussian_invariance_test(GeneratorSpec::smooth_fourier(1.0), 1, 4, 2000, 6, 7, 4);
  CHECK(s.pass);
  CHECK_THROWS_AS(gaussian_invariance_test_seeds(GeneratorSpec::brownian(), 4, 4, 100, 5, 3, 3), InputError);
  CHECK_THROWS_AS(gaussian_invariance_test(GeneratorSpec::scaled_heavy(GeneratorKind::brownian, 1.5), 1, 4, 100, 5, 3),
                  InputError);
}
