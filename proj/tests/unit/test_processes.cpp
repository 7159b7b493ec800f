#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "compsupp/dyadic.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/franklin.hpp"
#include "compsupp/processes.hpp"
#include "compsupp/stats.hpp"

using namespace compsupp;

TEST_CASE("generator spec validation and json", "[processes]") {
  CHECK_THROWS_AS(GeneratorSpec::ou(-1.0, 1.0).validate(), InputError);
  CHECK_THROWS_AS(GeneratorSpec::scaled_heavy(GeneratorKind::brownian, 0.0).validate(), InputError);
  CHECK_THROWS_AS(parse_generator_kind("levy"), InputError);
  auto s = GeneratorSpec::ou(2.0, 0.5);
  auto back = GeneratorSpec::from_json(s.to_json());
  CHECK(back.kind == GeneratorKind::ou);
  CHECK(back.theta == 2.0);
  CHECK(back.sigma == 0.5);
  CHECK(GeneratorSpec::brownian().is_gaussian());
  CHECK_FALSE(GeneratorSpec::scaled_heavy(GeneratorKind::brownian, 1.5).is_gaussian());
  for (auto k : {GeneratorKind::zero, GeneratorKind::brownian, GeneratorKind::bridge, GeneratorKind::ou,
                 GeneratorKind::smooth_fourier, GeneratorKind::scaled_heavy})
    CHECK(parse_generator_kind(to_string(k)) == k);
}

TEST_CASE("generate rejects bad arguments", "[processes]") {
  CHECK_THROWS_AS(generate(GeneratorSpec::brownian(), 0, 4, 1), InputError);
  CHECK_THROWS_AS(generate(GeneratorSpec::brownian(), 10, 0, 1), InputError);
  CHECK_THROWS_AS(generate(GeneratorSpec::brownian(), 10, kMaxGenerationDepth + 1, 1), InputError);
}

TEST_CASE("zero generator", "[processes]") {
  auto e = generate(GeneratorSpec::zero(), 3, 4, 1);
  CHECK(e.grid_size() == 17);
  for (double x : e.data()) CHECK(x == 0.0);
}

TEST_CASE("brownian start, variance and increments", "[processes]") {
  const std::size_t M = 2000;
  const int d = 8;
  auto e = generate(GeneratorSpec::brownian(), M, d, 42, 2);
  for (std::size_t i = 0; i < M; ++i) CHECK(e.values(i)[0] == 0.0);
  auto end = e.column(e.grid_size() - 1);
  double var = stats::variance(end);
  CHECK(var >= 0.9);
  CHECK(var <= 1.1);

  const double h = dyadic_step(d);
  for (std::size_t node : {0u, 77u, 255u}) {
    auto a = e.column(node), b = e.column(node + 1);
    std::vector<double> inc(M);
    for (std::size_t i = 0; i < M; ++i) inc[i] = b[i] - a[i];
    CHECK(std::abs(stats::mean(inc)) <= 3.0 * std::sqrt(h / M));
    CHECK(std::abs(stats::variance(inc) - h) <= 0.1 * h);
  }
}

TEST_CASE("bridge pins both ends; ou and smooth paths are finite", "[processes]") {
  auto b = generate(GeneratorSpec::bridge(), 50, 6, 3);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.values(i).front() == 0.0);
    CHECK(std::abs(b.values(i).back()) <= 1e-14);
  }
  auto mid = b.column(32);
  CHECK(stats::variance(mid) > 0.1);

  for (auto spec : {GeneratorSpec::ou(1.0, 1.0), GeneratorSpec::smooth_fourier(1.0),
                    GeneratorSpec::scaled_heavy(GeneratorKind::brownian, 1.5)}) {
    auto e = generate(spec, 40, 7, 9);
    for (double x : e.data()) CHECK(std::isfinite(x));
  }
}

TEST_CASE("ou stationary variance", "[processes]") {
  // started from 0 the variance at t=1 is sigma^2 (1 - e^{-2 theta}) / (2 theta)
  const double theta = 2.0, sigma = 1.0;
  auto e = generate(GeneratorSpec::ou(theta, sigma), 2000, 6, 77);
  double want = sigma * sigma * (1 - std::exp(-2 * theta)) / (2 * theta);
  CHECK(stats::variance(e.column(e.grid_size() - 1)) == Catch::Approx(want).epsilon(0.1));
}

TEST_CASE("determinism across runs and thread counts", "[processes]") {
  for (auto spec : {GeneratorSpec::brownian(), GeneratorSpec::smooth_fourier(1.0),
                    GeneratorSpec::scaled_heavy(GeneratorKind::bridge, 1.5)}) {
    auto a = generate(spec, 64, 7, 5, 1);
    auto b = generate(spec, 64, 7, 5, 4);
    REQUIRE(a.data().size() == b.data().size());
    CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  }
  CHECK(stream_seed(1, 2, 3) == stream_seed(1, 2, 3));
  CHECK(stream_seed(1, 2, 3) != stream_seed(1, 3, 2));
  CHECK(stream_seed(1, 0, 0) != stream_seed(2, 0, 0));
}

TEST_CASE("iid copies", "[processes]") {
  auto spec = GeneratorSpec::brownian();
  auto copies = iid_copies(spec, 2, 2000, 5, 11);
  auto g = generate(spec, 2000, 5, 11);
  CHECK(std::equal(copies[0].data().begin(), copies[0].data().end(), g.data().begin()));
  auto one = generate_copy(spec, 1, 2000, 5, 11);
  CHECK(std::equal(copies[1].data().begin(), copies[1].data().end(), one.data().begin()));
  auto x = copies[0].column(32), y = copies[1].column(32);
  CHECK(std::abs(stats::correlation(x, y)) <= 3.0 / std::sqrt(2000.0));
}

TEST_CASE("smooth paths have smaller high-order coefficients", "[processes]") {
  auto basis = FranklinBasis::build(128, 1e-10);
  GridFrame frame(basis, 8);
  auto med_block = [&](const PathEnsemble& e) {
    std::vector<double> med;
    for (std::size_t i = 0; i < e.size(); ++i) {
      auto c = frame.analyze(e.values(i));
      double s = 0;
      for (std::size_t n = 64; n < 128; ++n) s = std::max(s, std::abs(c[n]));
      med.push_back(s);
    }
    return stats::quantile(med, 0.5);
  };
  auto bm = generate(GeneratorSpec::brownian(), 200, 8, 1);
  auto sm = generate(GeneratorSpec::smooth_fourier(2.0), 200, 8, 1);
  CHECK(med_block(sm) < med_block(bm));
}

TEST_CASE("ensemble file round trip", "[processes]") {
  auto e = generate(GeneratorSpec::ou(1.5, 0.7), 5, 4, 123);
  auto dir = std::filesystem::temp_directory_path() / "compsupp_proc_test";
  std::filesystem::create_directories(dir);
  write_ensemble(e, dir / "paths.csv");
  CHECK(std::filesystem::exists(dir / "paths.json"));
  auto r = read_ensemble(dir / "paths.csv");
  CHECK(r.size() == 5);
  CHECK(r.depth() == 4);
  CHECK(r.base_seed() == 123);
  CHECK(r.spec().kind == GeneratorKind::ou);
  CHECK(std::equal(r.data().begin(), r.data().end(), e.data().begin()));
  std::filesystem::remove_all(dir);
}
