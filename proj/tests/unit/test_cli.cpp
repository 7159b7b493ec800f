#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/io.hpp"

using namespace compsupp;
using namespace compsupp::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("compsupp_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run_quiet(const ExperimentConfig& cfg, std::string* err_text = nullptr) {
  std::ostringstream log, err;
  int code = run(cfg, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config defaults and overrides", "[cli]") {
  auto b = load_config(Command::basis, nullptr);
  CHECK(b.basis_size == 64);
  CHECK(b.tolerance == 1e-8);
  auto c = load_config(Command::clt, {{"depth", 6}, {"generator", {{"kind", "ou"}, {"theta", 2.0}}}});
  CHECK(c.depth == 6);
  CHECK(c.generator.kind == GeneratorKind::ou);
  CHECK(c.generator.theta == 2.0);
  CHECK(c.n_list == std::vector<std::size_t>{1, 4, 16, 64});
  CHECK(c.t_grid.size() == 8);
}

TEST_CASE("config rejects bad input", "[cli]") {
  CHECK_THROWS_AS(load_config(Command::basis, {{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(load_config(Command::basis, {{"depth", "eight"}}), ConfigError);
  CHECK_THROWS_AS(load_config(Command::basis, {{"basis_size", -3}}), ConfigError);
  CHECK_THROWS_AS(load_config(Command::moment_operator, {{"phi", {{"family", "nope"}}}}), ConfigError);

  auto same = defaults_for(Command::support_operator);
  same.seed_holdout = same.seed_fit;
  CHECK_THROWS_AS(validate(same), ConfigError);
  auto empty = defaults_for(Command::clt);
  empty.n_list.clear();
  CHECK_THROWS_AS(validate(empty), ConfigError);
}

TEST_CASE("resolved config excludes threads and out", "[cli]") {
  auto a = defaults_for(Command::support_operator);
  auto b = a;
  b.threads = 7;
  b.out = "elsewhere";
  CHECK(a.resolved() == b.resolved());
  CHECK(a.digest() == b.digest());
  b.seed_fit = 99;
  CHECK(a.digest() != b.digest());
  CHECK(a.digest() == io::fnv1a_hex(a.resolved().dump()));
}

TEST_CASE("basis command", "[cli]") {
  auto cfg = defaults_for(Command::basis);
  cfg.out = scratch("basis");
  REQUIRE(run_quiet(cfg) == kOk);
  auto rep = nlohmann::json::parse(io::read_text_file(cfg.out / "orthonormality.json"));
  CHECK(rep["gram_defect"].get<double>() <= 1e-8);
  CHECK(fs::exists(cfg.out / "manifest.json"));
  CHECK(fs::exists(cfg.out / "phi_001.csv"));
  CHECK(fs::exists(cfg.out / "phi_064.csv"));

  cfg.tolerance = 0.0;
  CHECK(run_quiet(cfg) == kUsage);
  cfg.tolerance = -1.0;
  CHECK(run_quiet(cfg) == kUsage);
  fs::remove_all(cfg.out);
}

TEST_CASE("support operator exit codes", "[cli]") {
  auto zero = defaults_for(Command::support_operator);
  zero.generator = GeneratorSpec::zero();
  zero.out = scratch("support_zero");
  CHECK(run_quiet(zero) == kOk);

  auto small = defaults_for(Command::support_operator);
  small.basis_size = 9;
  small.out = scratch("support_small");
  std::string err;
  CHECK(run_quiet(small, &err) == kConstruction);
  CHECK_FALSE(err.empty());
  auto partial = nlohmann::json::parse(io::read_text_file(small.out / "partial_scheme.json"));
  CHECK(partial["progress"]["N"][0] == 1);

  auto clash = defaults_for(Command::support_operator);
  clash.seed_holdout = clash.seed_fit;
  clash.out = scratch("support_clash");
  CHECK(run_quiet(clash) == kUsage);
  for (const auto& p : {zero.out, small.out, clash.out}) fs::remove_all(p);
}

TEST_CASE("moment operator routing", "[cli]") {
  auto nopsi = load_config(Command::moment_operator, {{"phi", {{"family", "exp_alpha"}, {"alpha", 1.0}}}});
  nopsi.out = scratch("moment_nopsi");
  CHECK(run_quiet(nopsi) == kUsage);

  auto route = load_config(Command::moment_operator,
                           {{"generator", {{"kind", "scaled_heavy"}, {"tail_index", 1.5}}},
                            {"phi", {{"family", "exp_alpha"}, {"alpha", 1.0}}},
                            {"psi", {{"family", "power"}, {"p", 2.0}}},
                            {"M_fit", 300},
                            {"M_holdout", 300}});
  route.out = scratch("moment_route");
  int code = run_quiet(route);
  CHECK((code == kOk || code == kVerification));
  auto rep = nlohmann::json::parse(io::read_text_file(route.out / "moment_report.json"));
  CHECK(rep["route"] == "psi");
  CHECK(rep["selection_norm"] == "power(2)");
  for (const auto& p : {nopsi.out, route.out}) fs::remove_all(p);
}
