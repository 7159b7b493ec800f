#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "compsupp/errors.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed_fit;
  std::optional<std::uint64_t> seed_holdout;
  std::optional<std::size_t> paths;
  std::optional<int> depth;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed-fit", o.seed_fit, "base seed of the fitting ensemble");
  sub->add_option("--seed-holdout", o.seed_holdout, "base seed of the held-out ensemble");
  sub->add_option("--paths", o.paths, "paths per ensemble (sets M_fit and M_holdout)");
  sub->add_option("--depth", o.depth, "dyadic depth of generated paths");
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores); does not change outputs");
}

int execute(compsupp::cli::Command command, const Overrides& o) {
  using namespace compsupp;
  nlohmann::json j;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) {
      std::cerr << "config error: cannot open " << o.config << "\n";
      return cli::kUsage;
    }
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return cli::kUsage;
    }
  }
  cli::ExperimentConfig cfg;
  try {
    cfg = cli::load_config(command, j);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kUsage;
  }
  if (!o.out.empty()) cfg.out = o.out;
  if (o.seed_fit) cfg.seed_fit = *o.seed_fit;
  if (o.seed_holdout) cfg.seed_holdout = *o.seed_holdout;
  if (o.paths) cfg.M_fit = cfg.M_holdout = *o.paths;
  if (o.depth) cfg.depth = *o.depth;
  if (o.threads) cfg.threads = *o.threads;
  return cli::run(cfg, std::cout, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact-support operators for random processes: Franklin bases, block schemes, CLT harness"};
  app.require_subcommand(1);

  using compsupp::cli::Command;
  const std::pair<const char*, Command> commands[] = {
      {"basis", Command::basis},
      {"support-operator", Command::support_operator},
      {"moment-operator", Command::moment_operator},
      {"clt", Command::clt},
  };
  Overrides overrides[4];
  CLI::App* subs[4];
  const char* help[4] = {"build a Franklin basis and write its functions and orthonormality report",
                         "fit a support block scheme and verify it on held-out paths",
                         "fit a moment block scheme under a Luxemburg norm and verify the bound",
                         "run the tightness harness, tail diagnostic and Gaussian invariance test"};
  for (int i = 0; i < 4; ++i) {
    subs[i] = app.add_subcommand(commands[i].first, help[i]);
    add_common(subs[i], overrides[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : compsupp::cli::kUsage;
  }
  for (int i = 0; i < 4; ++i) {
    if (subs[i]->parsed()) return execute(commands[i].second, overrides[i]);
  }
  return compsupp::cli::kUsage;
}
