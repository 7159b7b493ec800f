#include "cli/config.hpp"

#include <algorithm>
#include <set>

#include "compsupp/errors.hpp"
#include "compsupp/io.hpp"

namespace compsupp::cli {

std::string to_string(Command c) {
  switch (c) {
    case Command::basis: return "basis";
    case Command::support_operator: return "support-operator";
    case Command::moment_operator: return "moment-operator";
    case Command::clt: return "clt";
  }
  return "unknown";
}

ExperimentConfig defaults_for(Command c) {
  ExperimentConfig cfg;
  cfg.command = c;
  switch (c) {
    case Command::basis:
      cfg.basis_size = 64;
      cfg.tolerance = 1e-8;
      cfg.out = "out/basis";
      break;
    case Command::support_operator:
      cfg.out = "out/support";
      break;
    case Command::moment_operator:
      cfg.M_fit = 2000;
      cfg.M_holdout = 2000;
      cfg.convergence_n = {16, 64, 256};
      cfg.out = "out/moment";
      break;
    case Command::clt:
      cfg.M_holdout = 2000;
      cfg.n_list = {1, 4, 16, 64};
      cfg.t_grid = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
      cfg.out = "out/clt";
      break;
  }
  return cfg;
}

namespace {

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::size_t get_count(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

double get_real(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return j.get<double>();
}

const std::set<std::string> kKnownKeys = {
    "generator", "depth",   "basis_size",        "tolerance",   "q",          "target_decay",
    "phi",       "psi",     "slack",             "n_list",      "t_grid",     "convergence_n",
    "M_fit",     "M_holdout", "seed_fit",        "seed_holdout", "kernel_truncation", "kernel_grid",
    "apply_grid", "scheme", "out",               "threads"};

}  // namespace

ExperimentConfig load_config(Command c, const nlohmann::json& j) {
  ExperimentConfig cfg = defaults_for(c);
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    (void)value;
  }
  try {
    if (j.contains("generator")) cfg.generator = GeneratorSpec::from_json(j["generator"]);
    if (j.contains("phi")) cfg.phi = YoungFunction::from_json(j["phi"]);
    if (j.contains("psi") && !j["psi"].is_null()) cfg.psi = YoungFunction::from_json(j["psi"]);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("depth")) cfg.depth = static_cast<int>(get_count(j["depth"], "depth"));
  if (j.contains("basis_size")) cfg.basis_size = get_count(j["basis_size"], "basis_size");
  if (j.contains("tolerance")) cfg.tolerance = get_real(j["tolerance"], "tolerance");
  if (j.contains("q")) cfg.q = get_real(j["q"], "q");
  if (j.contains("target_decay")) cfg.target_decay = get_real(j["target_decay"], "target_decay");
  if (j.contains("slack")) cfg.slack = get_real(j["slack"], "slack");
  if (j.contains("n_list")) cfg.n_list = get_as<std::vector<std::size_t>>(j["n_list"], "n_list");
  if (j.contains("t_grid")) cfg.t_grid = get_as<std::vector<double>>(j["t_grid"], "t_grid");
  if (j.contains("convergence_n")) cfg.convergence_n = get_as<std::vector<std::size_t>>(j["convergence_n"], "convergence_n");
  if (j.contains("M_fit")) cfg.M_fit = get_count(j["M_fit"], "M_fit");
  if (j.contains("M_holdout")) cfg.M_holdout = get_count(j["M_holdout"], "M_holdout");
  if (j.contains("seed_fit")) cfg.seed_fit = get_as<std::uint64_t>(j["seed_fit"], "seed_fit");
  if (j.contains("seed_holdout")) cfg.seed_holdout = get_as<std::uint64_t>(j["seed_holdout"], "seed_holdout");
  if (j.contains("kernel_truncation")) cfg.kernel_truncation = get_count(j["kernel_truncation"], "kernel_truncation");
  if (j.contains("kernel_grid")) cfg.kernel_grid = get_count(j["kernel_grid"], "kernel_grid");
  if (j.contains("apply_grid")) cfg.apply_grid = get_count(j["apply_grid"], "apply_grid");
  if (j.contains("scheme") && !j["scheme"].is_null()) cfg.scheme_path = get_as<std::string>(j["scheme"], "scheme");
  if (j.contains("out")) cfg.out = get_as<std::string>(j["out"], "out");
  if (j.contains("threads")) cfg.threads = get_count(j["threads"], "threads");
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(cfg.basis_size >= 1, "basis_size must be >= 1");
  require(cfg.tolerance > 0.0, "tolerance must be > 0");
  if (cfg.command == Command::basis) return;

  require(cfg.depth >= 1 && cfg.depth <= kMaxGenerationDepth, "depth must lie in [1, 16]");
  require(cfg.M_fit >= 1 && cfg.M_holdout >= 1, "M_fit and M_holdout must be >= 1");
  require(cfg.seed_fit != cfg.seed_holdout, "seed_fit and seed_holdout must differ");
  require(cfg.q > 0.0 && cfg.q < 1.0, "q must lie in (0,1)");
  require(cfg.target_decay > 0.0 && cfg.target_decay < 1.0, "target_decay must lie in (0,1)");
  require(cfg.slack >= 0.0, "slack must be >= 0");
  if (cfg.command == Command::support_operator) {
    require(cfg.kernel_truncation >= 2, "kernel_truncation must be >= 2");
    require(cfg.kernel_grid >= 2 && cfg.apply_grid >= 2, "kernel grids need at least 2 points");
  }
  if (cfg.command == Command::moment_operator) {
    for (auto n : cfg.convergence_n) require(n <= cfg.basis_size, "convergence_n entries must not exceed basis_size");
  }
  if (cfg.command == Command::clt) {
    require(!cfg.n_list.empty(), "n_list must not be empty");
    for (auto n : cfg.n_list) require(n >= 1, "n_list entries must be >= 1");
    require(!cfg.t_grid.empty(), "t_grid must not be empty");
    for (double t : cfg.t_grid) require(t > 0.0, "t_grid entries must be > 0");
  }
}

nlohmann::json ExperimentConfig::resolved() const {
  nlohmann::json j;
  j["command"] = to_string(command);
  j["basis_size"] = basis_size;
  j["tolerance"] = tolerance;
  if (command == Command::basis) return j;
  j["generator"] = generator.to_json();
  j["depth"] = depth;
  j["M_fit"] = M_fit;
  j["M_holdout"] = M_holdout;
  j["seed_fit"] = seed_fit;
  j["seed_holdout"] = seed_holdout;
  switch (command) {
    case Command::support_operator:
      j["q"] = q;
      j["target_decay"] = target_decay;
      j["kernel_truncation"] = kernel_truncation;
      j["kernel_grid"] = kernel_grid;
      j["apply_grid"] = apply_grid;
      break;
    case Command::moment_operator:
      j["phi"] = phi.to_json();
      j["psi"] = psi ? psi->to_json() : nlohmann::json(nullptr);
      j["slack"] = slack;
      j["convergence_n"] = convergence_n;
      break;
    case Command::clt:
      j["q"] = q;
      j["target_decay"] = target_decay;
      j["n_list"] = n_list;
      j["t_grid"] = t_grid;
      j["scheme"] = scheme_path ? nlohmann::json(scheme_path->generic_string()) : nlohmann::json(nullptr);
      break;
    default:
      break;
  }
  return j;
}

std::string ExperimentConfig::digest() const { return io::fnv1a_hex(resolved().dump()); }

}  // namespace compsupp::cli
