#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "compsupp/blockop.hpp"
#include "compsupp/clt.hpp"
#include "compsupp/dyadic.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/franklin.hpp"
#include "compsupp/io.hpp"
#include "compsupp/orlicz.hpp"
#include "compsupp/parallel.hpp"
#include "compsupp/processes.hpp"

namespace compsupp::cli {

namespace {

void write_json(const ExperimentConfig& cfg, const std::string& name, const nlohmann::json& j) {
  io::write_text_file(cfg.out / name, j.dump(2) + "\n");
}

nlohmann::json report_header(const ExperimentConfig& cfg) {
  return {{"config", cfg.resolved()}, {"digest", cfg.digest()}};
}

std::vector<double> uniform_grid(std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

std::string pad(std::size_t i, int width) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

int cmd_basis(const ExperimentConfig& cfg, std::ostream& log) {
  const auto basis = FranklinBasis::build(cfg.basis_size, cfg.tolerance);
  const int width = std::max<int>(3, static_cast<int>(std::to_string(cfg.basis_size).size()));
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::string name = "phi_" + pad(i + 1, width) + ".csv";
    std::ostringstream out;
    write_csv(out, basis.function(i));
    io::write_text_file(cfg.out / name, out.str());
    files.push_back(name);
  }
  const int hat_level = std::min(basis.grid_depth(), 5);
  const auto probes = default_franklin_probes(hat_level, std::max(basis.grid_depth(), hat_level));
  const double cf = estimate_franklin_constant(basis, probes);

  auto manifest = report_header(cfg);
  manifest["n"] = basis.size();
  manifest["grid_depth"] = basis.grid_depth();
  manifest["gram_defect"] = basis.gram_defect();
  manifest["files"] = files;
  write_json(cfg, "manifest.json", manifest);

  auto report = report_header(cfg);
  report["gram_defect"] = basis.gram_defect();
  report["tolerance"] = cfg.tolerance;
  report["orthonormal"] = basis.gram_defect() <= cfg.tolerance;
  report["franklin_constant_estimate"] = cf;
  report["franklin_probes"] = probes.size();
  write_json(cfg, "orthonormality.json", report);
  log << "basis: n=" << basis.size() << " gram_defect=" << io::format_double(basis.gram_defect()) << "\n";
  return kOk;
}

int cmd_support_operator(const ExperimentConfig& cfg, std::ostream& log) {
  const auto basis = FranklinBasis::build(cfg.basis_size, cfg.tolerance);
  const auto fit = generate(cfg.generator, cfg.M_fit, cfg.depth, cfg.seed_fit, cfg.threads);
  const auto holdout = generate(cfg.generator, cfg.M_holdout, cfg.depth, cfg.seed_holdout, cfg.threads);

  const auto scheme = select_blocks(fit, basis, cfg.q, cfg.target_decay, cfg.threads);
  write_json(cfg, "scheme.json", scheme.to_json());

  const auto verification = verify_support(holdout, basis, scheme, cfg.threads);
  const auto bilateral = scheme.K() >= 2 ? std::optional(verify_bilateral(scheme)) : std::nullopt;

  const auto small = truncate_scheme(scheme, std::min(cfg.kernel_truncation, scheme.truncation()));
  const auto ks = kernel(basis, small, uniform_grid(cfg.kernel_grid));
  io::write_text_file(cfg.out / "kernel.csv", kernel_csv(ks));
  const auto spectral = kernel_checks(ks);
  const auto fine = kernel(basis, small, uniform_grid(cfg.apply_grid));
  const auto applied = kernel_checks(fine, basis, small, PLFunction::identity());

  // Trapezoid error of the kernel integral, not a fixed 1e-4: the fitted
  // weights make R larger than in the unit-weight example.
  const double apply_tol = 1e-12 + *applied.apply_quadrature_bound * (1.0 + 1e-9);
  const bool kernel_ok = spectral.max_asymmetry <= 1e-12 && spectral.min_eigenvalue >= -1e-8 &&
                         *applied.apply_discrepancy <= apply_tol;
  const bool pass = verification.pass && kernel_ok;

  auto report = report_header(cfg);
  report["scheme"] = {{"K", scheme.K()}, {"N", scheme.N()}, {"w", scheme.w()}, {"truncation", scheme.truncation()}};
  report["verification"] = verification.to_json();
  if (bilateral) {
    report["bilateral"] = {{"violations", bilateral->violations}, {"clamped", bilateral->clamped},
                           {"rows", bilateral->rows.size()}, {"note", "diagnostic only"}};
    write_json(cfg, "bilateral.json", bilateral->to_json());
  }
  report["kernel"] = {{"truncation", ks.truncation},
                      {"grid", cfg.kernel_grid},
                      {"max_asymmetry", spectral.max_asymmetry},
                      {"min_eigenvalue", spectral.min_eigenvalue},
                      {"max_eigenvalue", spectral.max_eigenvalue},
                      {"apply_grid", cfg.apply_grid},
                      {"apply_discrepancy", *applied.apply_discrepancy},
                      {"apply_quadrature_bound", *applied.apply_quadrature_bound},
                      {"pass", kernel_ok}};
  report["pass"] = pass;
  write_json(cfg, "support_report.json", report);
  log << "support-operator: K=" << scheme.K() << " coverage=" << io::format_double(verification.coverage)
      << " finite=" << io::format_double(verification.finite_fraction) << (pass ? " pass" : " FAIL") << "\n";
  return pass ? kOk : kVerification;
}

int cmd_moment_operator(const ExperimentConfig& cfg, std::ostream& log) {
  const auto d2 = delta2_check(cfg.phi);
  const bool use_psi = !d2.holds();
  if (use_psi && !cfg.psi) {
    throw ConfigError(cfg.phi.name() + " is not in Delta2; a weaker Young function psi is required");
  }
  const YoungFunction norm = use_psi ? *cfg.psi : cfg.phi;

  const auto basis = FranklinBasis::build(cfg.basis_size, cfg.tolerance);
  const auto fit = generate(cfg.generator, cfg.M_fit, cfg.depth, cfg.seed_fit, cfg.threads);
  const auto holdout = generate(cfg.generator, cfg.M_holdout, cfg.depth, cfg.seed_holdout, cfg.threads);

  auto report = report_header(cfg);
  report["delta2"] = d2.to_json();
  report["route"] = use_psi ? "psi" : "phi";
  report["selection_norm"] = norm.name();
  if (cfg.psi) report["psi_weaker_than_phi"] = weaker_than_check(*cfg.psi, cfg.phi).to_json();
  if (!cfg.convergence_n.empty()) {
    report["convergence"] = moment_convergence_report(fit, basis, norm, cfg.convergence_n, cfg.threads).to_json();
  }

  const auto scheme = select_moment_blocks(fit, basis, norm, cfg.threads);
  write_json(cfg, "moment_scheme.json", scheme.to_json());
  const auto bound = verify_moment_bound(holdout, basis, scheme, norm, cfg.slack, cfg.threads);
  report["scheme"] = {{"K", scheme.K()}, {"N", scheme.N()}, {"w", scheme.w()}};
  report["bound"] = bound.to_json();
  report["pass"] = bound.pass;
  write_json(cfg, "moment_report.json", report);
  log << "moment-operator: route=" << (use_psi ? "psi" : "phi") << " ratio=" << io::format_double(bound.ratio)
      << (bound.pass ? " pass" : " FAIL") << "\n";
  return bound.pass ? kOk : kVerification;
}

int cmd_clt(const ExperimentConfig& cfg, std::ostream& log) {
  const auto basis = FranklinBasis::build(cfg.basis_size, cfg.tolerance);
  auto report = report_header(cfg);

  std::optional<BlockScheme> scheme;
  if (cfg.scheme_path) {
    const auto text = io::read_text_file(*cfg.scheme_path);
    try {
      scheme = BlockScheme::from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("cannot parse scheme file: " + std::string(e.what()));
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    report["scheme_source"] = {{"path", cfg.scheme_path->generic_string()}, {"digest", io::fnv1a_hex(text)}};
  } else {
    const auto fit = generate(cfg.generator, cfg.M_fit, cfg.depth, cfg.seed_fit, cfg.threads);
    scheme = select_blocks(fit, basis, cfg.q, cfg.target_decay, cfg.threads);
    write_json(cfg, "scheme.json", scheme->to_json());
    report["scheme_source"] = {{"fitted", true}};
  }
  if (scheme->truncation() > basis.size()) throw ConfigError("scheme truncation exceeds basis_size");

  const auto harness = tightness_harness(cfg.generator, *scheme, basis, cfg.n_list, cfg.t_grid, cfg.M_holdout,
                                         cfg.depth, cfg.seed_holdout, cfg.seed_fit, cfg.threads);
  io::write_text_file(cfg.out / "coverage.csv", harness.coverage_csv());
  report["tightness"] = harness.to_json();

  const auto single = generate(cfg.generator, cfg.M_holdout, cfg.depth, cfg.seed_holdout, cfg.threads);
  const auto norms = sup_norms(single);
  bool tail_ok = true;
  if (*std::max_element(norms.begin(), norms.end()) > 0.0) {
    const auto diag = tail_diagnostic(norms, auto_tail_grid(norms));
    report["tail_diagnostic"] = diag.to_json();
    tail_ok = !diag.non_vanishing;
  } else {
    report["tail_diagnostic"] = {{"note", "all sup norms are zero"}, {"non_vanishing", false}};
  }

  bool invariance_ok = true;
  if (cfg.generator.is_gaussian() && cfg.generator.kind != GeneratorKind::zero) {
    const auto inv = gaussian_invariance_test(cfg.generator, *std::min_element(cfg.n_list.begin(), cfg.n_list.end()),
                                              *std::max_element(cfg.n_list.begin(), cfg.n_list.end()), cfg.M_holdout,
                                              cfg.depth, cfg.seed_holdout, cfg.threads);
    report["gaussian_invariance"] = inv.to_json();
    invariance_ok = inv.pass;
  }

  const bool pass = harness.coverage_holds && tail_ok && invariance_ok;
  report["pass"] = pass;
  write_json(cfg, "tightness_report.json", report);
  log << "clt: K_hat=" << io::format_double(harness.K_hat) << " coverage=" << (harness.coverage_holds ? "ok" : "FAIL")
      << " tail=" << (tail_ok ? "ok" : "FAIL") << " invariance=" << (invariance_ok ? "ok" : "FAIL") << "\n";
  return pass ? kOk : kVerification;
}

int run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    validate(cfg);
    switch (cfg.command) {
      case Command::basis: return cmd_basis(cfg, log);
      case Command::support_operator: return cmd_support_operator(cfg, log);
      case Command::moment_operator: return cmd_moment_operator(cfg, log);
      case Command::clt: return cmd_clt(cfg, log);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const PartialSchemeError& e) {
    err << "construction failure: " << e.what() << "\n";
    try {
      auto dump = nlohmann::json{{"config", cfg.resolved()}, {"digest", cfg.digest()}, {"progress", e.progress()}};
      io::write_text_file(cfg.out / "partial_scheme.json", dump.dump(2) + "\n");
    } catch (const std::exception& w) {
      err << "could not write partial scheme: " << w.what() << "\n";
    }
    return kConstruction;
  } catch (const ConstructionError& e) {
    err << "construction failure: " << e.what() << " (achieved " << io::format_double(e.achieved()) << ")\n";
    return kConstruction;
  }
  return kUsage;
}

}  // namespace compsupp::cli
