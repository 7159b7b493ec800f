#include "compsupp/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "compsupp/errors.hpp"
#include "compsupp/franklin.hpp"
#include "compsupp/io.hpp"
#include "compsupp/parallel.hpp"
#include "compsupp/processes.hpp"
#include "compsupp/stats.hpp"

namespace compsupp {

SequenceEnsemble::SequenceEnsemble(std::size_t M, std::size_t L, std::vector<double> data,
                                   nlohmann::json seed_info)
    : m_(M), l_(L), data_(std::move(data)), seed_info_(std::move(seed_info)) {
  if (m_ == 0 || l_ == 0) throw InputError("sequence ensemble needs M >= 1 and L >= 1");
  if (data_.size() != m_ * l_) throw InputError("sequence ensemble: value count does not match M x L");
}

std::span<const double> SequenceEnsemble::sample(std::size_t i) const {
  if (i >= m_) throw DomainError("sample index out of range");
  return {data_.data() + i * l_, l_};
}

SequenceEnsemble coefficient_ensemble(const PathEnsemble& paths, const GridFrame& frame, std::size_t L,
                                      std::size_t threads) {
  if (L == 0 || L > frame.size()) throw InputError("coefficient_ensemble: L must lie in [1, basis size]");
  if (paths.depth() > frame.level()) throw InputError("coefficient_ensemble: paths finer than the frame grid");
  std::vector<double> data(paths.size() * L);
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    const auto x = frame.lift(paths.values(i), paths.depth());
    frame.analyze(x, std::span<double>(data.data() + i * L, L));
  });
  return SequenceEnsemble(paths.size(), L, std::move(data), paths.sidecar());
}

Factorization factorize(const SequenceEnsemble& ens, double q, double floor, double rho) {
  if (!(q > 0.0 && q < 1.0)) throw InputError("factorize: quantile must lie in (0,1)");
  if (!(floor > 0.0) || !std::isfinite(floor)) throw InputError("factorize: floor must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("factorize: rho must lie in (0,1)");
  const std::size_t L = ens.length();
  Factorization fac;
  fac.quantile = q;
  fac.floor = floor;
  fac.rho = rho;
  fac.envelope.resize(L);
  fac.eps.resize(L);
  std::vector<double> column(ens.size());
  for (std::size_t n = 0; n < L; ++n) {
    for (std::size_t i = 0; i < ens.size(); ++i) column[i] = std::fabs(ens.sample(i)[n]);
    fac.envelope[n] = stats::quantile(column, q);
    fac.eps[n] = std::max(std::sqrt(fac.envelope[n]), floor * std::pow(rho, static_cast<double>(n + 1)));
  }
  for (std::size_t n = L - 1; n-- > 0;) fac.eps[n] = std::max(fac.eps[n], fac.eps[n + 1]);
  return fac;
}

SequenceEnsemble eta(const SequenceEnsemble& ens, const Factorization& fac) {
  if (fac.eps.size() != ens.length()) throw InputError("eta: factorization length does not match L");
  std::vector<double> out(ens.data().begin(), ens.data().end());
  for (std::size_t i = 0; i < ens.size(); ++i) {
    for (std::size_t n = 0; n < ens.length(); ++n) out[i * ens.length() + n] /= fac.eps[n];
  }
  return SequenceEnsemble(ens.size(), ens.length(), std::move(out), ens.seed_info());
}

std::vector<double> diagonal_apply(const Factorization& fac, std::span<const double> x) {
  if (x.size() > fac.eps.size()) throw InputError("diagonal_apply: input longer than the factorization");
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = fac.eps[n] * x[n];
  return out;
}

InverseResult diagonal_inverse_apply(const Factorization& fac, std::span<const double> x) {
  if (x.size() > fac.eps.size()) throw InputError("diagonal_inverse_apply: input longer than the factorization");
  InverseResult r;
  r.values.resize(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    r.values[n] = x[n] / fac.eps[n];
    r.sup_norm = std::max(r.sup_norm, std::fabs(r.values[n]));
  }
  return r;
}

CompactnessReport compactness_diagnostic(const Factorization& fac, double threshold) {
  CompactnessReport r;
  r.threshold = threshold;
  r.tail.assign(fac.eps.size(), 0.0);
  double run = 0.0;
  for (std::size_t n = fac.eps.size(); n-- > 0;) {
    run = std::max(run, fac.eps[n]);
    r.tail[n] = run;
  }
  r.final_tail = r.tail.empty() ? 0.0 : r.tail.back();
  r.pass = !r.tail.empty() && r.final_tail <= threshold;
  return r;
}

nlohmann::json CompactnessReport::to_json() const {
  return {{"threshold", threshold}, {"final_tail", final_tail}, {"pass", pass}, {"length", tail.size()}};
}

void write_sequences(const SequenceEnsemble& ens, const std::filesystem::path& csv) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ens.size(); ++i) io::write_csv_row(out, ens.sample(i));
  io::write_text_file(csv, out.str());
  auto side = csv;
  side.replace_extension(".json");
  nlohmann::json j{{"M", ens.size()}, {"L", ens.length()}, {"seed_info", ens.seed_info()}};
  io::write_text_file(side, j.dump(2) + "\n");
}

SequenceEnsemble read_sequences(const std::filesystem::path& csv) {
  auto side = csv;
  side.replace_extension(".json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(io::read_text_file(side));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad sequence sidecar " + side.string() + ": " + e.what());
  }
  std::ifstream in(csv);
  if (!in) throw InputError("cannot open " + csv.string());
  const auto rows = io::read_numeric_csv(in, false);
  const auto M = meta.at("M").get<std::size_t>();
  const auto L = meta.at("L").get<std::size_t>();
  if (rows.size() != M) throw InputError("sequence CSV row count does not match sidecar M");
  std::vector<double> data;
  data.reserve(M * L);
  for (const auto& r : rows) {
    if (r.size() != L) throw InputError("sequence CSV row length does not match sidecar L");
    data.insert(data.end(), r.begin(), r.end());
  }
  return SequenceEnsemble(M, L, std::move(data), meta.value("seed_info", nlohmann::json{}));
}

void write_factorization(const Factorization& fac, const std::filesystem::path& csv) {
  std::ostringstream out;
  out << "n,eps\n";
  for (std::size_t n = 0; n < fac.eps.size(); ++n) {
    const double row[2] = {static_cast<double>(n + 1), fac.eps[n]};
    io::write_csv_row(out, row);
  }
  io::write_text_file(csv, out.str());
}

}  // namespace compsupp
