#include "compsupp/processes.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include <fftw3.h>

#include "compsupp/dyadic.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/io.hpp"
#include "compsupp/parallel.hpp"

namespace compsupp {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::zero: return "zero";
    case GeneratorKind::brownian: return "brownian";
    case GeneratorKind::bridge: return "bridge";
    case GeneratorKind::ou: return "ou";
    case GeneratorKind::smooth_fourier: return "smooth_fourier";
    case GeneratorKind::scaled_heavy: return "scaled_heavy";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  for (auto k : {GeneratorKind::zero, GeneratorKind::brownian, GeneratorKind::bridge, GeneratorKind::ou,
                 GeneratorKind::smooth_fourier, GeneratorKind::scaled_heavy}) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown generator kind '" + name + "'");
}

GeneratorSpec GeneratorSpec::ou(double theta, double sigma) {
  GeneratorSpec s{GeneratorKind::ou};
  s.theta = theta;
  s.sigma = sigma;
  return s;
}

GeneratorSpec GeneratorSpec::smooth_fourier(double decay) {
  GeneratorSpec s{GeneratorKind::smooth_fourier};
  s.decay = decay;
  return s;
}

GeneratorSpec GeneratorSpec::scaled_heavy(GeneratorKind base, double tail_index) {
  GeneratorSpec s{GeneratorKind::scaled_heavy};
  s.base = base;
  s.tail_index = tail_index;
  return s;
}

void GeneratorSpec::validate() const {
  const auto check = [](bool ok, const char* what) {
    if (!ok) throw InputError(what);
  };
  switch (kind) {
    case GeneratorKind::ou:
      check(std::isfinite(theta) && theta > 0.0, "ou: theta must be > 0");
      check(std::isfinite(sigma) && sigma > 0.0, "ou: sigma must be > 0");
      break;
    case GeneratorKind::smooth_fourier:
      check(std::isfinite(decay) && decay > 0.5, "smooth_fourier: decay must be > 1/2");
      break;
    case GeneratorKind::scaled_heavy: {
      check(std::isfinite(tail_index) && tail_index > 0.0, "scaled_heavy: tail_index must be > 0");
      check(base != GeneratorKind::scaled_heavy && base != GeneratorKind::zero,
            "scaled_heavy: base must be a Gaussian kind");
      GeneratorSpec b = *this;
      b.kind = base;
      b.validate();
      break;
    }
    default:
      break;
  }
}

bool GeneratorSpec::is_gaussian() const { return kind != GeneratorKind::scaled_heavy; }

nlohmann::json GeneratorSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case GeneratorKind::ou:
      j["theta"] = theta;
      j["sigma"] = sigma;
      break;
    case GeneratorKind::smooth_fourier:
      j["decay"] = decay;
      break;
    case GeneratorKind::scaled_heavy: {
      j["tail_index"] = tail_index;
      GeneratorSpec b = *this;
      b.kind = base;
      j["base"] = b.to_json();
      break;
    }
    default:
      break;
  }
  return j;
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("generator spec needs a string 'kind'");
  }
  GeneratorSpec s;
  s.kind = parse_generator_kind(j["kind"].get<std::string>());
  const auto num = [&](const nlohmann::json& src, const char* key, double& out) {
    if (!src.contains(key)) return;
    if (!src[key].is_number()) throw InputError(std::string("generator parameter '") + key + "' must be a number");
    out = src[key].get<double>();
  };
  num(j, "theta", s.theta);
  num(j, "sigma", s.sigma);
  num(j, "decay", s.decay);
  num(j, "tail_index", s.tail_index);
  if (s.kind == GeneratorKind::scaled_heavy && j.contains("base")) {
    const auto& b = j["base"];
    GeneratorSpec bs = b.is_string() ? from_json(nlohmann::json{{"kind", b}}) : from_json(b);
    s.base = bs.kind;
    s.theta = bs.kind == GeneratorKind::ou ? bs.theta : s.theta;
    s.sigma = bs.kind == GeneratorKind::ou ? bs.sigma : s.sigma;
    s.decay = bs.kind == GeneratorKind::smooth_fourier ? bs.decay : s.decay;
  }
  s.validate();
  return s;
}

PathEnsemble::PathEnsemble(GeneratorSpec spec, int depth, std::uint64_t base_seed, std::size_t paths,
                           std::vector<double> values)
    : spec_(spec), depth_(depth), base_seed_(base_seed), paths_(paths), grid_size_(dyadic_size(depth)),
      data_(std::move(values)) {
  if (paths_ == 0) throw InputError("PathEnsemble needs at least one path");
  if (data_.size() != paths_ * grid_size_) throw InputError("PathEnsemble: value count does not match M x grid");
}

std::span<const double> PathEnsemble::values(std::size_t i) const {
  if (i >= paths_) throw DomainError("path index out of range");
  return {data_.data() + i * grid_size_, grid_size_};
}

std::span<double> PathEnsemble::values(std::size_t i) {
  if (i >= paths_) throw DomainError("path index out of range");
  return {data_.data() + i * grid_size_, grid_size_};
}

PLFunction PathEnsemble::path(std::size_t i) const {
  const auto v = values(i);
  return PLFunction::on_dyadic_grid(depth_, std::vector<double>(v.begin(), v.end()));
}

std::vector<double> PathEnsemble::column(std::size_t node) const {
  if (node >= grid_size_) throw DomainError("grid node out of range");
  std::vector<double> out(paths_);
  for (std::size_t i = 0; i < paths_; ++i) out[i] = data_[i * grid_size_ + node];
  return out;
}

nlohmann::json PathEnsemble::sidecar() const {
  nlohmann::json j;
  j["kind"] = to_string(spec_.kind);
  j["params"] = spec_.to_json();
  j["M"] = paths_;
  j["depth"] = depth_;
  j["base_seed"] = base_seed_;
  return j;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

using Engine = std::mt19937_64;

void brownian_into(std::span<double> out, int depth, Engine& rng, std::normal_distribution<double>& z) {
  const std::size_t n = out.size() - 1;
  out[0] = 0.0;
  out[n] = z(rng);
  for (int j = 0; j < depth; ++j) {
    const std::size_t stride = n >> j;
    const std::size_t half = stride / 2;
    const double sd = 0.5 * std::sqrt(std::ldexp(1.0, -j));
    for (std::size_t left = 0; left < n; left += stride) {
      out[left + half] = 0.5 * (out[left] + out[left + stride]) + sd * z(rng);
    }
  }
}

void ou_into(std::span<double> out, int depth, double theta, double sigma, Engine& rng,
             std::normal_distribution<double>& z) {
  const double h = dyadic_step(depth);
  const double a = std::exp(-theta * h);
  const double sd = sigma * std::sqrt(-std::expm1(-2.0 * theta * h) / (2.0 * theta));
  out[0] = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = a * out[i - 1] + sd * z(rng);
}

// Sine series sum_j Z_j j^-decay sqrt(2) sin(j pi t) at the interior nodes is a
// DST-I of length 2^depth - 1; the j = 2^depth term vanishes on the grid.
class SineSynth {
 public:
  explicit SineSynth(int depth) : n_(dyadic_size(depth) - 2) {
    if (n_ == 0) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    std::vector<double> in(n_), out(n_);
    plan_ = fftw_plan_r2r_1d(static_cast<int>(n_), in.data(), out.data(), FFTW_RODFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw ConstructionError("FFTW plan creation failed", 0.0);
  }
  ~SineSynth() {
    if (plan_ != nullptr) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
  }
  SineSynth(const SineSynth&) = delete;
  SineSynth& operator=(const SineSynth&) = delete;

  void run(std::span<double> out, double decay, Engine& rng, std::normal_distribution<double>& z) const {
    out.front() = 0.0;
    out.back() = 0.0;
    if (n_ == 0) {
      // depth 1: the single interior node t = 1/2 gets sin(pi/2) = 1 from j = 1 only.
      out[1] = std::sqrt(2.0) * z(rng);
      return;
    }
    std::vector<double> coef(n_);
    // RODFT00 computes 2 sum_j X_j sin(pi (j+1)(k+1)/(n+1)).
    for (std::size_t j = 0; j < n_; ++j) {
      coef[j] = z(rng) * std::pow(static_cast<double>(j + 1), -decay) * (std::sqrt(2.0) / 2.0);
    }
    fftw_execute_r2r(plan_, coef.data(), out.data() + 1);
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  std::size_t n_;
  fftw_plan plan_ = nullptr;
};

void check_args(const GeneratorSpec& spec, std::size_t M, int depth) {
  spec.validate();
  if (M == 0) throw InputError("ensemble size M must be >= 1");
  if (depth < 1 || depth > kMaxGenerationDepth) throw InputError("depth must lie in [1, 16]");
}

void fill_path(const GeneratorSpec& spec, GeneratorKind kind, std::span<double> out, int depth, Engine& rng,
               std::normal_distribution<double>& z, const SineSynth* sines) {
  switch (kind) {
    case GeneratorKind::zero:
      std::fill(out.begin(), out.end(), 0.0);
      break;
    case GeneratorKind::brownian:
      brownian_into(out, depth, rng, z);
      break;
    case GeneratorKind::bridge: {
      brownian_into(out, depth, rng, z);
      const double end = out.back();
      const double h = dyadic_step(depth);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= static_cast<double>(i) * h * end;
      out.back() = 0.0;
      break;
    }
    case GeneratorKind::ou:
      ou_into(out, depth, spec.theta, spec.sigma, rng, z);
      break;
    case GeneratorKind::smooth_fourier:
      sines->run(out, spec.decay, rng, z);
      break;
    case GeneratorKind::scaled_heavy: {
      fill_path(spec, spec.base, out, depth, rng, z, sines);
      // Pareto(x_m = 1, alpha): U^(-1/alpha) with U in (0, 1].
      const double u = 1.0 - std::generate_canonical<double, 53>(rng);
      const double scale = std::pow(u, -1.0 / spec.tail_index);
      for (double& v : out) v *= scale;
      break;
    }
  }
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t copy, std::uint64_t path) {
  std::uint64_t s = splitmix64(base_seed);
  s = splitmix64(s ^ splitmix64(copy + 0x5851F42D4C957F2DULL));
  s = splitmix64(s ^ splitmix64(path + 0x14057B7EF767814FULL));
  return s;
}

PathEnsemble generate_copy(const GeneratorSpec& spec, std::size_t copy, std::size_t M, int depth,
                           std::uint64_t base_seed, std::size_t threads) {
  check_args(spec, M, depth);
  const std::size_t g = dyadic_size(depth);
  std::vector<double> data(M * g);
  const GeneratorKind effective = spec.kind == GeneratorKind::scaled_heavy ? spec.base : spec.kind;
  std::unique_ptr<SineSynth> sines;
  if (effective == GeneratorKind::smooth_fourier) sines = std::make_unique<SineSynth>(depth);
  parallel_for(M, threads, [&](std::size_t i) {
    Engine rng(stream_seed(base_seed, copy, i));
    std::normal_distribution<double> z;
    fill_path(spec, spec.kind, std::span<double>(data.data() + i * g, g), depth, rng, z, sines.get());
  });
  return PathEnsemble(spec, depth, base_seed, M, std::move(data));
}

PathEnsemble generate(const GeneratorSpec& spec, std::size_t M, int depth, std::uint64_t base_seed,
                      std::size_t threads) {
  return generate_copy(spec, 0, M, depth, base_seed, threads);
}

std::vector<PathEnsemble> iid_copies(const GeneratorSpec& spec, std::size_t n, std::size_t M, int depth,
                                     std::uint64_t base_seed, std::size_t threads) {
  if (n == 0) throw InputError("iid_copies needs n >= 1");
  std::vector<PathEnsemble> out;
  out.reserve(n);
  for (std::size_t c = 0; c < n; ++c) out.push_back(generate_copy(spec, c, M, depth, base_seed, threads));
  return out;
}

void write_ensemble(const PathEnsemble& ens, const std::filesystem::path& csv) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ens.size(); ++i) io::write_csv_row(out, ens.values(i));
  io::write_text_file(csv, out.str());
  auto side = csv;
  side.replace_extension(".json");
  io::write_text_file(side, ens.sidecar().dump(2) + "\n");
}

PathEnsemble read_ensemble(const std::filesystem::path& csv) {
  auto side = csv;
  side.replace_extension(".json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(io::read_text_file(side));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad ensemble sidecar " + side.string() + ": " + e.what());
  }
  const auto spec = GeneratorSpec::from_json(meta.at("params"));
  const int depth = meta.at("depth").get<int>();
  const auto M = meta.at("M").get<std::size_t>();
  const auto seed = meta.at("base_seed").get<std::uint64_t>();
  std::ifstream in(csv);
  if (!in) throw InputError("cannot open " + csv.string());
  const auto rows = io::read_numeric_csv(in, false);
  if (rows.size() != M) throw InputError("ensemble CSV row count does not match sidecar M");
  std::vector<double> data;
  data.reserve(M * dyadic_size(depth));
  for (const auto& r : rows) {
    if (r.size() != dyadic_size(depth)) throw InputError("ensemble CSV row length does not match depth");
    data.insert(data.end(), r.begin(), r.end());
  }
  return PathEnsemble(spec, depth, seed, M, std::move(data));
}

}  // namespace compsupp
