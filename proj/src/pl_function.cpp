#include "compsupp/pl_function.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "compsupp/dyadic.hpp"
#include "compsupp/errors.hpp"
#include "compsupp/io.hpp"

namespace compsupp {

PLFunction::PLFunction() : breakpoints_{0.0, 1.0}, values_{0.0, 0.0} {}

PLFunction::PLFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2) throw InputError("PLFunction needs at least two breakpoints");
  if (breakpoints_.size() != values_.size()) {
    throw InputError("PLFunction breakpoint/value length mismatch");
  }
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
    throw InputError("PLFunction breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw InputError("PLFunction breakpoints must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("PLFunction values must be finite");
  }
}

PLFunction PLFunction::constant(double c) { return PLFunction({0.0, 1.0}, {c, c}); }

PLFunction PLFunction::identity() { return PLFunction({0.0, 1.0}, {0.0, 1.0}); }

PLFunction PLFunction::on_dyadic_grid(int level, std::vector<double> values) {
  if (values.size() != dyadic_size(level)) throw InputError("on_dyadic_grid: size/level mismatch");
  return PLFunction(dyadic_points(level), std::move(values));
}

PLFunction PLFunction::interpolate(const std::function<double(double)>& f, int level) {
  auto t = dyadic_points(level);
  std::vector<double> v(t.size());
  std::transform(t.begin(), t.end(), v.begin(), f);
  return PLFunction(std::move(t), std::move(v));
}

double PLFunction::eval_unchecked(double t) const noexcept {
  if (t <= 0.0) return values_.front();
  if (t >= 1.0) return values_.back();
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto hi = static_cast<std::size_t>(it - breakpoints_.begin());
  const std::size_t lo = hi - 1;
  const double x0 = breakpoints_[lo];
  const double x1 = breakpoints_[hi];
  const double s = (t - x0) / (x1 - x0);
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

double PLFunction::operator()(double t) const { return pl_eval(*this, t); }

std::vector<double> PLFunction::sample(std::span<const double> points) const {
  std::vector<double> out(points.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = points[i];
    if (i > 0 && t < points[i - 1]) throw InputError("sample points must be increasing");
    while (seg + 2 < breakpoints_.size() && breakpoints_[seg + 1] < t) ++seg;
    const double x0 = breakpoints_[seg];
    const double x1 = breakpoints_[seg + 1];
    if (t <= x0) {
      out[i] = values_[seg];
    } else if (t >= x1) {
      out[i] = values_[seg + 1];
    } else {
      const double s = (t - x0) / (x1 - x0);
      out[i] = values_[seg] + s * (values_[seg + 1] - values_[seg]);
    }
  }
  return out;
}

PLFunction& PLFunction::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

PLFunction operator+(const PLFunction& f, const PLFunction& g) {
  auto t = merge_breakpoints(f.breakpoints(), g.breakpoints());
  auto fv = f.sample(t);
  const auto gv = g.sample(t);
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] += gv[i];
  return PLFunction(std::move(t), std::move(fv));
}

PLFunction operator-(const PLFunction& f, const PLFunction& g) {
  auto t = merge_breakpoints(f.breakpoints(), g.breakpoints());
  auto fv = f.sample(t);
  const auto gv = g.sample(t);
  for (std::size_t i = 0; i < fv.size(); ++i) fv[i] -= gv[i];
  return PLFunction(std::move(t), std::move(fv));
}

double pl_eval(const PLFunction& f, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("pl_eval: t = " + io::format_double(t) + " is outside [0,1]");
  }
  return f.eval_unchecked(t);
}

double pl_inner(const PLFunction& f, const PLFunction& g) {
  const auto t = merge_breakpoints(f.breakpoints(), g.breakpoints());
  const auto fv = f.sample(t);
  const auto gv = g.sample(t);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    const double fm = 0.5 * (fv[i] + fv[i + 1]);
    const double gm = 0.5 * (gv[i] + gv[i + 1]);
    s += h / 6.0 * (fv[i] * gv[i] + 4.0 * fm * gm + fv[i + 1] * gv[i + 1]);
  }
  return s;
}

double pl_sup_norm(const PLFunction& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_csv(std::ostream& out, const PLFunction& f) {
  out << "t,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << io::format_double(f.breakpoints()[i]) << ',' << io::format_double(f.values()[i]) << '\n';
  }
}

PLFunction read_pl_csv(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "t,value") throw InputError("PLFunction CSV must start with header 't,value'");
  std::vector<double> t, v;
  for (const auto& row : io::read_numeric_csv(in, false)) {
    if (row.size() != 2) throw InputError("PLFunction CSV rows need exactly two columns");
    t.push_back(row[0]);
    v.push_back(row[1]);
  }
  return PLFunction(std::move(t), std::move(v));
}

}  // namespace compsupp
