#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace compsupp {

/// Continuous piecewise-linear function on [0,1], stored exactly as its
/// breakpoints and the values there. Breakpoints are strictly increasing and
/// start at 0 and end at 1.
class PLFunction {
 public:
  /// The zero function.
  PLFunction();

  /// Throws InputError when the breakpoint/value lists violate the invariants.
  PLFunction(std::vector<double> breakpoints, std::vector<double> values);

  static PLFunction constant(double c);
  static PLFunction identity();
  /// Nodal values on the uniform dyadic grid with 2^level + 1 points.
  static PLFunction on_dyadic_grid(int level, std::vector<double> values);
  /// Interpolant of f on the uniform dyadic grid of the given level.
  static PLFunction interpolate(const std::function<double(double)>& f, int level);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return breakpoints_.size(); }

  /// Evaluation without the domain check (clamps to [0,1]).
  double eval_unchecked(double t) const noexcept;
  double operator()(double t) const;

  /// Values at an arbitrary increasing list of points in [0,1].
  std::vector<double> sample(std::span<const double> points) const;

  PLFunction& operator*=(double a);
  friend PLFunction operator*(double a, PLFunction f) { return f *= a; }
  friend PLFunction operator+(const PLFunction& f, const PLFunction& g);
  friend PLFunction operator-(const PLFunction& f, const PLFunction& g);

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// f(t); throws DomainError for t outside [0,1].
double pl_eval(const PLFunction& f, double t);

/// Exact integral of f*g over [0,1]: the product is piecewise quadratic on the
/// merged breakpoint set, so Simpson's rule per segment is exact.
double pl_inner(const PLFunction& f, const PLFunction& g);

/// max |f|, attained at a breakpoint.
double pl_sup_norm(const PLFunction& f);

/// Sorted union of two breakpoint sets.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b);

/// CSV with header `t,value`.
void write_csv(std::ostream& out, const PLFunction& f);
PLFunction read_pl_csv(std::istream& in);

}  // namespace compsupp
