#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace compsupp::stats {

/// Empirical q-quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). Throws InputError on an empty sample or q outside [0,1].
double quantile(std::span<const double> sample, double q);

/// Same, for a sample already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> sample);

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than 2 values.
double variance(std::span<const double> sample);

double correlation(std::span<const double> x, std::span<const double> y);

/// Fraction of values strictly greater than t.
double exceedance(std::span<const double> sample, double t);

struct KsResult {
  double statistic;  // sup |F_a - F_b|
  double p_value;    // asymptotic Kolmogorov tail with small-sample correction
};

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

}  // namespace compsupp::stats
