#pragma once

#include <span>

namespace gmf {

/// Moment summary of a sample. `variance` is the unbiased (n-1) estimator;
/// skewness and excess kurtosis use central-moment ratios m3/m2^1.5 and
/// m4/m2^2 - 3.
struct SummaryStats {
  long n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

SummaryStats summarize(std::span<const double> xs);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Weighted least squares of log y against log x (natural logs). Weights
/// default to 1; pass inverse variances of log y for an efficient fit.
/// stderr is residual-scaled (0 for a two-point fit). Throws on fewer than
/// two distinct x or nonpositive x/y.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          std::span<const double> weights = {});

double normal_cdf(double x);

/// Sup distance between the empirical CDF of the standardized sample
/// (centered by the mean, scaled by the n-1 stddev) and the standard normal
/// CDF. Requires >= 20 samples with positive variance.
double ks_normal_distance(std::span<const double> samples);

/// Asymptotic Kolmogorov critical value at significance `level` for m
/// samples: sqrt(-ln(level/2)/2) / sqrt(m).
double ks_critical_value(double level, long m);

}  // namespace gmf
