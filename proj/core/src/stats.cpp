#include "gmf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gmf {

SummaryStats summarize(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("empty sample");
  SummaryStats s;
  s.n = static_cast<long>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(s.n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(s.n);
  s.mean = mean;
  s.variance = s.n > 1 ? m2 / (n - 1.0) : 0.0;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  return s;
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          std::span<const double> weights) {
  if (x.size() != y.size() || (!weights.empty() && weights.size() != x.size()))
    throw std::invalid_argument("mismatched fit inputs");
  const std::size_t m = x.size();
  if (m < 2) throw std::invalid_argument("degenerate x-values");
  std::vector<double> lx(m), ly(m), w(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("log-log fit requires positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    if (!weights.empty()) {
      if (!(weights[i] > 0.0))
        throw std::invalid_argument("weights must be positive");
      w[i] = weights[i];
    }
  }
  if (*std::max_element(lx.begin(), lx.end()) -
          *std::min_element(lx.begin(), lx.end()) <
      1e-12)
    throw std::invalid_argument("degenerate x-values");

  double W = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    W += w[i];
    sx += w[i] * lx[i];
    sy += w[i] * ly[i];
    sxx += w[i] * lx[i] * lx[i];
    sxy += w[i] * lx[i] * ly[i];
  }
  const double det = W * sxx - sx * sx;
  SlopeFit fit;
  fit.slope = (W * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  if (m > 2) {
    // residual-scaled stderr under Var(ly_i) = s^2 / w_i
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = ly[i] - fit.intercept - fit.slope * lx[i];
      rss += w[i] * r * r;
    }
    const double s2 = rss / static_cast<double>(m - 2);
    fit.slope_stderr = std::sqrt(s2 * W / det);
  }
  return fit;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_normal_distance(std::span<const double> samples) {
  if (samples.size() < 20)
    throw std::invalid_argument("need at least 20 samples");
  SummaryStats s = summarize(samples);
  if (!(s.variance > 0.0)) throw std::invalid_argument("zero variance");
  const double sd = std::sqrt(s.variance);
  std::vector<double> z(samples.begin(), samples.end());
  for (auto& v : z) v = (v - s.mean) / sd;
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double c = normal_cdf(z[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / m - c));
    d = std::max(d, std::abs(static_cast<double>(i) / m - c));
  }
  return d;
}

double ks_critical_value(double level, long m) {
  if (!(level > 0.0) || level >= 1.0)
    throw std::invalid_argument("level must be in (0, 1)");
  if (m < 1) throw std::invalid_argument("need at least one sample");
  return std::sqrt(-0.5 * std::log(level / 2.0)) /
         std::sqrt(static_cast<double>(m));
}

}  // namespace gmf
