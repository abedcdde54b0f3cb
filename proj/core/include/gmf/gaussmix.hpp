#pragma once

#include <span>
#include <vector>

#include "gmf/model.hpp"

namespace gmf {

/// Gaussian measure on R; variance 0 denotes the Dirac mass at the mean.
struct GaussianMeasure {
  double mean = 0.0;
  double variance = 0.0;
};

struct MixtureComponent {
  double weight = 0.0;  // normalised, >= 0
  GaussianMeasure measure;
};

/// Convex combination of Gaussian measures; weights sum to 1 within 1e-12.
struct WeightedMixture {
  std::vector<MixtureComponent> components;

  void validate() const;  // throws std::invalid_argument on violation
};

/// E[phi(v + sqrt(w) Z)], Z standard normal, via 20-node Gauss-Hermite
/// quadrature; exact for polynomials up to degree 39 modulo rounding.
/// Branches to phi(v) for the Dirac case w = 0. Throws on w < 0.
double gauss_expect(const GaussianMeasure& m, const TestFunction& phi);

/// Same quadrature for an arbitrary callable (no TestFunction wrapper).
double gauss_expect_fn(const GaussianMeasure& m,
                       const std::function<double(double)>& f);

double mixture_expect(const WeightedMixture& mix, const TestFunction& phi);

/// Variance-stripped evaluation sum_j w_j phi(v_j).
double point_mass_expect(const WeightedMixture& mix, const TestFunction& phi);

/// The embedded 20-point Gauss-Hermite rule (physicists' convention,
/// weight exp(-x^2)); exposed for tests.
std::span<const double> gauss_hermite_nodes();
std::span<const double> gauss_hermite_weights();

}  // namespace gmf
