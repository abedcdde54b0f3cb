#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gmf {

/// Scalar function bundled with its analytic derivatives.
/// fns[k] evaluates the k-th derivative; fns[0] is the function itself.
class SmoothFn {
 public:
  SmoothFn() = default;
  SmoothFn(std::string name, std::vector<std::function<double(double)>> fns)
      : name_(std::move(name)), fns_(std::move(fns)) {}

  double operator()(double x) const { return fns_[0](x); }
  double deriv(int order, double x) const;
  int max_order() const { return static_cast<int>(fns_.size()) - 1; }
  const std::string& name() const { return name_; }
  bool empty() const { return fns_.empty(); }

  static SmoothFn constant(double c, std::string name = "const");

 private:
  std::string name_;
  std::vector<std::function<double(double)>> fns_;
};

/// Test function in the C_b^6 class: evaluation plus derivatives through
/// order 6 for the catalog entries. Composed functions (products with the
/// sensor, generator images) may carry fewer derivatives.
struct TestFunction {
  SmoothFn fn;
  bool is_polynomial = false;
  int degree = 0;  // meaningful only when is_polynomial

  double operator()(double x) const { return fn(x); }
  double deriv(int order, double x) const { return fn.deriv(order, x); }
  int max_order() const { return fn.max_order(); }
  const std::string& name() const { return fn.name(); }
};

/// Coefficients of a linear filtering model f(x) = -theta x, sigma(x) = sigma0,
/// h(x) = gamma x. Present only on models where the Kalman-Bucy solution is
/// exact.
struct LinearModelCoeffs {
  double theta;
  double sigma0;
  double gamma;
};

/// Filtering model: signal drift and diffusion, observation sensor, and the
/// initial law N(initial_mean, initial_stddev^2). Immutable after
/// construction and shareable across workers.
class Model {
 public:
  Model(std::string name, SmoothFn drift, SmoothFn diffusion, SmoothFn sensor,
        double initial_mean, double initial_stddev, double sensor_bound,
        double diffusion_bound,
        std::optional<LinearModelCoeffs> linear = std::nullopt);

  double drift(double x) const { return drift_(x); }
  double diffusion(double x) const { return diffusion_(x); }
  double sensor(double x) const { return sensor_(x); }

  const SmoothFn& drift_fn() const { return drift_; }
  const SmoothFn& diffusion_fn() const { return diffusion_; }
  const SmoothFn& sensor_fn() const { return sensor_; }

  double initial_mean() const { return initial_mean_; }
  double initial_stddev() const { return initial_stddev_; }
  double sensor_bound() const { return sensor_bound_; }
  double diffusion_bound() const { return diffusion_bound_; }
  const std::string& name() const { return name_; }
  const std::optional<LinearModelCoeffs>& linear() const { return linear_; }

 private:
  std::string name_;
  SmoothFn drift_;
  SmoothFn diffusion_;
  SmoothFn sensor_;
  double initial_mean_;
  double initial_stddev_;
  double sensor_bound_;
  double diffusion_bound_;
  std::optional<LinearModelCoeffs> linear_;
};

/// Built-in models:
///   linear_ou     f(x) = -x, sigma = 1, h(x) = x; exact Kalman-Bucy
///                 reference exists (f, h unbounded).
///   bounded_sine  f(x) = sin(x), sigma(x) = (2 + cos(x))/2, h(x) = tanh(x);
///                 bounded with bounded derivatives.
/// Throws std::invalid_argument for an unknown name.
Model make_builtin_model(const std::string& name);

/// Linear model with explicit coefficients and initial law; used by tests
/// and by the Kalman-Bucy oracle hooks (e.g. gamma = 0).
Model make_linear_model(double theta, double sigma0, double gamma,
                        double initial_mean = 0.0, double initial_stddev = 1.0);

/// Test-function catalog: one, x, x2, sin, tanh, gauss. All carry hand-coded
/// derivatives through order 6. Throws std::invalid_argument for an unknown
/// name.
TestFunction make_test_function(const std::string& name);

TestFunction make_constant_test_function(double c);

const std::vector<std::string>& test_function_catalog();
const std::vector<std::string>& model_catalog();

/// Generator of the signal diffusion applied to phi at x:
///   (A phi)(x) = f(x) phi'(x) + (1/2) sigma(x)^2 phi''(x).
double generator_apply(const Model& model, const TestFunction& phi, double x);

}  // namespace gmf
