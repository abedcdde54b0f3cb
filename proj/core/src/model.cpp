#include "gmf/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmf {

double SmoothFn::deriv(int order, double x) const {
  if (order < 0 || order > max_order())
    throw std::invalid_argument("derivative order " + std::to_string(order) +
                                " not available for " + name_);
  return fns_[static_cast<std::size_t>(order)](x);
}

SmoothFn SmoothFn::constant(double c, std::string name) {
  std::vector<std::function<double(double)>> fns;
  fns.push_back([c](double) { return c; });
  for (int k = 1; k <= 6; ++k) fns.push_back([](double) { return 0.0; });
  return SmoothFn(std::move(name), std::move(fns));
}

Model::Model(std::string name, SmoothFn drift, SmoothFn diffusion,
             SmoothFn sensor, double initial_mean, double initial_stddev,
             double sensor_bound, double diffusion_bound,
             std::optional<LinearModelCoeffs> linear)
    : name_(std::move(name)),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      sensor_(std::move(sensor)),
      initial_mean_(initial_mean),
      initial_stddev_(initial_stddev),
      sensor_bound_(sensor_bound),
      diffusion_bound_(diffusion_bound),
      linear_(linear) {
  if (initial_stddev_ < 0.0)
    throw std::invalid_argument("initial_stddev must be >= 0");
}

namespace {

SmoothFn linear_fn(std::string name, double slope) {
  return SmoothFn(std::move(name),
                  {[slope](double x) { return slope * x; },
                   [slope](double) { return slope; },
                   [](double) { return 0.0; },
                   [](double) { return 0.0; },
                   [](double) { return 0.0; },
                   [](double) { return 0.0; },
                   [](double) { return 0.0; }});
}

SmoothFn sin_fn() {
  return SmoothFn("sin", {[](double x) { return std::sin(x); },
                          [](double x) { return std::cos(x); },
                          [](double x) { return -std::sin(x); },
                          [](double x) { return -std::cos(x); },
                          [](double x) { return std::sin(x); },
                          [](double x) { return std::cos(x); },
                          [](double x) { return -std::sin(x); }});
}

// sigma(x) = 1 + cos(x)/2, range [1/2, 3/2]
SmoothFn bounded_sigma_fn() {
  return SmoothFn("half_2pluscos",
                  {[](double x) { return 1.0 + 0.5 * std::cos(x); },
                   [](double x) { return -0.5 * std::sin(x); },
                   [](double x) { return -0.5 * std::cos(x); },
                   [](double x) { return 0.5 * std::sin(x); },
                   [](double x) { return 0.5 * std::cos(x); },
                   [](double x) { return -0.5 * std::sin(x); },
                   [](double x) { return -0.5 * std::cos(x); }});
}

// Derivatives of tanh as polynomials in u = tanh(x); u' = 1 - u^2.
SmoothFn tanh_fn() {
  return SmoothFn(
      "tanh",
      {[](double x) { return std::tanh(x); },
       [](double x) {
         double u = std::tanh(x);
         return 1.0 - u * u;
       },
       [](double x) {
         double u = std::tanh(x);
         return -2.0 * u * (1.0 - u * u);
       },
       [](double x) {
         double u = std::tanh(x), s = 1.0 - u * u;
         return s * (6.0 * u * u - 2.0);
       },
       [](double x) {
         double u = std::tanh(x), s = 1.0 - u * u;
         return s * (16.0 * u - 24.0 * u * u * u);
       },
       [](double x) {
         double u = std::tanh(x), s = 1.0 - u * u, u2 = u * u;
         return s * (120.0 * u2 * u2 - 120.0 * u2 + 16.0);
       },
       [](double x) {
         double u = std::tanh(x), s = 1.0 - u * u, u2 = u * u;
         return s * (-720.0 * u2 * u2 * u + 960.0 * u2 * u - 272.0 * u);
       }});
}

// g(x) = exp(-x^2/2); g^(k)(x) = (-1)^k He_k(x) g(x) with He_k the
// probabilists' Hermite polynomials.
SmoothFn gauss_bump_fn() {
  auto g = [](double x) { return std::exp(-0.5 * x * x); };
  return SmoothFn(
      "gauss",
      {g,
       [g](double x) { return -x * g(x); },
       [g](double x) { return (x * x - 1.0) * g(x); },
       [g](double x) { return -(x * x * x - 3.0 * x) * g(x); },
       [g](double x) {
         double x2 = x * x;
         return (x2 * x2 - 6.0 * x2 + 3.0) * g(x);
       },
       [g](double x) {
         double x2 = x * x;
         return -(x2 * x2 * x - 10.0 * x2 * x + 15.0 * x) * g(x);
       },
       [g](double x) {
         double x2 = x * x, x4 = x2 * x2;
         return (x4 * x2 - 15.0 * x4 + 45.0 * x2 - 15.0) * g(x);
       }});
}

SmoothFn x_squared_fn() {
  return SmoothFn("x2", {[](double x) { return x * x; },
                         [](double x) { return 2.0 * x; },
                         [](double) { return 2.0; },
                         [](double) { return 0.0; },
                         [](double) { return 0.0; },
                         [](double) { return 0.0; },
                         [](double) { return 0.0; }});
}

}  // namespace

Model make_linear_model(double theta, double sigma0, double gamma,
                        double initial_mean, double initial_stddev) {
  return Model("linear_ou", linear_fn("minus_theta_x", -theta),
               SmoothFn::constant(sigma0), linear_fn("gamma_x", gamma),
               initial_mean, initial_stddev,
               std::numeric_limits<double>::infinity(), std::abs(sigma0),
               LinearModelCoeffs{theta, sigma0, gamma});
}

Model make_builtin_model(const std::string& name) {
  if (name == "linear_ou") return make_linear_model(1.0, 1.0, 1.0);
  if (name == "bounded_sine")
    return Model("bounded_sine", sin_fn(), bounded_sigma_fn(), tanh_fn(),
                 /*initial_mean=*/0.0, /*initial_stddev=*/1.0,
                 /*sensor_bound=*/1.0, /*diffusion_bound=*/1.5);
  throw std::invalid_argument("unknown model: " + name);
}

TestFunction make_constant_test_function(double c) {
  return TestFunction{SmoothFn::constant(c), true, 0};
}

TestFunction make_test_function(const std::string& name) {
  if (name == "one")
    return TestFunction{SmoothFn::constant(1.0, "one"), true, 0};
  if (name == "x") return TestFunction{linear_fn("x", 1.0), true, 1};
  if (name == "x2") return TestFunction{x_squared_fn(), true, 2};
  if (name == "sin") return TestFunction{sin_fn(), false, 0};
  if (name == "tanh") return TestFunction{tanh_fn(), false, 0};
  if (name == "gauss") return TestFunction{gauss_bump_fn(), false, 0};
  throw std::invalid_argument("unknown test function: " + name);
}

const std::vector<std::string>& test_function_catalog() {
  static const std::vector<std::string> names = {"one", "x",    "x2",
                                                 "sin", "tanh", "gauss"};
  return names;
}

const std::vector<std::string>& model_catalog() {
  static const std::vector<std::string> names = {"linear_ou", "bounded_sine"};
  return names;
}

double generator_apply(const Model& model, const TestFunction& phi, double x) {
  if (phi.max_order() < 2)
    throw std::invalid_argument("generator_apply needs phi in C^2");
  double s = model.diffusion(x);
  return model.drift(x) * phi.deriv(1, x) + 0.5 * s * s * phi.deriv(2, x);
}

}  // namespace gmf
