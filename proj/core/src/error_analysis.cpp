#include "gmf/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmf {

double rescaled_error(long n, double epsilon, double rho_n, double rho_ref) {
  if (!std::isfinite(rho_n) || !std::isfinite(rho_ref))
    throw std::invalid_argument("rescaled_error needs finite inputs");
  return std::pow(static_cast<double>(n), epsilon) * (rho_n - rho_ref);
}

namespace {

double binom(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i)
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// k-th derivative of u*v by the Leibniz rule.
double leibniz(const SmoothFn& u, const SmoothFn& v, int k, double x) {
  double acc = 0.0;
  for (int i = 0; i <= k; ++i)
    acc += binom(k, i) * u.deriv(i, x) * v.deriv(k - i, x);
  return acc;
}

}  // namespace

TestFunction generator_compose(const Model& model, const TestFunction& phi) {
  if (phi.max_order() < 2)
    throw std::invalid_argument("generator needs phi in C^2");
  const SmoothFn f = model.drift_fn();
  const SmoothFn s = model.diffusion_fn();
  const SmoothFn p = phi.fn;
  const int max_k = std::min({f.max_order(), s.max_order(),
                              phi.max_order() - 2});
  std::vector<std::function<double(double)>> fns;
  for (int k = 0; k <= max_k; ++k) {
    fns.push_back([f, s, p, k](double x) {
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) {
        const double c = binom(k, i);
        // (sigma^2)^(i) by Leibniz on sigma*sigma
        acc += c * f.deriv(i, x) * p.deriv(1 + k - i, x);
        acc += 0.5 * c * leibniz(s, s, i, x) * p.deriv(2 + k - i, x);
      }
      return acc;
    });
  }
  TestFunction out;
  out.fn = SmoothFn("A[" + phi.name() + "]", std::move(fns));
  out.is_polynomial = phi.is_polynomial && model.linear().has_value();
  out.degree = phi.degree;
  return out;
}

TestFunction sensor_product(const Model& model, const TestFunction& phi) {
  const SmoothFn h = model.sensor_fn();
  const SmoothFn p = phi.fn;
  const int max_k = std::min(h.max_order(), phi.max_order());
  std::vector<std::function<double(double)>> fns;
  for (int k = 0; k <= max_k; ++k)
    fns.push_back([h, p, k](double x) { return leibniz(h, p, k, x); });
  TestFunction out;
  out.fn = SmoothFn("h[" + phi.name() + "]", std::move(fns));
  out.is_polynomial = phi.is_polynomial && model.linear().has_value();
  out.degree = phi.degree + 1;
  return out;
}

double zakai_residual_series(std::span<const double> rho_phi,
                             std::span<const double> rho_gen,
                             std::span<const double> rho_sens,
                             const ObservationPath& obs) {
  const std::size_t nt = static_cast<std::size_t>(obs.grid.steps) + 1;
  if (rho_phi.size() != nt || rho_gen.size() != nt || rho_sens.size() != nt)
    throw std::invalid_argument("series must cover every grid time");
  const double dt = obs.grid.dt;
  double integral = 0.0;
  double residual = 0.0;
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    integral += rho_gen[k] * dt + rho_sens[k] * obs.increments[k];
    residual =
        std::max(residual, std::abs(rho_phi[k + 1] - rho_phi[0] - integral));
  }
  return residual;
}

double zakai_residual(const FilterTrajectory& traj,
                      const std::string& phi_name,
                      const ObservationPath& obs) {
  const int ip = traj.phi_index(phi_name);
  const int ig = traj.phi_index("A[" + phi_name + "]");
  const int is = traj.phi_index("h[" + phi_name + "]");
  if (ip < 0 || ig < 0 || is < 0)
    throw std::invalid_argument("missing recorded functionals for " +
                                phi_name);
  if (traj.times.size() != static_cast<std::size_t>(obs.grid.steps) + 1)
    throw std::invalid_argument(
        "trajectory must be recorded at every substep");
  return zakai_residual_series(traj.rho[static_cast<std::size_t>(ip)],
                               traj.rho[static_cast<std::size_t>(ig)],
                               traj.rho[static_cast<std::size_t>(is)], obs);
}

double variance_contribution_gap(const FilterState& state,
                                 const TestFunction& phi) {
  return std::abs(state.pi(phi) - state.pi_point_mass(phi));
}

double sup_abs_second_derivative(const TestFunction& phi) {
  if (phi.max_order() < 2)
    throw std::invalid_argument("phi needs a second derivative");
  double sup = 0.0;
  const int n = 16001;
  for (int i = 0; i < n; ++i) {
    const double x = -8.0 + 16.0 * static_cast<double>(i) /
                                static_cast<double>(n - 1);
    sup = std::max(sup, std::abs(phi.deriv(2, x)));
  }
  return sup;
}

double variance_gap_bound(const Model& model, const FilterConfig& cfg,
                          const TestFunction& phi) {
  const double sig = model.diffusion_bound();
  return 0.5 * sup_abs_second_derivative(phi) * cfg.alpha *
         (cfg.beta + sig * sig * cfg.grid.correction_interval);
}

}  // namespace gmf
