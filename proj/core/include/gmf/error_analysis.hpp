#pragma once

#include <span>
#include <string>

#include "gmf/filter.hpp"
#include "gmf/model.hpp"
#include "gmf/paths.hpp"

namespace gmf {

/// n^epsilon * (rho_n - rho_ref); throws on non-finite inputs.
double rescaled_error(long n, double epsilon, double rho_n, double rho_ref);

/// A phi = f phi' + sigma^2 phi'' / 2, named "A[<phi>]". Derivatives are
/// assembled by the Leibniz rule from the stored tables of the model and of
/// phi (orders 0..min(model order, phi order - 2)), so integrands stay exact
/// rather than finite-differenced.
TestFunction generator_compose(const Model& model, const TestFunction& phi);

/// h * phi, named "h[<phi>]"; derivatives by the Leibniz rule through
/// min(model order, phi order).
TestFunction sensor_product(const Model& model, const TestFunction& phi);

/// Discrete Zakai defect of a rho series on the observation grid: the
/// maximum over grid times t of
///   |rho_t(phi) - rho_0(phi) - sum_{s<t} rho_s(A phi) dt
///                            - sum_{s<t} rho_s(h phi) dY_s|
/// with left-point (Ito) sums. Series must have one entry per grid time.
double zakai_residual_series(std::span<const double> rho_phi,
                             std::span<const double> rho_gen,
                             std::span<const double> rho_sens,
                             const ObservationPath& obs);

/// Same defect for a filter trajectory recorded at every substep with
/// phi, "A[<phi>]" and "h[<phi>]" among its functionals.
double zakai_residual(const FilterTrajectory& traj, const std::string& phi_name,
                      const ObservationPath& obs);

/// |mixture_expect(pi_n, phi) - point_mass_expect(pi_n, phi)|: what the
/// component variances contribute to the approximation.
double variance_contribution_gap(const FilterState& state,
                                 const TestFunction& phi);

/// Numerical sup of |phi''| over [-8, 8]; all catalog functions attain
/// their supremum inside that range.
double sup_abs_second_derivative(const TestFunction& phi);

/// Taylor bound on the gap: ||phi''||_inf * alpha * (beta +
/// ||sigma||_inf^2 * delta) / 2, using the model's diffusion bound.
double variance_gap_bound(const Model& model, const FilterConfig& cfg,
                          const TestFunction& phi);

}  // namespace gmf
