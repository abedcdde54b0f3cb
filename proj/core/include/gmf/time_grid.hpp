#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace gmf {

/// Equidistant time grid on [0, T] with substep dt and correction interval
/// delta. delta must be an integer multiple of dt, T an integer multiple of
/// delta, and dt <= delta/10 so substeps resolve the dynamics between
/// corrections.
struct TimeGrid {
  double dt = 0.0;
  double horizon = 0.0;              // T
  double correction_interval = 0.0;  // delta
  long steps = 0;                    // T/dt
  long steps_per_correction = 0;     // delta/dt
  long corrections = 0;              // N = T/delta

  static TimeGrid create(double dt, double delta, double horizon) {
    auto as_integer_ratio = [](double num, double den, const char* what) {
      double r = num / den;
      long k = std::lround(r);
      if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-9 * r)
        throw std::invalid_argument(std::string(what) +
                                    " must be an integer ratio");
      return k;
    };
    if (!(dt > 0.0) || !(delta > 0.0) || !(horizon > 0.0))
      throw std::invalid_argument("grid requires dt, delta, T > 0");
    TimeGrid g;
    g.dt = dt;
    g.horizon = horizon;
    g.correction_interval = delta;
    g.steps_per_correction = as_integer_ratio(delta, dt, "delta/dt");
    g.corrections = as_integer_ratio(horizon, delta, "T/delta");
    g.steps = g.steps_per_correction * g.corrections;
    if (g.steps_per_correction < 10)
      throw std::invalid_argument("dt must be <= delta/10");
    return g;
  }

  double time_at(long k) const { return static_cast<double>(k) * dt; }

  bool is_correction_step(long k) const {
    return k > 0 && k % steps_per_correction == 0;
  }

  bool operator==(const TimeGrid& o) const {
    return dt == o.dt && horizon == o.horizon &&
           correction_interval == o.correction_interval;
  }
};

}  // namespace gmf
