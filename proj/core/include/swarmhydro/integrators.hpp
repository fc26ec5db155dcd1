#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace swarmhydro {

/// Classical four-stage Runge-Kutta with a constant step.
struct Rk4Fixed {
  double dt = 1e-3;
  bool operator==(const Rk4Fixed&) const = default;
};

/// Dormand-Prince 5(4) with the max-norm error test
/// max |err| / (atol + rtol max(|y_old|, |y_new|)) <= 1.
struct Rk45Adaptive {
  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  bool operator==(const Rk45Adaptive&) const = default;
};

struct IntegratorConfig {
  std::variant<Rk4Fixed, Rk45Adaptive> method = Rk45Adaptive{};
  double output_stride = 0.1;
  // When the monitor fires, the offending step is retried with half the step
  // until [t_last_good, t_first_bad] is at most this wide. Zero disables it.
  double event_tol = 1e-6;
  bool operator==(const IntegratorConfig&) const = default;
};

void validate(const IntegratorConfig& cfg);

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Called after every accepted step; returning true stops the integration.
using MonitorFn = std::function<bool(double t, std::span<const double> y)>;

enum class Termination { ReachedEnd, MonitorStop, DtUnderflow };

const char* to_string(Termination termination) noexcept;

struct Sample {
  double t = 0.0;
  std::vector<double> y;
};

struct IntegrationResult {
  // States at t0 + k * output_stride (cubic Hermite between accepted adaptive
  // steps, linear between fixed ones), followed by the final accepted state when it is off the stride.
  std::vector<Sample> samples;
  Termination termination = Termination::ReachedEnd;
  double t_last_good = 0.0;
  // First time known to be bad (monitor fired or step collapsed); equals
  // t_last_good on ReachedEnd.
  double t_first_bad = 0.0;
  std::vector<double> y_last;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// One classical RK4 step in place.
void step_rk4(const RhsFn& rhs, double t, std::vector<double>& y, double dt);

IntegrationResult integrate_fixed(const RhsFn& rhs, std::vector<double> y0, double t0, double t_end,
                                  const Rk4Fixed& method, const IntegratorConfig& cfg,
                                  const MonitorFn& monitor = {});

IntegrationResult integrate_adaptive(const RhsFn& rhs, std::vector<double> y0, double t0,
                                     double t_end, const Rk45Adaptive& method,
                                     const IntegratorConfig& cfg, const MonitorFn& monitor = {});

IntegrationResult integrate(const RhsFn& rhs, std::vector<double> y0, double t0, double t_end,
                            const IntegratorConfig& cfg, const MonitorFn& monitor = {});

}  // namespace swarmhydro
