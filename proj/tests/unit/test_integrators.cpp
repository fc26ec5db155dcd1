#include <cmath>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "swarmhydro/integrators.hpp"

using namespace swarmhydro;
using testing::thrown_code;

namespace {

const RhsFn decay = [](double, std::span<const double> y, std::span<double> dy) {
  for (std::size_t i = 0; i < y.size(); ++i) dy[i] = -y[i];
};

double rk4_endpoint(const RhsFn& f, double y0, double t_end, double dt) {
  std::vector<double> y = {y0};
  const int steps = static_cast<int>(std::lround(t_end / dt));
  for (int k = 0; k < steps; ++k) step_rk4(f, k * dt, y, dt);
  return y[0];
}

}  // namespace

TEST_CASE("step_rk4 leaves the state alone for a zero right-hand side") {
  std::vector<double> y = {1.5, -2.0, 3.25};
  const std::vector<double> before = y;
  step_rk4([](double, std::span<const double>, std::span<double> dy) { std::fill(dy.begin(), dy.end(), 0.0); }, 0.0,
           y, 0.1);
  CHECK(y == before);
}

TEST_CASE("step_rk4 on exponential decay") {
  // One step multiplies by the degree-4 Taylor polynomial of exp(-h).
  const double h = 0.1;
  const double amp = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
  CHECK(rk4_endpoint(decay, 1.0, 1.0, h) == doctest::Approx(std::pow(amp, 10)).epsilon(1e-14));
  CHECK(std::abs(rk4_endpoint(decay, 1.0, 1.0, h) - std::exp(-1.0)) <= 5e-7);
}

TEST_CASE("rk4 convergence order on y' = cos t") {
  const RhsFn f = [](double t, std::span<const double>, std::span<double> dy) { dy[0] = std::cos(t); };
  const double exact = std::sin(2.0);
  const double e1 = std::abs(rk4_endpoint(f, 0.0, 2.0, 0.1) - exact);
  const double e2 = std::abs(rk4_endpoint(f, 0.0, 2.0, 0.05) - exact);
  CHECK(std::log2(e1 / e2) >= 3.9);
}

TEST_CASE("rk4 convergence order on a nonlinear problem") {
  const RhsFn f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0] * y[0]; };
  const double exact = 1.0 / 3.0;  // y(2) for y(0) = 1
  const double e1 = std::abs(rk4_endpoint(f, 1.0, 2.0, 0.1) - exact);
  const double e2 = std::abs(rk4_endpoint(f, 1.0, 2.0, 0.05) - exact);
  CHECK(std::log2(e1 / e2) >= 3.8);
}

TEST_CASE("adaptive integrator reaches the end on a smooth linear system") {
  IntegratorConfig cfg;
  const Rk45Adaptive m{1e-8, 1e-10, 1e-4, 1e-12, 0.5};
  cfg.method = m;
  const IntegrationResult r = integrate(decay, {1.0, 2.0}, 0.0, 5.0, cfg);
  CHECK(r.termination == Termination::ReachedEnd);
  CHECK(r.y_last[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
  CHECK(r.y_last[1] == doctest::Approx(2.0 * std::exp(-5.0)).epsilon(1e-6));
  CHECK(r.samples.front().t == 0.0);
  CHECK(r.samples.back().t == doctest::Approx(5.0));

  // Fixed RK4 reaching the same accuracy needs at least half as many steps.
  const double err = std::abs(r.y_last[0] - std::exp(-5.0));
  double dt = 0.5;
  while (dt > 1e-4 && std::abs(rk4_endpoint(decay, 1.0, 5.0, dt) - std::exp(-5.0)) > err) dt /= 1.25;
  const double fixed_steps = 5.0 / dt;
  CHECK(static_cast<double>(r.accepted) <= 2.0 * fixed_steps);
}

TEST_CASE("adaptive integrator localizes the y' = y^2 singularity") {
  const RhsFn f = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  IntegratorConfig cfg;
  const IntegrationResult r = integrate(f, {1.0}, 0.0, 2.0, cfg);
  CHECK(r.termination == Termination::DtUnderflow);
  CHECK(std::abs(r.t_last_good - 1.0) <= 1e-3);
}

TEST_CASE("monitor that always stops halts after the first step") {
  IntegratorConfig cfg;
  cfg.event_tol = 0.0;
  int calls = 0;
  const IntegrationResult r = integrate(decay, {1.0}, 0.0, 1.0, cfg, [&](double, std::span<const double>) {
    ++calls;
    return true;
  });
  CHECK(r.termination == Termination::MonitorStop);
  CHECK(r.accepted <= 1);
  CHECK(calls >= 1);
}

TEST_CASE("monitor events are bisected to event_tol") {
  IntegratorConfig cfg;
  cfg.event_tol = 1e-6;
  const IntegrationResult r = integrate(decay, {1.0}, 0.0, 5.0, cfg,
                                        [](double, std::span<const double> y) { return y[0] < 0.5; });
  CHECK(r.termination == Termination::MonitorStop);
  CHECK(r.t_first_bad - r.t_last_good <= 1e-6);
  CHECK(r.t_last_good <= std::log(2.0));
  CHECK(r.t_first_bad >= std::log(2.0) - 1e-9);
}

TEST_CASE("fixed rk4 through integrate matches manual stepping") {
  IntegratorConfig cfg;
  cfg.method = Rk4Fixed{1e-3};
  const IntegrationResult r = integrate(decay, {1.0}, 0.0, 1.0, cfg);
  CHECK(r.termination == Termination::ReachedEnd);
  CHECK(std::abs(r.y_last[0] - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("tightening rtol by 100 shrinks the error by at least 10") {
  auto err = [](double rtol) {
    IntegratorConfig cfg;
    cfg.method = Rk45Adaptive{rtol, rtol * 1e-2, 1e-3, 1e-14, 1.0};
    const IntegrationResult r = integrate(decay, {1.0}, 0.0, 5.0, cfg);
    return std::abs(r.y_last[0] - std::exp(-5.0));
  };
  CHECK(err(1e-5) >= 10.0 * err(1e-7));
}

TEST_CASE("integration is deterministic") {
  const RhsFn f = [](double t, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -std::sin(y[0]) + 0.1 * std::cos(t);
  };
  IntegratorConfig cfg;
  const IntegrationResult a = integrate(f, {1.0, 0.0}, 0.0, 10.0, cfg);
  const IntegrationResult b = integrate(f, {1.0, 0.0}, 0.0, 10.0, cfg);
  CHECK(a.accepted == b.accepted);
  CHECK(a.rejected == b.rejected);
  CHECK(a.y_last == b.y_last);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].y == b.samples[i].y);
}

TEST_CASE("invalid configurations are rejected") {
  IntegratorConfig cfg;
  cfg.output_stride = 0.0;
  CHECK(thrown_code([&] { validate(cfg); }) == ErrorCode::ValidationError);
  IntegratorConfig bad_dt;
  bad_dt.method = Rk45Adaptive{1e-8, 1e-10, 1e-4, 1.0, 0.5};
  CHECK(thrown_code([&] { validate(bad_dt); }) == ErrorCode::ValidationError);
  CHECK(thrown_code([] { integrate(decay, {1.0}, 1.0, 1.0, IntegratorConfig{}); }) == ErrorCode::ValidationError);
}
