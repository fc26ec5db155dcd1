#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "swarmhydro/hydro.hpp"

using namespace swarmhydro;
using testing::thrown_code;

namespace {

LagrangianState cosine_state(double c, std::size_t n = 200, double mass = 1.0) {
  const Grid g = build_grid(n, -0.75, 0.75);
  InitProfile p;
  p.mass = mass;
  p.velocity = SineC{c, 1.5};
  return make_state(g, init_profiles(p, g));
}

// Support wider than the grid, so every node carries mass.
LagrangianState wide_state(double c) {
  const Grid g = build_grid(200, -0.75, 0.75);
  InitProfile p;
  p.shape = CosineBump{1.7};
  p.velocity = LinearC{c};
  return make_state(g, init_profiles(p, g));
}

HydroModel cs_model(double beta = 0.5, std::optional<PotentialSpec> pot = std::nullopt) {
  HydroModel m;
  m.alignment = HydroAlignment::CS;
  m.kernel = CommunicationKernel{beta};
  m.potential = pot;
  return m;
}

IntegratorConfig rk4(double dt, double stride) {
  IntegratorConfig c;
  c.method = Rk4Fixed{dt};
  c.output_stride = stride;
  return c;
}

}  // namespace

TEST_CASE("build_grid examples") {
  const Grid g = build_grid(200, -0.75, 0.75);
  CHECK(g.x.front() == -0.75);
  CHECK(g.x.back() == 0.75);
  CHECK(g.dx == doctest::Approx(1.5 / 199).epsilon(1e-15));
  const Grid two = build_grid(2, 0.0, 1.0);
  CHECK(two.x == std::vector<double>{0.0, 1.0});
  const Grid wide = build_grid(200, -1.0, 6.5);
  CHECK(wide.dx == doctest::Approx(7.5 / 199).epsilon(1e-15));
  CHECK(wide.x[1] - wide.x[0] == doctest::Approx(7.5 / 199).epsilon(1e-12));
  CHECK(thrown_code([] { build_grid(1, 0.0, 1.0); }) == ErrorCode::ValidationError);
  CHECK(thrown_code([] { build_grid(10, 1.0, 0.0); }) == ErrorCode::ValidationError);
}

TEST_CASE("init_profiles normalizes the mass") {
  const Grid g = build_grid(200, -0.75, 0.75);
  for (double m : {0.2, 1.0, 3.0}) {
    InitProfile p;
    p.mass = m;
    const InitialData d = init_profiles(p, g);
    double sum = 0.0;
    for (double r : d.rho0) sum += r;
    CHECK(std::abs(g.dx * sum - m) <= 1e-12);
    CHECK(d.mass == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("init_profiles velocity shapes") {
  const Grid g = build_grid(200, -0.75, 0.75);
  InitProfile p;
  p.velocity = LinearC{0.9};
  const InitialData lin = init_profiles(p, g);
  for (std::size_t i = 0; i < g.x.size(); ++i) CHECK(lin.v0[i] == doctest::Approx(-0.9 * g.x[i]));
  p.velocity = SineC{0.4, 1.5};
  p.velocity_offset = 0.1;
  const InitialData sine = init_profiles(p, g);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    CHECK(sine.v0[i] == doctest::Approx(-0.4 * std::sin(std::numbers::pi * g.x[i] / 1.5) + 0.1));
  }
}

TEST_CASE("cosine density at the grid edge is vacuum") {
  const Grid g = build_grid(200, -0.75, 0.75);
  const InitialData d = init_profiles(InitProfile{}, g);
  CHECK(d.rho0.front() == 0.0);
  CHECK(d.rho0.back() == 0.0);
  CHECK(d.rho0[100] > 0.0);
}

TEST_CASE("floor is added after normalization") {
  const Grid g = build_grid(200, -0.75, 0.75);
  InitProfile p;
  p.floor = 0.05;
  const InitialData d = init_profiles(p, g);
  double sum = 0.0;
  for (double r : d.rho0) sum += r;
  CHECK(d.mass == doctest::Approx(g.dx * sum).epsilon(1e-12));
  CHECK(d.mass == doctest::Approx(1.0 + 0.05 * 200 * g.dx).epsilon(1e-12));
  CHECK(d.rho0.front() == doctest::Approx(0.05));
}

TEST_CASE("two-group density keeps the particle mass ratio") {
  const Grid g = build_grid(200, -1.0, 6.5);
  InitProfile p;
  p.shape = PiecewiseTwoGroup{10.0};
  p.velocity = TwoGroupC{0.1};
  const InitialData d = init_profiles(p, g);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    if (g.x[i] <= 1.0) m1 += d.rho0[i] * g.dx;
    else if (g.x[i] >= 5.5) m2 += d.rho0[i] * g.dx;
    else CHECK(d.rho0[i] == 0.0);
  }
  CHECK(std::abs(m1 / m2 - 10.0) <= 1e-10);
  CHECK(std::abs(m1 + m2 - 1.0) <= 1e-12);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    if (g.x[i] <= 1.0) CHECK(d.v0[i] >= 0.0);
    if (g.x[i] >= 5.5) CHECK(d.v0[i] <= 0.0);
  }
}

TEST_CASE("zero-mass profiles are rejected") {
  const Grid g = build_grid(20, -1.0, 1.0);
  InitProfile p;
  p.shape = TabulatedDensity{std::vector<double>(20, 0.0)};
  CHECK(thrown_code([&] { init_profiles(p, g); }) == ErrorCode::ZeroMass);
}

TEST_CASE("deta_dx examples") {
  const Grid g = build_grid(200, -0.75, 0.75);
  for (double d : deta_dx(g.x, g.dx)) CHECK(std::abs(d - 1.0) <= 1e-12);

  const Grid u = build_grid(200, 0.0, 1.0);
  std::vector<double> sq(u.x.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u.x[i] * u.x[i];
  const std::vector<double> d = deta_dx(sq, u.dx);
  for (std::size_t i = 0; i < sq.size(); ++i) CHECK(std::abs(d[i] - 2.0 * u.x[i]) <= 1e-10);

  CHECK(thrown_code([] { deta_dx(std::vector<double>(6, 0.0), 0.1); }) == ErrorCode::DomainError);
}

TEST_CASE("deta_dx converges at fourth order") {
  auto err = [](std::size_t n) {
    const Grid g = build_grid(n, 0.0, 2.0);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(g.x[i]);
    const std::vector<double> d = deta_dx(s, g.dx);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - std::cos(g.x[i])));
    return e;
  };
  CHECK(std::log2(err(41) / err(81)) >= 3.8);
  CHECK(std::log2(err(81) / err(161)) >= 3.8);
}

TEST_CASE("uniform velocity produces no alignment") {
  LagrangianState s = cosine_state(0.0);
  std::fill(s.v.begin(), s.v.end(), 0.7);
  for (HydroAlignment a : {HydroAlignment::CS, HydroAlignment::MT}) {
    HydroModel m = cs_model();
    m.alignment = a;
    const HydroDerivative d = hydro_rhs(s, m);
    for (double dv : d.dv) CHECK(std::abs(dv) <= 1e-15);
    CHECK(d.deta == s.v);
  }
}

TEST_CASE("two-node alignment sum") {
  const double dx = 0.5;
  const std::vector<double> rho0 = {0.5 / dx, 0.5 / dx};
  const std::vector<double> y = {0.0, 0.5, 1.0, -1.0};
  std::vector<double> dy(4);
  hydro_rhs(cs_model(0.0), rho0, dx, y, dy);
  CHECK(dy[2] == doctest::Approx(0.5 * (-1.0 - 1.0)));
  CHECK(dy[3] == doctest::Approx(0.5 * (1.0 + 1.0)));

  HydroModel mt = cs_model(0.0);
  mt.alignment = HydroAlignment::MT;
  hydro_rhs(mt, rho0, dx, y, dy);
  CHECK(dy[2] == doctest::Approx(0.5 * (-2.0) / 1.0));
}

TEST_CASE("vacuum nodes exert no force") {
  const double dx = 0.5;
  const std::vector<double> rho0 = {1.0, 0.0, 1.0};
  const std::vector<double> y = {0.0, 0.5, 1.0, 0.0, 5.0, 0.0};
  std::vector<double> dy(6);
  HydroModel m = cs_model(0.0, LogQuadratic{});
  hydro_rhs(m, rho0, dx, y, dy);
  CHECK(dy[3] == doctest::Approx(0.0));
  CHECK(dy[5] == doctest::Approx(0.0));
  // Node 1 carries no mass but is still pushed by its neighbours.
  CHECK(dy[4] == doctest::Approx(dx * (0.0 - 5.0) * 2.0 + 0.0));
}

TEST_CASE("linear damping decays exactly") {
  LagrangianState s = cosine_state(0.3);
  HydroModel m;
  m.alignment = HydroAlignment::LinearDamping;
  const std::vector<double> v0 = s.v;
  const HydroRun r = simulate_hydro(m, s, 1.0, rk4(1e-3, 0.5));
  REQUIRE(!r.blew_up);
  for (std::size_t i = 0; i < v0.size(); ++i) {
    CHECK(std::abs(r.final_state.v[i] - v0[i] * std::exp(-1.0)) < 1e-10);
    if (std::abs(v0[i]) > 1e-3) CHECK(std::abs(r.final_state.v[i] / v0[i] - std::exp(-1.0)) <= 1e-8);
  }
}

TEST_CASE("density_reconstruct examples") {
  LagrangianState s = cosine_state(0.0);
  const std::vector<double> h = density_reconstruct(s);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == doctest::Approx(s.rho0[i]).epsilon(1e-12));
  for (double& e : s.eta) e *= 2.0;
  const std::vector<double> h2 = density_reconstruct(s);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h2[i] == doctest::Approx(s.rho0[i] / 2.0).epsilon(1e-12));
  LagrangianState c = cosine_state(0.0);
  c.eta[100] = c.eta[101];
  c.eta[99] = c.eta[101];
  c.eta[102] = c.eta[101];
  CHECK(thrown_code([&] { density_reconstruct(c); }) == ErrorCode::JacobianCollapse);
}

TEST_CASE("free transport keeps the density") {
  LagrangianState s = cosine_state(0.0);
  std::fill(s.v.begin(), s.v.end(), 1.0);
  HydroModel m;
  m.alignment = HydroAlignment::None;
  const HydroRun r = simulate_hydro(m, s, 2.0, IntegratorConfig{});
  REQUIRE(!r.blew_up);
  const std::vector<double> h = density_reconstruct(r.final_state);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(h[i] - s.rho0[i]) <= 1e-12);
}

TEST_CASE("blow_up_monitor") {
  const LagrangianState s = cosine_state(0.2);
  CHECK(!blow_up_monitor(s, MonitorThresholds{}).triggered());

  std::vector<double> jac(s.rho0.size(), 1.0);
  jac[57] = 1e-9;
  const MonitorVerdict v = blow_up_monitor(jac, s.rho0, s.rho0, 1e-6, 1e6);
  CHECK(v.cause == TriggerCause::Jacobian);
  CHECK(v.node == 57);

  std::vector<double> h = s.rho0;
  h[100] = 2e6;
  const MonitorVerdict dv = blow_up_monitor(std::vector<double>(h.size(), 1.0), h, s.rho0, 1e-6, 1e6);
  CHECK(dv.cause == TriggerCause::Density);
  CHECK(dv.node == 100);
}

TEST_CASE("velocity_diameter_on_support") {
  LagrangianState s = cosine_state(0.0, 21);
  std::fill(s.v.begin(), s.v.end(), 0.4);
  CHECK(velocity_diameter_on_support(s) == 0.0);
  for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] = -1.0 + 2.0 * i / (s.v.size() - 1.0);
  // The two endpoints are vacuum, so the diameter is taken over the interior.
  const double inner = s.v[s.v.size() - 2] - s.v[1];
  CHECK(velocity_diameter_on_support(s) == doctest::Approx(inner));
  s.rho0.assign(s.rho0.size(), 1.0);
  CHECK(velocity_diameter_on_support(s) == doctest::Approx(2.0));
}

TEST_CASE("Eulerian mass stays close to the Lagrangian mass") {
  const HydroRun r = simulate_hydro(cs_model(), cosine_state(0.4), 5.0, IntegratorConfig{});
  REQUIRE(!r.blew_up);
  for (const HydroDiagnostics& d : r.series) CHECK(std::abs(d.mass - 1.0) <= 0.01);
}

TEST_CASE("CS momentum is conserved with an even potential") {
  const HydroRun r =
      simulate_hydro(cs_model(0.5, NewtonianConfined1D{-0.5, 1.0}), wide_state(0.2), 2.0, IntegratorConfig{});
  REQUIRE(!r.blew_up);
  const double p0 = r.series.front().momentum;
  for (const HydroDiagnostics& d : r.series) CHECK(std::abs(d.momentum - p0) <= 1e-6 * (1.0 + d.t));
}

TEST_CASE("odd-symmetric data stay symmetric") {
  const HydroRun r = simulate_hydro(cs_model(0.5, NewtonianConfined1D{-0.5, 0.0}), cosine_state(0.6), 2.0,
                                    IntegratorConfig{}, {}, {0.5, 1.0, 2.0});
  for (const LagrangianState& s : r.snapshots) {
    const std::size_t n = s.eta.size();
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(s.eta[i] + s.eta[n - 1 - i]) <= 1e-9);
  }
}

TEST_CASE("Galilean shift") {
  const double w = 0.3;
  const LagrangianState base = cosine_state(0.2);
  LagrangianState moved = base;
  for (double& v : moved.v) v += w;
  const HydroModel m = cs_model();
  const HydroRun a = simulate_hydro(m, base, 2.0, rk4(1e-3, 0.5));
  const HydroRun b = simulate_hydro(m, moved, 2.0, rk4(1e-3, 0.5));
  for (std::size_t i = 0; i < base.eta.size(); ++i) {
    CHECK(std::abs(b.final_state.eta[i] - a.final_state.eta[i] - w * 2.0) <= 1e-9);
  }
}

TEST_CASE("simulate_hydro reports a blow-up interval and stops at the trigger") {
  const HydroRun r = simulate_hydro(cs_model(), cosine_state(0.5), 20.0, IntegratorConfig{});
  CHECK(r.blew_up);
  CHECK(r.blow_up_lo <= r.blow_up_hi);
  CHECK(r.blow_up_hi - r.blow_up_lo <= 1e-5);
  CHECK(r.cause != TriggerCause::None);
  CHECK(r.final_state.t == doctest::Approx(r.blow_up_lo));
}

TEST_CASE("MT stays finite with far vacuum nodes") {
  const Grid g = build_grid(120, -1.0, 6.5);
  InitProfile p;
  p.shape = PiecewiseTwoGroup{10.0};
  p.velocity = TwoGroupC{0.1};
  HydroModel m = cs_model();
  m.alignment = HydroAlignment::MT;
  const HydroRun r = simulate_hydro(m, make_state(g, init_profiles(p, g)), 3.0, IntegratorConfig{});
  CHECK(!r.blew_up);
  for (double v : r.final_state.v) CHECK(std::isfinite(v));
}
