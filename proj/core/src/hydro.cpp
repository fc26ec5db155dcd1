#include "swarmhydro/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "swarmhydro/error.hpp"

namespace swarmhydro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Cosine tails that land on a root of the profile come out as ~1e-17 instead
// of zero; snap them so vacuum nodes really carry no mass.
double snap_positive(double value) { return value > 1e-14 ? value : 0.0; }

double cosine_piece(double x, double center, double scale) {
  return snap_positive(std::cos(std::numbers::pi * (x - center) / scale));
}

double dx_sum(const std::vector<double>& values, double dx) {
  double s = 0.0;
  for (double v : values) s += v;
  return dx * s;
}

std::vector<double> jacobian_and_density(const LagrangianState& state, std::vector<double>& h) {
  std::vector<double> J = deta_dx(state.eta, state.dx);
  h.assign(J.size(), 0.0);
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (state.rho0[i] > 0.0) h[i] = state.rho0[i] / J[i];
  }
  return J;
}

LagrangianState state_from(const LagrangianState& ref, double t, std::span<const double> y) {
  LagrangianState s;
  const std::size_t n = ref.rho0.size();
  s.t = t;
  s.eta.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  s.v.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
  s.rho0 = ref.rho0;
  s.dx = ref.dx;
  jacobian_and_density(s, s.h);
  return s;
}

}  // namespace

const char* to_string(HydroAlignment alignment) noexcept {
  switch (alignment) {
    case HydroAlignment::CS: return "CS";
    case HydroAlignment::MT: return "MT";
    case HydroAlignment::LinearDamping: return "LinearDamping";
    case HydroAlignment::None: return "None";
  }
  return "Unknown";
}

const char* to_string(TriggerCause cause) noexcept {
  switch (cause) {
    case TriggerCause::None: return "None";
    case TriggerCause::Jacobian: return "Jacobian";
    case TriggerCause::Density: return "Density";
    case TriggerCause::StepSize: return "StepSize";
    case TriggerCause::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

void validate(const HydroModel& model) {
  if (model.pressure_eps && !(*model.pressure_eps > 0.0)) {
    fail(ErrorCode::ValidationError, "pressure eps must be > 0");
  }
  if (!(model.kernel.beta >= 0.0)) fail(ErrorCode::ValidationError, "beta must be >= 0");
}

Grid build_grid(std::size_t n, double xl, double xr) {
  if (n < 2) fail(ErrorCode::ValidationError, "grid needs at least two nodes");
  if (!(xl < xr)) fail(ErrorCode::ValidationError, "grid interval must satisfy xl < xr");
  Grid g;
  g.dx = (xr - xl) / static_cast<double>(n - 1);
  g.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.x[i] = xl + (xr - xl) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.x.back() = xr;
  return g;
}

InitialData init_profiles(const InitProfile& profile, const Grid& grid) {
  const std::size_t n = grid.x.size();
  if (!(profile.mass > 0.0)) fail(ErrorCode::ValidationError, "mass must be > 0");
  if (!(profile.floor >= 0.0)) fail(ErrorCode::ValidationError, "floor must be >= 0");
  InitialData out;
  out.rho0.assign(n, 0.0);

  std::visit(
      overloaded{
          [&](const CosineBump& b) {
            for (std::size_t i = 0; i < n; ++i) out.rho0[i] = cosine_piece(grid.x[i], 0.0, b.scale);
            const double m = dx_sum(out.rho0, grid.dx);
            if (!(m > 0.0)) fail(ErrorCode::ZeroMass, "density profile has zero mass on the grid");
            for (double& r : out.rho0) r *= profile.mass / m;
          },
          [&](const PiecewiseTwoGroup& p) {
            std::vector<double> g1(n, 0.0), g2(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
              const double x = grid.x[i];
              if (x >= -1.0 && x <= 1.0) g1[i] = cosine_piece(x, 0.0, 2.0);
              if (x >= 5.5 && x <= 6.5) g2[i] = cosine_piece(x, 6.0, 1.0);
            }
            const double m1 = dx_sum(g1, grid.dx);
            const double m2 = dx_sum(g2, grid.dx);
            if (!(m1 > 0.0) || !(m2 > 0.0)) {
              fail(ErrorCode::ZeroMass, "a two-group piece has zero mass on the grid");
            }
            const double w1 = profile.mass * p.mass_ratio / (p.mass_ratio + 1.0);
            const double w2 = profile.mass / (p.mass_ratio + 1.0);
            for (std::size_t i = 0; i < n; ++i) out.rho0[i] = g1[i] * w1 / m1 + g2[i] * w2 / m2;
          },
          [&](const TabulatedDensity& t) {
            if (t.values.size() != n) fail(ErrorCode::ValidationError, "tabulated density size mismatch");
            for (std::size_t i = 0; i < n; ++i) {
              if (!(t.values[i] >= 0.0)) fail(ErrorCode::ValidationError, "density must be >= 0");
              out.rho0[i] = t.values[i];
            }
            const double m = dx_sum(out.rho0, grid.dx);
            if (!(m > 0.0)) fail(ErrorCode::ZeroMass, "density profile has zero mass on the grid");
            for (double& r : out.rho0) r *= profile.mass / m;
          },
      },
      profile.shape);

  if (profile.floor > 0.0) {
    for (double& r : out.rho0) r += profile.floor;
  }
  out.mass = dx_sum(out.rho0, grid.dx);

  out.v0.assign(n, 0.0);
  std::visit(overloaded{
                 [&](const SineC& s) {
                   for (std::size_t i = 0; i < n; ++i) {
                     out.v0[i] = -s.c * std::sin(std::numbers::pi * grid.x[i] / s.scale);
                   }
                 },
                 [&](const LinearC& l) {
                   for (std::size_t i = 0; i < n; ++i) out.v0[i] = -l.c * grid.x[i];
                 },
                 [&](const TwoGroupC& g) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x[i];
                     if (x >= -1.0 && x <= 1.0) out.v0[i] = g.c * cosine_piece(x, 0.0, 2.0);
                     if (x >= 5.5 && x <= 6.5) out.v0[i] = -g.c * cosine_piece(x, 6.0, 1.0);
                   }
                 },
                 [&](const TabulatedVelocity& t) {
                   if (t.values.size() != n) {
                     fail(ErrorCode::ValidationError, "tabulated velocity size mismatch");
                   }
                   out.v0 = t.values;
                 },
             },
             profile.velocity);
  for (double& v : out.v0) v += profile.velocity_offset;
  return out;
}

LagrangianState make_state(const Grid& grid, const InitialData& data) {
  if (data.rho0.size() != grid.x.size() || data.v0.size() != grid.x.size()) {
    fail(ErrorCode::ValidationError, "initial data size does not match the grid");
  }
  LagrangianState s;
  s.eta = grid.x;
  s.v = data.v0;
  s.rho0 = data.rho0;
  s.h = data.rho0;
  s.dx = grid.dx;
  return s;
}

std::vector<double> deta_dx(std::span<const double> eta, double dx) {
  const std::size_t n = eta.size();
  if (n < 7) fail(ErrorCode::DomainError, "deta_dx needs at least 7 nodes");
  std::vector<double> d(n);
  const double inv = 1.0 / (12.0 * dx);
  d[0] = (-25.0 * eta[0] + 48.0 * eta[1] - 36.0 * eta[2] + 16.0 * eta[3] - 3.0 * eta[4]) * inv;
  d[1] = (-3.0 * eta[0] - 10.0 * eta[1] + 18.0 * eta[2] - 6.0 * eta[3] + eta[4]) * inv;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (-eta[i + 2] + 8.0 * eta[i + 1] - 8.0 * eta[i - 1] + eta[i - 2]) * inv;
  }
  const std::size_t m = n - 1;
  d[m - 1] = (3.0 * eta[m] + 10.0 * eta[m - 1] - 18.0 * eta[m - 2] + 6.0 * eta[m - 3] - eta[m - 4]) * inv;
  d[m] = (25.0 * eta[m] - 48.0 * eta[m - 1] + 36.0 * eta[m - 2] - 16.0 * eta[m - 3] + 3.0 * eta[m - 4]) * inv;
  return d;
}

std::vector<bool> support_closure(std::span<const double> rho0) {
  const std::size_t n = rho0.size();
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (rho0[i] > 0.0) {
      mask[i] = true;
      if (i > 0) mask[i - 1] = true;
      if (i + 1 < n) mask[i + 1] = true;
    }
  }
  return mask;
}

void hydro_rhs(const HydroModel& model, std::span<const double> rho0, double dx,
               std::span<const double> y, std::span<double> dydt) {
  const std::size_t n = rho0.size();
  const double* eta = y.data();
  const double* v = y.data() + n;
  double* deta = dydt.data();
  double* dv = dydt.data() + n;
  const bool nonlocal_align =
      model.alignment == HydroAlignment::CS || model.alignment == HydroAlignment::MT;
  const bool has_force = model.potential.has_value() || model.pressure_eps.has_value();
  const bool singular = model.potential && !regular_at_origin(*model.potential);

  for (std::size_t i = 0; i < n; ++i) {
    deta[i] = v[i];
    double align = 0.0;
    double weight = 0.0;
    double force = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double rj = rho0[j];
      if (rj == 0.0) continue;
      const double z = eta[i] - eta[j];
      if (nonlocal_align) {
        const double w = rj * model.kernel(z);
        weight += w;
        if (j != i) align += w * (v[j] - v[i]);
      }
      if (has_force && j != i) {
        if (z == 0.0 && singular) {
          fail(ErrorCode::SingularForce, "two nodes coincide under a singular potential");
        }
        double g = 0.0;
        if (model.potential && z != 0.0) g += potential_grad(*model.potential, z);
        if (model.pressure_eps) g += mollified_pressure_grad(*model.pressure_eps, z);
        force += rj * g;
      }
    }
    double acc = 0.0;
    switch (model.alignment) {
      case HydroAlignment::CS: acc = dx * align; break;
      case HydroAlignment::MT: acc = align / weight; break;
      case HydroAlignment::LinearDamping: acc = -v[i]; break;
      case HydroAlignment::None: break;
    }
    dv[i] = acc - dx * force;
  }
}

HydroDerivative hydro_rhs(const LagrangianState& state, const HydroModel& model) {
  const std::size_t n = state.eta.size();
  std::vector<double> y(2 * n), dy(2 * n);
  std::copy(state.eta.begin(), state.eta.end(), y.begin());
  std::copy(state.v.begin(), state.v.end(), y.begin() + static_cast<std::ptrdiff_t>(n));
  hydro_rhs(model, state.rho0, state.dx, y, dy);
  HydroDerivative d;
  d.deta.assign(dy.begin(), dy.begin() + static_cast<std::ptrdiff_t>(n));
  d.dv.assign(dy.begin() + static_cast<std::ptrdiff_t>(n), dy.end());
  return d;
}

std::vector<double> density_reconstruct(const LagrangianState& state, double jacobian_floor) {
  const std::vector<double> J = deta_dx(state.eta, state.dx);
  const std::vector<bool> mask = support_closure(state.rho0);
  std::vector<double> h(J.size(), 0.0);
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (!mask[i]) continue;
    if (!(J[i] > jacobian_floor)) {
      fail(ErrorCode::JacobianCollapse, "flow-map Jacobian collapsed at node " + std::to_string(i));
    }
    h[i] = state.rho0[i] / J[i];
  }
  return h;
}

MonitorVerdict blow_up_monitor(std::span<const double> jacobian, std::span<const double> h,
                               std::span<const double> rho0, double jacobian_floor,
                               double density_cap) {
  const std::vector<bool> mask = support_closure(rho0);
  MonitorVerdict verdict;
  double worst_j = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < jacobian.size(); ++i) {
    if (!mask[i]) continue;
    if (!std::isfinite(jacobian[i]) || !std::isfinite(h[i])) {
      return {TriggerCause::NonFinite, i, jacobian[i]};
    }
    if (jacobian[i] <= jacobian_floor && jacobian[i] < worst_j) {
      worst_j = jacobian[i];
      verdict = {TriggerCause::Jacobian, i, jacobian[i]};
    }
  }
  if (verdict.triggered()) return verdict;
  double worst_h = -1.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (mask[i] && h[i] >= density_cap && h[i] > worst_h) {
      worst_h = h[i];
      verdict = {TriggerCause::Density, i, h[i]};
    }
  }
  return verdict;
}

MonitorVerdict blow_up_monitor(const LagrangianState& state, const MonitorThresholds& thresholds) {
  std::vector<double> h;
  const std::vector<double> J = jacobian_and_density(state, h);
  double cap = std::numeric_limits<double>::infinity();
  if (thresholds.density_cap) {
    cap = *thresholds.density_cap;
  } else {
    const double h0 = *std::max_element(state.rho0.begin(), state.rho0.end());
    cap = thresholds.density_cap_factor * h0;
  }
  return blow_up_monitor(J, h, state.rho0, thresholds.jacobian_floor, cap);
}

double velocity_diameter_on_support(const LagrangianState& state) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.v.size(); ++i) {
    if (state.rho0[i] > 0.0) {
      lo = std::min(lo, state.v[i]);
      hi = std::max(hi, state.v[i]);
    }
  }
  return hi >= lo ? hi - lo : 0.0;
}

HydroDiagnostics hydro_diagnostics(const LagrangianState& state) {
  HydroDiagnostics d;
  d.t = state.t;
  std::vector<double> h;
  const std::vector<double> J = jacobian_and_density(state, h);
  const std::vector<bool> mask = support_closure(state.rho0);
  const std::size_t n = state.eta.size();
  d.min_jacobian = std::numeric_limits<double>::infinity();
  std::size_t first = n, last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) {
      d.min_jacobian = std::min(d.min_jacobian, J[i]);
      d.max_density = std::max(d.max_density, h[i]);
    }
    d.sup_speed = std::max(d.sup_speed, std::abs(state.v[i]));
    if (state.rho0[i] > 0.0) {
      first = std::min(first, i);
      last = i;
      d.momentum += state.rho0[i] * state.v[i];
    }
  }
  d.momentum *= state.dx;
  if (first < n) {
    d.support_left = state.eta[first];
    d.support_right = state.eta[last];
  }
  d.rv_support = velocity_diameter_on_support(state);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d.mass += 0.5 * (h[i] + h[i + 1]) * (state.eta[i + 1] - state.eta[i]);
  }
  return d;
}

HydroRun simulate_hydro(const HydroModel& model, const LagrangianState& state0, double t_end,
                        const IntegratorConfig& cfg, const MonitorThresholds& thresholds,
                        const std::vector<double>& snapshot_times) {
  validate(model);
  const std::size_t n = state0.eta.size();
  if (state0.v.size() != n || state0.rho0.size() != n) {
    fail(ErrorCode::ValidationError, "state arrays have mismatched sizes");
  }
  std::vector<double> h0;
  jacobian_and_density(state0, h0);
  const double cap = thresholds.density_cap
                         ? *thresholds.density_cap
                         : thresholds.density_cap_factor * *std::max_element(h0.begin(), h0.end());

  const std::vector<double> rho0 = state0.rho0;
  const double dx = state0.dx;
  RhsFn rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    hydro_rhs(model, rho0, dx, y, dy);
  };
  MonitorVerdict last_trigger;
  std::vector<double> h(n);
  MonitorFn monitor = [&](double, std::span<const double> y) {
    const std::vector<double> J = deta_dx(y.subspan(0, n), dx);
    for (std::size_t i = 0; i < n; ++i) h[i] = rho0[i] > 0.0 ? rho0[i] / J[i] : 0.0;
    MonitorVerdict v = blow_up_monitor(J, h, rho0, thresholds.jacobian_floor, cap);
    if (!v.triggered()) {
      for (std::size_t i = 0; i < 2 * n; ++i) {
        if (!std::isfinite(y[i])) {
          v = {TriggerCause::NonFinite, i % n, y[i]};
          break;
        }
      }
    }
    if (v.triggered()) last_trigger = v;
    return v.triggered();
  };

  std::vector<double> y0(2 * n);
  std::copy(state0.eta.begin(), state0.eta.end(), y0.begin());
  std::copy(state0.v.begin(), state0.v.end(), y0.begin() + static_cast<std::ptrdiff_t>(n));
  IntegrationResult res = integrate(rhs, std::move(y0), state0.t, t_end, cfg, monitor);

  HydroRun run;
  run.accepted_steps = res.accepted;
  run.blow_up_lo = res.t_last_good;
  run.blow_up_hi = res.t_first_bad;
  std::vector<LagrangianState> states;
  states.reserve(res.samples.size());
  for (const Sample& s : res.samples) {
    states.push_back(state_from(state0, s.t, s.y));
    run.series.push_back(hydro_diagnostics(states.back()));
  }
  run.final_state = state_from(state0, res.t_last_good, res.y_last);

  if (res.termination == Termination::MonitorStop) {
    run.blew_up = true;
    run.cause = last_trigger.cause;
    run.witness_node = last_trigger.node;
  } else if (res.termination == Termination::DtUnderflow) {
    run.blew_up = true;
    run.cause = TriggerCause::StepSize;
    const std::vector<double> J = deta_dx(run.final_state.eta, dx);
    const std::vector<bool> mask = support_closure(rho0);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] && J[i] < worst) {
        worst = J[i];
        run.witness_node = i;
      }
    }
  }

  for (double ts : snapshot_times) {
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < states.size(); ++k) {
      const double gap = std::abs(states[k].t - ts);
      if (gap < best_gap) {
        best_gap = gap;
        best = k;
      }
    }
    if (!states.empty() && best_gap <= 0.5 * cfg.output_stride + 1e-12) {
      run.snapshots.push_back(states[best]);
    }
  }
  return run;
}

}  // namespace swarmhydro
