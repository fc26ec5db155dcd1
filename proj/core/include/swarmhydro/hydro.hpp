#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "swarmhydro/integrators.hpp"
#include "swarmhydro/kernels.hpp"

namespace swarmhydro {

enum class HydroAlignment { CS, MT, LinearDamping, None };

const char* to_string(HydroAlignment alignment) noexcept;

struct HydroModel {
  HydroAlignment alignment = HydroAlignment::CS;
  CommunicationKernel kernel;
  std::optional<PotentialSpec> potential;
  // Gaussian width of the mollified pressure p(rho) = rho^2, folded into K'.
  std::optional<double> pressure_eps;
};

void validate(const HydroModel& model);

struct Grid {
  std::vector<double> x;
  double dx = 0.0;
};

/// n equispaced nodes from xl to xr inclusive.
Grid build_grid(std::size_t n, double xl, double xr);

/// Positive part of cos(pi x / scale).
struct CosineBump {
  double scale = 1.5;
  bool operator==(const CosineBump&) const = default;
};

/// cos(pi x / 2) on [-1, 1] and cos(pi (x - 6)) on [5.5, 6.5], the two pieces
/// normalised separately to a mass ratio of mass_ratio : 1.
struct PiecewiseTwoGroup {
  double mass_ratio = 10.0;
  bool operator==(const PiecewiseTwoGroup&) const = default;
};

/// Unnormalised nodal values.
struct TabulatedDensity {
  std::vector<double> values;
  bool operator==(const TabulatedDensity&) const = default;
};

using DensityShape = std::variant<CosineBump, PiecewiseTwoGroup, TabulatedDensity>;

/// u0 = -c sin(pi x / scale).
struct SineC {
  double c = 0.0;
  double scale = 1.5;
  bool operator==(const SineC&) const = default;
};

/// u0 = -c x.
struct LinearC {
  double c = 0.0;
  bool operator==(const LinearC&) const = default;
};

/// +c cos(pi x / 2) on [-1, 1], -c cos(pi (x - 6)) on [5.5, 6.5], zero between.
struct TwoGroupC {
  double c = 0.1;
  bool operator==(const TwoGroupC&) const = default;
};

struct TabulatedVelocity {
  std::vector<double> values;
  bool operator==(const TabulatedVelocity&) const = default;
};

using VelocityShape = std::variant<SineC, LinearC, TwoGroupC, TabulatedVelocity>;

struct InitProfile {
  DensityShape shape = CosineBump{};
  double mass = 1.0;
  VelocityShape velocity = SineC{};
  double velocity_offset = 0.0;
  // Constant added to the density after normalisation.
  double floor = 0.0;
  bool operator==(const InitProfile&) const = default;
};

struct InitialData {
  std::vector<double> rho0;
  std::vector<double> v0;
  double mass = 0.0;  // dx * sum rho0, floor included
};

/// Scales the shape so dx * sum rho0 = mass, then adds the floor. Throws ZeroMass.
InitialData init_profiles(const InitProfile& profile, const Grid& grid);

struct LagrangianState {
  double t = 0.0;
  std::vector<double> eta;
  std::vector<double> v;
  std::vector<double> rho0;
  std::vector<double> h;
  double dx = 0.0;
};

LagrangianState make_state(const Grid& grid, const InitialData& data);

/// Fourth-order finite differences of eta in the Lagrangian label; biased
/// five-point stencils at the two nodes nearest each end. Needs n >= 7.
std::vector<double> deta_dx(std::span<const double> eta, double dx);

/// Nodes carrying mass plus their immediate neighbours. Outside this set the
/// flow map carries no density and its Jacobian is not monitored.
std::vector<bool> support_closure(std::span<const double> rho0);

/// Right-hand side on y = [eta..., v...].
void hydro_rhs(const HydroModel& model, std::span<const double> rho0, double dx,
               std::span<const double> y, std::span<double> dydt);

struct HydroDerivative {
  std::vector<double> deta;
  std::vector<double> dv;
};

HydroDerivative hydro_rhs(const LagrangianState& state, const HydroModel& model);

/// h_i = rho0_i / deta_dx_i. Throws JacobianCollapse if deta_dx <= jacobian_floor
/// on the support closure; h is zero off the support.
std::vector<double> density_reconstruct(const LagrangianState& state, double jacobian_floor = 1e-6);

struct MonitorThresholds {
  double jacobian_floor = 1e-6;
  // Absolute cap; simulate_hydro sets density_cap_factor * max h(0) when this is unset.
  std::optional<double> density_cap;
  double density_cap_factor = 1e6;
  bool operator==(const MonitorThresholds&) const = default;
};

enum class TriggerCause { None, Jacobian, Density, StepSize, NonFinite };

const char* to_string(TriggerCause cause) noexcept;

struct MonitorVerdict {
  TriggerCause cause = TriggerCause::None;
  std::size_t node = 0;
  double value = 0.0;
  bool triggered() const noexcept { return cause != TriggerCause::None; }
};

/// Checks min deta_dx and max h over the support closure.
MonitorVerdict blow_up_monitor(std::span<const double> jacobian, std::span<const double> h,
                               std::span<const double> rho0, double jacobian_floor,
                               double density_cap);

MonitorVerdict blow_up_monitor(const LagrangianState& state, const MonitorThresholds& thresholds);

/// max v - min v over nodes with rho0 > 0.
double velocity_diameter_on_support(const LagrangianState& state);

struct HydroDiagnostics {
  double t = 0.0;
  double min_jacobian = 0.0;
  double max_density = 0.0;
  double sup_speed = 0.0;
  double support_left = 0.0;
  double support_right = 0.0;
  double rv_support = 0.0;
  double momentum = 0.0;
  double mass = 0.0;  // trapezoidal sum of h over the moving nodes
};

HydroDiagnostics hydro_diagnostics(const LagrangianState& state);

struct HydroRun {
  std::vector<HydroDiagnostics> series;
  std::vector<LagrangianState> snapshots;
  LagrangianState final_state;
  bool blew_up = false;
  // [last accepted t, first bad t]; equal to the final time when no blow-up.
  double blow_up_lo = 0.0;
  double blow_up_hi = 0.0;
  TriggerCause cause = TriggerCause::None;
  std::size_t witness_node = 0;
  std::size_t accepted_steps = 0;

  double blow_up_mid() const noexcept { return 0.5 * (blow_up_lo + blow_up_hi); }
};

/// Snapshots are taken at the recorded sample nearest each requested time.
HydroRun simulate_hydro(const HydroModel& model, const LagrangianState& state0, double t_end,
                        const IntegratorConfig& cfg, const MonitorThresholds& thresholds = {},
                        const std::vector<double>& snapshot_times = {});

}  // namespace swarmhydro
