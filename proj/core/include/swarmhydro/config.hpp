#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmhydro/hydro.hpp"
#include "swarmhydro/integrators.hpp"
#include "swarmhydro/particle.hpp"

namespace swarmhydro {

enum class ExperimentKind { Particle, Hydro, Threshold, Steady };

struct GridConfig {
  std::size_t n = 200;
  double xl = -0.75;
  double xr = 0.75;
  bool operator==(const GridConfig&) const = default;
};

struct IntegratorSection {
  std::string method = "rk45";  // rk45 | rk4
  double rtol = 1e-8;
  double atol = 1e-10;
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 0.05;
  double dt = 1e-3;  // rk4 only
  double stride = 0.1;
  double event_tol = 1e-6;
  bool operator==(const IntegratorSection&) const = default;
};

struct MonitorSection {
  double jacobian_floor = 1e-6;
  double density_cap_factor = 1e6;
  bool operator==(const MonitorSection&) const = default;
};

struct ParticleSection {
  std::size_t n = 50;
  std::size_t dim = 2;
  bool first_order = false;
  std::vector<double> position_lo = {-10.0, -10.0};
  std::vector<double> position_hi = {10.0, 10.0};
  std::vector<double> velocity_lo = {-5.0, -4.3};
  std::vector<double> velocity_hi = {5.0, 5.7};
  std::optional<std::vector<double>> target_mean = std::vector<double>{0.0, 0.7};
  std::size_t group2_n = 0;
  std::vector<double> group2_lo = {60.0, -1.5};
  std::vector<double> group2_hi = {63.0, 1.5};
  bool operator==(const ParticleSection&) const = default;
};

struct OutputSection {
  std::vector<double> snapshots;
  bool operator==(const OutputSection&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Hydro;
  std::string name;

  std::string alignment = "cs";  // cs | mt | damping | none
  double beta = 0.5;
  bool constant_psi = false;
  std::string potential = "none";  // none | quadratic | newtonian | power | log | mollified
  double k = -0.5;
  double alpha = 1.0;
  double a = 2.0;
  double b = 1.0;
  double eps = std::pow(10.0, -4.1);
  std::optional<double> pressure_eps;

  double mass = 1.0;
  std::string density = "cosine";  // cosine | two_group
  double density_scale = 1.5;
  double mass_ratio = 10.0;
  std::string velocity = "sine";  // sine | linear | two_group | zero
  double c = 0.0;
  double velocity_scale = 1.5;
  double velocity_offset = 0.0;
  double floor = 0.0;

  std::string classifier = "auto";  // auto | euler_alignment | euler_poisson | constant_psi | damped_newtonian
  std::string bound = "auto";       // auto | newtonian | log
  double psi_M = 1.0;
  std::string profile = "indicator";  // indicator | parabola | semicircle

  std::uint64_t seed = 1;
  double t_end = 20.0;
  std::string out;

  GridConfig grid;
  IntegratorSection integrator;
  MonitorSection monitor;
  ParticleSection particles;
  OutputSection output;

  bool operator==(const ExperimentConfig&) const = default;
};

const char* to_string(ExperimentKind kind) noexcept;

/// JSON object with flat keys plus the sections grid, integrator, monitor,
/// particles and output. A "preset" key starts from that preset and lets the
/// remaining keys override it. Throws ParseError (malformed or duplicate key)
/// or ValidationError (unknown key, bad type or value), naming the key.
ExperimentConfig parse_config(const std::string& text);

std::string serialize(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

CommunicationKernel make_kernel(const ExperimentConfig& config);
std::optional<PotentialSpec> make_potential(const ExperimentConfig& config);
HydroModel make_hydro_model(const ExperimentConfig& config);
InitProfile make_profile(const ExperimentConfig& config);
Grid make_grid(const ExperimentConfig& config);
IntegratorConfig make_integrator(const ExperimentConfig& config);
MonitorThresholds make_thresholds(const ExperimentConfig& config);
ParticleModel make_particle_model(const ExperimentConfig& config);
ParticleState make_particle_ic(const ExperimentConfig& config);

}  // namespace swarmhydro
