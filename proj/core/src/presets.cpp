#include "swarmhydro/presets.hpp"

#include <cmath>
#include <functional>

#include "swarmhydro/error.hpp"

namespace swarmhydro {
namespace {

struct Entry {
  PresetInfo info;
  std::function<ExperimentConfig()> make;
};

ExperimentConfig particle_base(const std::string& name, double beta, double t_end) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Particle;
  c.name = name;
  c.alignment = "cs";
  c.beta = beta;
  c.t_end = t_end;
  c.integrator.dt_max = 0.5;
  c.integrator.stride = t_end / 500.0;
  return c;
}

ExperimentConfig two_group_particles(const std::string& name, const std::string& alignment) {
  ExperimentConfig c = particle_base(name, 0.5, 50.0);
  c.alignment = alignment;
  c.particles.group2_n = 5;
  c.integrator.stride = 0.1;
  return c;
}

ExperimentConfig hydro_base(const std::string& name, double c_value, double t_end) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Hydro;
  c.name = name;
  c.alignment = "cs";
  c.beta = 0.5;
  c.c = c_value;
  c.t_end = t_end;
  c.output.snapshots = {0.0, t_end / 4.0, t_end / 2.0, t_end};
  return c;
}

ExperimentConfig euler_alignment(const std::string& name, double c_value) {
  return hydro_base(name, c_value, 20.0);
}

ExperimentConfig two_group_hydro(const std::string& name, const std::string& alignment) {
  ExperimentConfig c = hydro_base(name, 0.1, 20.0);
  c.alignment = alignment;
  c.density = "two_group";
  c.velocity = "two_group";
  c.grid.xl = -1.0;
  c.grid.xr = 6.5;
  return c;
}

ExperimentConfig euler_poisson(const std::string& name, double k, double c_value) {
  ExperimentConfig c = hydro_base(name, c_value, 10.0);
  c.potential = "newtonian";
  c.k = k;
  c.alpha = 0.0;
  return c;
}

ExperimentConfig newtonian_confined(const std::string& name, const std::string& alignment, double mass,
                                    double c_value, double t_end) {
  ExperimentConfig c = hydro_base(name, c_value, t_end);
  c.alignment = alignment;
  c.potential = "newtonian";
  c.k = -0.5;
  c.alpha = 1.0;
  c.mass = mass;
  c.density_scale = 1.7;
  c.velocity = "linear";
  return c;
}

ExperimentConfig log_confined(const std::string& name, double c_value) {
  ExperimentConfig c = hydro_base(name, c_value, 10.0);
  c.alignment = "damping";
  c.potential = "log";
  c.mass = 0.2;
  c.velocity = "linear";
  c.profile = "semicircle";
  return c;
}

ExperimentConfig pressure(const std::string& name, const std::string& alignment, double offset) {
  ExperimentConfig c = hydro_base(name, 0.2, 20.0);
  c.alignment = alignment;
  c.potential = "quadratic";
  c.alpha = 1.0;
  c.pressure_eps = std::pow(10.0, -4.1);
  c.floor = 0.05;
  c.velocity_offset = offset;
  c.profile = "parabola";
  c.output.snapshots = {0.0, 5.0, 10.0, 15.0, 20.0};
  return c;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto add = [&](std::string name, std::string description, std::function<ExperimentConfig(const std::string&)> f) {
      t.push_back({{name, std::move(description)}, [name, f] { return f(name); }});
    };
    add("fig-2.1-beta0.8", "CS particles, beta 0.8, N=50 in 2D: unconditional flocking",
        [](const std::string& n) { return particle_base(n, 0.8, 250.0); });
    add("fig-2.2a-beta1.05", "CS particles, beta 1.05: flocking condition satisfied",
        [](const std::string& n) {
          ExperimentConfig c = particle_base(n, 1.05, 5000.0);
          c.integrator.dt_max = 1.0;
          return c;
        });
    add("fig-2.2b-beta1.2", "CS particles, beta 1.2: flocking condition violated",
        [](const std::string& n) {
          ExperimentConfig c = particle_base(n, 1.2, 5000.0);
          c.integrator.dt_max = 1.0;
          return c;
        });
    add("fig-2.3-two-group-cs", "CS particles in two groups (50 + 5)",
        [](const std::string& n) { return two_group_particles(n, "cs"); });
    add("fig-2.3-two-group-mt", "MT particles in two groups (50 + 5)",
        [](const std::string& n) { return two_group_particles(n, "mt"); });
    add("fig-2.5-newtonian", "CS particles with K = -log|x| + |x|^2/2 in 2D",
        [](const std::string& n) {
          ExperimentConfig c = particle_base(n, 0.5, 50.0);
          c.potential = "log";
          c.integrator.stride = 0.1;
          return c;
        });
    add("fig-3.2-c0.2", "Euler-alignment, u0 = -0.2 sin: subcritical",
        [](const std::string& n) { return euler_alignment(n, 0.2); });
    add("fig-3.2-c0.4", "Euler-alignment, u0 = -0.4 sin: subcritical",
        [](const std::string& n) { return euler_alignment(n, 0.4); });
    add("fig-3.3-c0.5", "Euler-alignment, u0 = -0.5 sin: supercritical",
        [](const std::string& n) { return euler_alignment(n, 0.5); });
    add("fig-3.4-cs", "CS hydrodynamics, two groups with opposite velocities",
        [](const std::string& n) { return two_group_hydro(n, "cs"); });
    add("fig-3.4-mt", "MT hydrodynamics, two groups with opposite velocities",
        [](const std::string& n) { return two_group_hydro(n, "mt"); });
    add("fig-3.5-k0.5-c0.4", "Euler-Poisson-alignment, attractive k=0.5, c=0.4",
        [](const std::string& n) { return euler_poisson(n, 0.5, 0.4); });
    add("fig-3.7-k-0.5-c0.95", "Euler-Poisson-alignment, repulsive k=-0.5, c=0.95: subcritical",
        [](const std::string& n) { return euler_poisson(n, -0.5, 0.95); });
    add("fig-3.8-k-0.5-c1.08", "Euler-Poisson-alignment, repulsive k=-0.5, c=1.08: gap",
        [](const std::string& n) { return euler_poisson(n, -0.5, 1.08); });
    add("fig-3.9-k-0.5-c1.2", "Euler-Poisson-alignment, repulsive k=-0.5, c=1.2: supercritical",
        [](const std::string& n) { return euler_poisson(n, -0.5, 1.2); });
    add("fig-3.10-m0.2-c0.9", "Damped, K = -|x|/2 + x^2/2, M0=0.2, c=0.9: subcritical",
        [](const std::string& n) { return newtonian_confined(n, "damping", 0.2, 0.9, 30.0); });
    add("fig-3.10-m0.2-c1.1", "Damped, K = -|x|/2 + x^2/2, M0=0.2, c=1.1: supercritical",
        [](const std::string& n) { return newtonian_confined(n, "damping", 0.2, 1.1, 30.0); });
    add("fig-3.12-cs-m1-c0.2", "CS alignment, K = -|x|/2 + x^2/2, M0=1, c=0.2",
        [](const std::string& n) { return newtonian_confined(n, "cs", 1.0, 0.2, 30.0); });
    add("fig-3.12-cs-m1-c0.5", "CS alignment, K = -|x|/2 + x^2/2, M0=1, c=0.5",
        [](const std::string& n) { return newtonian_confined(n, "cs", 1.0, 0.5, 30.0); });
    add("fig-3.13-log-c0.3", "Damped, K = -log|x| + x^2/2, M0=0.2, c=0.3",
        [](const std::string& n) { return log_confined(n, 0.3); });
    add("fig-3.13-log-c1", "Damped, K = -log|x| + x^2/2, M0=0.2, c=1",
        [](const std::string& n) { return log_confined(n, 1.0); });
    add("fig-3.14-pressure-damped", "Damped with mollified pressure and quadratic confinement",
        [](const std::string& n) { return pressure(n, "damping", 0.0); });
    add("fig-3.14-pressure-cs", "CS alignment with mollified pressure, velocity offset 0.1",
        [](const std::string& n) { return pressure(n, "cs", 0.1); });
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const Entry& e : entries()) out.push_back(e.info);
    return out;
  }();
  return list;
}

ExperimentConfig preset(const std::string& name) {
  for (const Entry& e : entries()) {
    if (e.info.name == name) return e.make();
  }
  fail(ErrorCode::ValidationError, "unknown preset '" + name + "'");
}

}  // namespace swarmhydro
