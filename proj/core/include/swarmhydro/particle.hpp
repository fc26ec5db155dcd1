#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "swarmhydro/integrators.hpp"
#include "swarmhydro/kernels.hpp"

namespace swarmhydro {

/// N agents in d dimensions; x and v are row-major N x d. v is empty for the
/// first-order model.
struct ParticleState {
  double t = 0.0;
  std::size_t dim = 1;
  std::vector<double> x;
  std::vector<double> v;

  std::size_t count() const noexcept { return dim == 0 ? 0 : x.size() / dim; }
  bool operator==(const ParticleState&) const = default;
};

enum class ParticleAlignment { CS, MT, None };

struct ParticleModel {
  ParticleAlignment alignment = ParticleAlignment::CS;
  CommunicationKernel kernel;
  std::optional<PotentialSpec> potential;
  bool first_order = false;
};

struct FlockDiagnostics {
  double t = 0.0;
  double Rx = 0.0;
  double Rv = 0.0;
  std::vector<double> mean_velocity;
};

/// Interaction gradient grad K(z) for a radial potential; z has `dim` entries.
/// Writes zero at z = 0 when K is regular there and throws SingularForce otherwise.
void radial_gradient(const PotentialSpec& spec, std::span<const double> z, std::span<double> out);

/// Right-hand side on the packed vector y = [x..., v...] (or [x...] first order).
void particle_rhs(const ParticleModel& model, std::size_t dim, std::span<const double> y,
                  std::span<double> dydt);

/// Same, on a state; the returned state holds (dx/dt, dv/dt).
ParticleState particle_rhs(const ParticleState& state, const ParticleModel& model);

std::vector<double> pack(const ParticleState& state);
ParticleState unpack(double t, std::size_t dim, std::size_t n, bool first_order,
                     std::span<const double> y);

FlockDiagnostics diagnostics(const ParticleState& state);

struct ParticleRun {
  std::vector<ParticleState> samples;
  std::vector<FlockDiagnostics> diagnostics;
  Termination termination = Termination::ReachedEnd;
  std::size_t accepted_steps = 0;
};

/// Throws NonFinite if the state overflows or the adaptive step collapses.
ParticleRun simulate_particles(const ParticleModel& model, const ParticleState& ic, double t_end,
                               const IntegratorConfig& cfg);

/// Axis-aligned box, one [lo, hi] pair per dimension.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t dim() const noexcept { return lo.size(); }
};

/// Uniform draws in [0, 1) built from the top 53 bits of mt19937_64, so the
/// stream is identical across standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct ParticleGroup {
  std::size_t count = 0;
  Box positions;
};

/// Positions are drawn per group, then all velocities from velocity_box; with
/// target_mean the velocities are shifted so their mean is exactly the target.
ParticleState generate_grouped_ic(const std::vector<ParticleGroup>& groups, const Box& velocity_box,
                                  const std::optional<std::vector<double>>& target_mean,
                                  std::uint64_t seed);

ParticleState generate_uniform_ic(std::size_t N, const Box& position_box, const Box& velocity_box,
                                  const std::optional<std::vector<double>>& target_mean,
                                  std::uint64_t seed);

struct EnvelopeReport {
  double R_tilde = 0.0;
  double decay_rate = 0.0;  // psi(R_tilde)
  // max over samples of Rv(t) - Rv(0) exp(-psi(R_tilde) t); <= 0 when the upper bound holds.
  double upper_margin = 0.0;
  // max over samples of Rv(0) exp(-t) - Rv(t); <= 0 when the lower bound holds.
  double lower_margin = 0.0;
  bool holds(double slack = 1e-9) const noexcept {
    return upper_margin <= slack && lower_margin <= slack;
  }
};

/// Throws NotApplicable when beta > 1 and Rv(0) reaches the tail integral from Rx(0).
EnvelopeReport flocking_envelope_check(const std::vector<FlockDiagnostics>& trajectory,
                                       const CommunicationKernel& kernel);

}  // namespace swarmhydro
