#include "swarmhydro/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swarmhydro/error.hpp"

namespace swarmhydro {

void radial_gradient(const PotentialSpec& spec, std::span<const double> z, std::span<double> out) {
  const std::size_t d = z.size();
  if (d == 1) {
    if (z[0] == 0.0) {
      if (!regular_at_origin(spec)) fail(ErrorCode::SingularForce, "coincident particles");
      out[0] = 0.0;
      return;
    }
    out[0] = potential_grad(spec, z[0]);
    return;
  }
  double r2 = 0.0;
  for (double c : z) r2 += c * c;
  if (r2 == 0.0) {
    if (!regular_at_origin(spec)) fail(ErrorCode::SingularForce, "coincident particles");
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double r = std::sqrt(r2);
  const double scale = potential_grad(spec, r) / r;
  for (std::size_t k = 0; k < d; ++k) out[k] = scale * z[k];
}

void particle_rhs(const ParticleModel& model, std::size_t dim, std::span<const double> y,
                  std::span<double> dydt) {
  const std::size_t block = model.first_order ? y.size() : y.size() / 2;
  const std::size_t n = block / dim;
  const double* x = y.data();
  const double* v = model.first_order ? nullptr : y.data() + block;
  double* dx = dydt.data();
  double* dv = model.first_order ? nullptr : dydt.data() + block;
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool align = !model.first_order && model.alignment != ParticleAlignment::None;

  std::vector<double> z(dim), g(dim), force(dim), num(dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(force.begin(), force.end(), 0.0);
    std::fill(num.begin(), num.end(), 0.0);
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        z[k] = x[i * dim + k] - x[j * dim + k];
        r2 += z[k] * z[k];
      }
      if (align) {
        const double w = model.kernel(std::sqrt(r2));
        weight_sum += w;
        for (std::size_t k = 0; k < dim; ++k) num[k] += w * (v[j * dim + k] - v[i * dim + k]);
      }
      if (model.potential && j != i) {
        radial_gradient(*model.potential, z, g);
        for (std::size_t k = 0; k < dim; ++k) force[k] += g[k];
      }
    }
    const double S =
        model.alignment == ParticleAlignment::MT ? weight_sum : static_cast<double>(n);
    for (std::size_t k = 0; k < dim; ++k) {
      const double drift = -force[k] * inv_n;
      if (model.first_order) {
        dx[i * dim + k] = drift;
      } else {
        dx[i * dim + k] = v[i * dim + k];
        dv[i * dim + k] = (align ? num[k] / S : 0.0) + drift;
      }
    }
  }
}

std::vector<double> pack(const ParticleState& state) {
  std::vector<double> y = state.x;
  y.insert(y.end(), state.v.begin(), state.v.end());
  return y;
}

ParticleState unpack(double t, std::size_t dim, std::size_t n, bool first_order,
                     std::span<const double> y) {
  ParticleState s;
  s.t = t;
  s.dim = dim;
  s.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n * dim));
  if (!first_order) s.v.assign(y.begin() + static_cast<std::ptrdiff_t>(n * dim), y.end());
  return s;
}

ParticleState particle_rhs(const ParticleState& state, const ParticleModel& model) {
  const std::vector<double> y = pack(state);
  std::vector<double> dydt(y.size());
  particle_rhs(model, state.dim, y, dydt);
  return unpack(state.t, state.dim, state.count(), model.first_order, dydt);
}

namespace {

double diameter(const std::vector<double>& p, std::size_t dim) {
  const std::size_t n = p.size() / dim;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = p[i * dim + k] - p[j * dim + k];
        r2 += d * d;
      }
      best = std::max(best, r2);
    }
  }
  return std::sqrt(best);
}

}  // namespace

FlockDiagnostics diagnostics(const ParticleState& state) {
  FlockDiagnostics d;
  d.t = state.t;
  d.Rx = diameter(state.x, state.dim);
  d.mean_velocity.assign(state.dim, 0.0);
  if (!state.v.empty()) {
    d.Rv = diameter(state.v, state.dim);
    const std::size_t n = state.count();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < state.dim; ++k) d.mean_velocity[k] += state.v[i * state.dim + k];
    }
    for (double& m : d.mean_velocity) m /= static_cast<double>(n);
  }
  return d;
}

ParticleRun simulate_particles(const ParticleModel& model, const ParticleState& ic, double t_end,
                               const IntegratorConfig& cfg) {
  if (ic.dim != 1 && ic.dim != 2) fail(ErrorCode::ValidationError, "dimension must be 1 or 2");
  if (ic.count() == 0) fail(ErrorCode::ValidationError, "need at least one particle");
  if (!model.first_order && ic.v.size() != ic.x.size()) {
    fail(ErrorCode::ValidationError, "velocity array does not match positions");
  }
  const std::size_t dim = ic.dim;
  const std::size_t n = ic.count();
  RhsFn rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    particle_rhs(model, dim, y, dy);
  };
  MonitorFn monitor = [](double t, std::span<const double> y) {
    for (double c : y) {
      if (!std::isfinite(c)) fail(ErrorCode::NonFinite, "state overflowed at t = " + std::to_string(t));
    }
    return false;
  };
  IntegrationResult res = integrate(rhs, pack(ic), ic.t, t_end, cfg, monitor);
  if (res.termination == Termination::DtUnderflow) {
    fail(ErrorCode::NonFinite, "step size collapsed at t = " + std::to_string(res.t_last_good));
  }
  ParticleRun run;
  run.termination = res.termination;
  run.accepted_steps = res.accepted;
  run.samples.reserve(res.samples.size());
  for (const Sample& s : res.samples) {
    run.samples.push_back(unpack(s.t, dim, n, model.first_order, s.y));
    run.diagnostics.push_back(diagnostics(run.samples.back()));
  }
  return run;
}

PortableRng::PortableRng(std::uint64_t seed) : engine_(seed) {}

double PortableRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

ParticleState generate_grouped_ic(const std::vector<ParticleGroup>& groups, const Box& velocity_box,
                                  const std::optional<std::vector<double>>& target_mean,
                                  std::uint64_t seed) {
  const std::size_t dim = velocity_box.dim();
  if (dim == 0 || velocity_box.hi.size() != dim) fail(ErrorCode::ValidationError, "bad velocity box");
  auto check_box = [&](const Box& b) {
    if (b.dim() != dim || b.hi.size() != dim) fail(ErrorCode::ValidationError, "box dimension mismatch");
    for (std::size_t k = 0; k < dim; ++k) {
      if (!(b.lo[k] < b.hi[k])) fail(ErrorCode::ValidationError, "degenerate box");
    }
  };
  check_box(velocity_box);
  PortableRng rng(seed);
  ParticleState s;
  s.dim = dim;
  for (const ParticleGroup& g : groups) {
    check_box(g.positions);
    for (std::size_t i = 0; i < g.count; ++i) {
      for (std::size_t k = 0; k < dim; ++k) s.x.push_back(rng.uniform(g.positions.lo[k], g.positions.hi[k]));
    }
  }
  const std::size_t n = s.count();
  if (n == 0) fail(ErrorCode::ValidationError, "need at least one particle");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) s.v.push_back(rng.uniform(velocity_box.lo[k], velocity_box.hi[k]));
  }
  if (target_mean) {
    if (target_mean->size() != dim) fail(ErrorCode::ValidationError, "target mean dimension mismatch");
    for (std::size_t k = 0; k < dim; ++k) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += s.v[i * dim + k];
      mean /= static_cast<double>(n);
      const double shift = (*target_mean)[k] - mean;
      for (std::size_t i = 0; i < n; ++i) s.v[i * dim + k] += shift;
    }
  }
  return s;
}

ParticleState generate_uniform_ic(std::size_t N, const Box& position_box, const Box& velocity_box,
                                  const std::optional<std::vector<double>>& target_mean,
                                  std::uint64_t seed) {
  return generate_grouped_ic({ParticleGroup{N, position_box}}, velocity_box, target_mean, seed);
}

EnvelopeReport flocking_envelope_check(const std::vector<FlockDiagnostics>& trajectory,
                                       const CommunicationKernel& kernel) {
  if (trajectory.empty()) fail(ErrorCode::NotApplicable, "empty trajectory");
  const FlockDiagnostics& first = trajectory.front();
  EnvelopeReport report;
  try {
    report.R_tilde = solve_R_tilde(kernel, first.Rx, first.Rv);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoRoot) {
      fail(ErrorCode::NotApplicable, "flocking condition fails for this initial configuration");
    }
    throw;
  }
  report.decay_rate = kernel(report.R_tilde);
  report.upper_margin = -std::numeric_limits<double>::infinity();
  report.lower_margin = -std::numeric_limits<double>::infinity();
  for (const FlockDiagnostics& d : trajectory) {
    const double tau = d.t - first.t;
    report.upper_margin =
        std::max(report.upper_margin, d.Rv - first.Rv * std::exp(-report.decay_rate * tau));
    report.lower_margin = std::max(report.lower_margin, first.Rv * std::exp(-tau) - d.Rv);
  }
  return report;
}

}  // namespace swarmhydro
