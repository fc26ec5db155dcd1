#include "swarmhydro/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swarmhydro/error.hpp"

namespace swarmhydro {
namespace {

const double kCubeRoot3 = std::cbrt(3.0);

// Antiderivative of the profile on its support.
double primitive(const SteadyProfile& p, double x) {
  switch (p.kind) {
    case SteadyKind::Indicator: return p.M0 * x;
    case SteadyKind::Parabola: return -0.25 * p.M0 * (x * x * x / 3.0 - kCubeRoot3 * kCubeRoot3 * x);
    case SteadyKind::Semicircle: {
      const double R2 = 2.0;
      const double s = std::sqrt(std::max(0.0, R2 - x * x));
      const double u = std::clamp(x / std::sqrt(R2), -1.0, 1.0);
      return p.M0 / std::numbers::pi * 0.5 * (x * s + R2 * std::asin(u));
    }
  }
  return 0.0;
}

void check_mass(double M0) {
  if (!(M0 > 0.0)) fail(ErrorCode::DomainError, "steady profile needs M0 > 0");
}

}  // namespace

const char* to_string(SteadyKind kind) noexcept {
  switch (kind) {
    case SteadyKind::Indicator: return "indicator";
    case SteadyKind::Parabola: return "parabola";
    case SteadyKind::Semicircle: return "semicircle";
  }
  return "unknown";
}

double SteadyProfile::operator()(double x) const noexcept {
  if (x < left || x > right) return 0.0;
  switch (kind) {
    case SteadyKind::Indicator: return M0;
    case SteadyKind::Parabola: return -0.25 * M0 * (x * x - kCubeRoot3 * kCubeRoot3);
    case SteadyKind::Semicircle: return M0 / std::numbers::pi * std::sqrt(std::max(0.0, 2.0 - x * x));
  }
  return 0.0;
}

double SteadyProfile::mass_between(double a, double b) const noexcept {
  const double lo = std::max(a, left);
  const double hi = std::min(b, right);
  if (!(hi > lo)) return 0.0;
  return primitive(*this, hi) - primitive(*this, lo);
}

SteadyProfile indicator_steady(double M0, double x_com, double momentum) {
  check_mass(M0);
  const double center = x_com + momentum / M0;
  return {SteadyKind::Indicator, M0, center - 0.5, center + 0.5};
}

SteadyProfile parabola_steady(double M0) {
  check_mass(M0);
  return {SteadyKind::Parabola, M0, -kCubeRoot3, kCubeRoot3};
}

SteadyProfile semicircle_steady(double M0) {
  check_mass(M0);
  const double R = std::numbers::sqrt2;
  return {SteadyKind::Semicircle, M0, -R, R};
}

std::vector<double> tabulate(const SteadyProfile& profile, const Grid& grid) {
  std::vector<double> out(grid.x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = profile(grid.x[i]);
  return out;
}

double force_residual(std::span<const double> rho, const Grid& grid, const PotentialSpec& spec,
                      double inner_fraction) {
  const std::size_t n = grid.x.size();
  if (rho.size() != n) fail(ErrorCode::ValidationError, "profile and grid sizes differ");
  std::size_t first = n, last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rho[i] < 0.0) fail(ErrorCode::DomainError, "profile must be nonnegative");
    if (rho[i] > 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == n) fail(ErrorCode::ZeroMass, "profile has no mass on the grid");
  const double center = 0.5 * (grid.x[first] + grid.x[last]);
  const double half = 0.5 * (grid.x[last] - grid.x[first]);
  const bool singular = !regular_at_origin(spec);

  double worst = 0.0;
  for (std::size_t i = first + 1; i < last; ++i) {
    if (!(rho[i] > 0.0 && rho[i - 1] > 0.0 && rho[i + 1] > 0.0)) continue;
    if (std::abs(grid.x[i] - center) > inner_fraction * half) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || rho[j] == 0.0) continue;
      const double z = grid.x[i] - grid.x[j];
      if (z == 0.0 && singular) fail(ErrorCode::SingularForce, "coincident nodes");
      s += rho[j] * potential_grad(spec, z);
    }
    worst = std::max(worst, std::abs(grid.dx * s));
  }
  return worst;
}

double l1_distance(std::span<const double> h, std::span<const double> eta,
                   const SteadyProfile& profile) {
  const std::size_t n = eta.size();
  if (h.size() != n) fail(ErrorCode::ValidationError, "h and eta sizes differ");
  if (n < 2) fail(ErrorCode::ValidationError, "need at least two nodes");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? eta[0] : eta[i - 1];
    const double right = i + 1 == n ? eta[n - 1] : eta[i + 1];
    total += std::abs(h[i] - profile(eta[i])) * 0.5 * (right - left);
  }
  total += profile.mass_between(profile.left, eta.front());
  total += profile.mass_between(eta.back(), profile.right);
  return total;
}

double linf_velocity(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace swarmhydro
