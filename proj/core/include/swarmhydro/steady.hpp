#pragma once

#include <span>
#include <vector>

#include "swarmhydro/hydro.hpp"
#include "swarmhydro/kernels.hpp"

namespace swarmhydro {

enum class SteadyKind { Indicator, Parabola, Semicircle };

const char* to_string(SteadyKind kind) noexcept;

struct SteadyProfile {
  SteadyKind kind = SteadyKind::Indicator;
  double M0 = 1.0;
  double left = -0.5;
  double right = 0.5;

  double operator()(double x) const noexcept;
  /// Exact integral of the profile over [a, b].
  double mass_between(double a, double b) const noexcept;
  double mass() const noexcept { return mass_between(left, right); }
};

/// Height M0 on a unit interval centred at x_com + momentum / M0.
SteadyProfile indicator_steady(double M0, double x_com, double momentum);

/// -(M0/4)(x^2 - 3^(2/3)) on [-3^(1/3), 3^(1/3)].
SteadyProfile parabola_steady(double M0);

/// (M0/pi) sqrt(2 - x^2) on [-sqrt 2, sqrt 2], the equilibrium of
/// K = -log|x| + x^2/2.
SteadyProfile semicircle_steady(double M0);

std::vector<double> tabulate(const SteadyProfile& profile, const Grid& grid);

/// sup |dx sum_{j != i} rho_j K'(x_i - x_j)| over support nodes whose neighbours
/// also carry mass and which lie in the central inner_fraction of the support.
double force_residual(std::span<const double> rho, const Grid& grid, const PotentialSpec& spec,
                      double inner_fraction = 1.0);

/// Sum of |h_i - profile(eta_i)| (eta_{i+1} - eta_{i-1}) / 2, plus the profile
/// mass lying outside [eta_1, eta_n].
double l1_distance(std::span<const double> h, std::span<const double> eta,
                   const SteadyProfile& profile);

double linf_velocity(std::span<const double> v);

}  // namespace swarmhydro
