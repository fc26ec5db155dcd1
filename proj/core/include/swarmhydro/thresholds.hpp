#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "swarmhydro/hydro.hpp"
#include "swarmhydro/kernels.hpp"

namespace swarmhydro {

enum class Region { Subcritical, Supercritical, Gap };

const char* to_string(Region region) noexcept;

struct ThresholdVerdict {
  Region region = Region::Subcritical;
  std::optional<std::size_t> witness;
  std::optional<double> witness_x;
  // Smallest signed slack over the nodes: >= 0 on the subcritical side,
  // negative once some node crosses the relevant boundary.
  double margin = 0.0;
};

struct BlowUpBound {
  bool finite = false;
  double bound = 0.0;
  std::size_t witness_set_size = 0;
  std::optional<std::size_t> witness;
  // Newtonian case only: the value the argument actually delivers, without
  // the leading factor 2 of the stated bound.
  std::optional<double> proof_bound;
};

/// (psi * rho0)(x_i) ~ dx sum_j psi(x_i - x_j) rho0_j over all j.
std::vector<double> psi_convolution(std::span<const double> rho0, const CommunicationKernel& kernel,
                                    const Grid& grid);

/// d/dx u0 on the grid with the same stencils as deta_dx.
std::vector<double> velocity_gradient(std::span<const double> u0, const Grid& grid);

ThresholdVerdict classify_euler_alignment(std::span<const double> rho0, std::span<const double> du0,
                                          const CommunicationKernel& kernel, const Grid& grid);

/// -sqrt(-4 k rho0); throws DomainError unless k < 0.
double sigma_minus(double k, double rho0);

/// Unique negative root of 1/rho0 - (2k + psi_M s / rho0 - 2k exp(psi_M s / (2 k rho0))) / psi_M^2,
/// zero when rho0 == 0. Throws DomainError unless k < 0, NoBracket if the root is not enclosed.
double sigma_plus(double k, double rho0, double psi_M = 1.0);

/// Left-hand side of the sigma_plus equation at sigma.
double sigma_plus_residual(double k, double rho0, double psi_M, double sigma);

ThresholdVerdict classify_euler_poisson(std::span<const double> rho0, std::span<const double> du0,
                                        const CommunicationKernel& kernel, const Grid& grid, double k,
                                        double psi_M = 1.0);

/// Sharp threshold for psi == 1, where psi * rho0 is the total mass.
ThresholdVerdict classify_constant_psi(std::span<const double> rho0, std::span<const double> du0,
                                       const Grid& grid, double k);

struct DampedConstants {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double xi = 0.0;
};

/// Throws OutOfScope when M0 >= 1/4.
DampedConstants damped_constants(double M0);

/// Linear damping with K = -|x|/2 + x^2/2 and M0 < 1/4.
ThresholdVerdict classify_damped_newtonian(std::span<const double> rho0, std::span<const double> du0,
                                           const Grid& grid, double M0);

BlowUpBound blowup_time_bound_newtonian(std::span<const double> rho0, std::span<const double> du0,
                                        const Grid& grid);

/// Linear damping with K = -log|x| + x^2/2. Throws OutOfScope when 1 - 4 M0 < 0.
BlowUpBound blowup_time_bound_log(std::span<const double> rho0, std::span<const double> du0,
                                  const Grid& grid, double M0);

}  // namespace swarmhydro
