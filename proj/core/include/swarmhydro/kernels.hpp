#pragma once

#include <string>
#include <variant>

namespace swarmhydro {

/// Communication weight psi(r) = (1 + r^2)^(-beta/2).
///
/// psi is even, psi(0) = 1 and it is non-increasing in |r|. With constant_mode
/// set (or beta == 0) it is identically one.
struct CommunicationKernel {
  double beta = 0.0;
  bool constant_mode = false;

  bool is_constant() const noexcept { return constant_mode || beta == 0.0; }
  double operator()(double r) const noexcept;

  bool operator==(const CommunicationKernel&) const = default;
};

double psi_eval(const CommunicationKernel& kernel, double r) noexcept;

// Interaction potentials K(x) in one spatial variable. Radial potentials in two
// dimensions reuse the same profile through K'(|z|) z/|z|.

/// K(x) = alpha x^2 / 2.
struct Quadratic {
  double alpha = 1.0;
  bool operator==(const Quadratic&) const = default;
};

/// K(x) = k |x| + alpha x^2 / 2. k > 0 attracts, k < 0 repels.
struct NewtonianConfined1D {
  double k = -0.5;
  double alpha = 1.0;
  bool operator==(const NewtonianConfined1D&) const = default;
};

/// K(x) = |x|^a / a - |x|^b / b, with |x|^0 / 0 read as log|x|.
struct PowerLaw {
  double a = 2.0;
  double b = 1.0;
  bool operator==(const PowerLaw&) const = default;
};

/// K(x) = -log|x| + x^2 / 2.
struct LogQuadratic {
  bool operator==(const LogQuadratic&) const = default;
};

/// K(x) = 2 delta_eps(x) + x^2 / 2 with the Gaussian mollifier delta_eps.
///
/// The Gaussian part reproduces the mollified pressure 2 rho (delta_eps' * rho)
/// of p(rho) = rho^2, so the Lagrangian force formalism applies unchanged.
struct MollifiedGaussQuadratic {
  double eps = 1e-4;
  bool operator==(const MollifiedGaussQuadratic&) const = default;
};

using PotentialSpec =
    std::variant<Quadratic, NewtonianConfined1D, PowerLaw, LogQuadratic, MollifiedGaussQuadratic>;

std::string describe(const PotentialSpec& spec);

/// Exact K'(x). Throws DomainError where K' is singular at x = 0
/// (LogQuadratic, PowerLaw with an exponent below one).
double potential_grad(const PotentialSpec& spec, double x);

/// K(x) itself; singular variants throw DomainError at x = 0.
double potential_value(const PotentialSpec& spec, double x);

/// True when K'(0) is finite, i.e. coincident points exert no force.
bool regular_at_origin(const PotentialSpec& spec) noexcept;

/// Gaussian mollifier delta_eps(x) = exp(-x^2 / (2 eps)) / sqrt(2 pi eps).
double mollifier(double eps, double x) noexcept;

/// Derivative of the mollified pressure kernel 2 delta_eps, i.e. -2 x delta_eps(x) / eps.
double mollified_pressure_grad(double eps, double x) noexcept;

/// Improper integral of psi over [lower, inf). Throws DivergentIntegral when beta <= 1.
double psi_tail_integral(const CommunicationKernel& kernel, double lower);

/// Integral of psi over [a, b] (a <= b, a >= 0).
double psi_integral(const CommunicationKernel& kernel, double a, double b);

/// Solves Rv0 = integral of psi over [Rx0, R] for R >= Rx0.
/// Throws NoRoot if beta > 1 and Rv0 reaches the tail integral from Rx0.
double solve_R_tilde(const CommunicationKernel& kernel, double Rx0, double Rv0);

}  // namespace swarmhydro
