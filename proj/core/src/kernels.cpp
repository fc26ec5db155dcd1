#include "swarmhydro/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swarmhydro/error.hpp"
#include "swarmhydro/quadrature.hpp"

namespace swarmhydro {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// |x|^p with the convention that p == 0 and x == 0 give 1.
double abs_pow(double x, double p) {
  const double ax = std::abs(x);
  if (ax == 0.0) {
    if (p < 0.0) fail(ErrorCode::DomainError, "power-law derivative is singular at x = 0");
    return p == 0.0 ? 1.0 : 0.0;
  }
  return std::pow(ax, p);
}

double power_term_value(double x, double p) {
  if (p == 0.0) {
    if (x == 0.0) fail(ErrorCode::DomainError, "log term is singular at x = 0");
    return std::log(std::abs(x));
  }
  return abs_pow(x, p) / p;
}

constexpr double kQuadRelTol = 1e-13;

double integrate_psi_linear(const CommunicationKernel& kernel, double a, double b) {
  quadrature::Options options;
  options.rel_tol = kQuadRelTol;
  options.abs_tol = 1e-300;
  return quadrature::gauss_kronrod([&](double s) { return kernel(s); }, a, b, options).value;
}

// Integral in the variable u = log s, which keeps the integrand ~ s^(1-beta)
// well scaled across many decades.
double integrate_psi_log(const CommunicationKernel& kernel, double a, double b) {
  quadrature::Options options;
  options.rel_tol = kQuadRelTol;
  options.abs_tol = 1e-300;
  return quadrature::gauss_kronrod(
             [&](double u) {
               const double s = std::exp(u);
               return kernel(s) * s;
             },
             std::log(a), std::log(b), options)
      .value;
}

// Integral of (1 + s^2)^(-beta/2) over [U, inf) from the binomial series in 1/s^2.
double psi_tail_series(double beta, double U) {
  double coeff = 1.0;
  double sum = 0.0;
  for (int m = 0; m < 200; ++m) {
    if (m > 0) coeff *= (-0.5 * beta - (m - 1)) / m;
    const double exponent = 1.0 - beta - 2.0 * m;
    const double term = coeff * std::pow(U, exponent) / (beta + 2.0 * m - 1.0);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double CommunicationKernel::operator()(double r) const noexcept {
  if (is_constant()) return 1.0;
  const double base = 1.0 + r * r;
  if (beta == 0.5) return 1.0 / std::sqrt(std::sqrt(base));
  if (beta == 1.0) return 1.0 / std::sqrt(base);
  if (beta == 2.0) return 1.0 / base;
  return std::pow(base, -0.5 * beta);
}

double psi_eval(const CommunicationKernel& kernel, double r) noexcept { return kernel(r); }

std::string describe(const PotentialSpec& spec) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const Quadratic& p) { out << "quadratic(alpha=" << p.alpha << ")"; },
                 [&](const NewtonianConfined1D& p) {
                   out << "newtonian(k=" << p.k << ", alpha=" << p.alpha << ")";
                 },
                 [&](const PowerLaw& p) { out << "power(a=" << p.a << ", b=" << p.b << ")"; },
                 [&](const LogQuadratic&) { out << "log-quadratic"; },
                 [&](const MollifiedGaussQuadratic& p) {
                   out << "mollified-gauss-quadratic(eps=" << p.eps << ")";
                 },
             },
             spec);
  return out.str();
}

double mollifier(double eps, double x) noexcept {
  return std::exp(-x * x / (2.0 * eps)) / std::sqrt(2.0 * std::numbers::pi * eps);
}

double mollified_pressure_grad(double eps, double x) noexcept {
  return -2.0 * x * mollifier(eps, x) / eps;
}

double potential_grad(const PotentialSpec& spec, double x) {
  return std::visit(
      overloaded{
          [&](const Quadratic& p) { return p.alpha * x; },
          [&](const NewtonianConfined1D& p) { return p.k * sign(x) + p.alpha * x; },
          [&](const PowerLaw& p) {
            // d/dx log|x| = sign(x) |x|^-1, so the log convention needs no branch here.
            return sign(x) * (abs_pow(x, p.a - 1.0) - abs_pow(x, p.b - 1.0));
          },
          [&](const LogQuadratic&) {
            if (x == 0.0) fail(ErrorCode::DomainError, "log-quadratic force is singular at x = 0");
            return -1.0 / x + x;
          },
          [&](const MollifiedGaussQuadratic& p) { return x + mollified_pressure_grad(p.eps, x); },
      },
      spec);
}

double potential_value(const PotentialSpec& spec, double x) {
  return std::visit(
      overloaded{
          [&](const Quadratic& p) { return 0.5 * p.alpha * x * x; },
          [&](const NewtonianConfined1D& p) { return p.k * std::abs(x) + 0.5 * p.alpha * x * x; },
          [&](const PowerLaw& p) { return power_term_value(x, p.a) - power_term_value(x, p.b); },
          [&](const LogQuadratic&) {
            if (x == 0.0) fail(ErrorCode::DomainError, "log-quadratic potential is singular at x = 0");
            return -std::log(std::abs(x)) + 0.5 * x * x;
          },
          [&](const MollifiedGaussQuadratic& p) { return 2.0 * mollifier(p.eps, x) + 0.5 * x * x; },
      },
      spec);
}

bool regular_at_origin(const PotentialSpec& spec) noexcept {
  return std::visit(overloaded{
                        [](const LogQuadratic&) { return false; },
                        [](const PowerLaw& p) { return p.a >= 1.0 && p.b >= 1.0; },
                        [](const auto&) { return true; },
                    },
                    spec);
}

double psi_integral(const CommunicationKernel& kernel, double a, double b) {
  if (!(a >= 0.0) || !(b >= a)) fail(ErrorCode::DomainError, "psi_integral needs 0 <= a <= b");
  if (kernel.is_constant()) return b - a;
  if (b == a) return 0.0;
  const double knee = std::max(1.0, a);
  if (b <= 4.0 * knee) return integrate_psi_linear(kernel, a, b);
  double total = 0.0;
  if (a < knee) total += integrate_psi_linear(kernel, a, knee);
  total += integrate_psi_log(kernel, knee, b);
  return total;
}

double psi_tail_integral(const CommunicationKernel& kernel, double lower) {
  if (kernel.is_constant() || kernel.beta <= 1.0) {
    fail(ErrorCode::DivergentIntegral, "tail integral of psi diverges for beta <= 1");
  }
  if (!(lower >= 0.0)) fail(ErrorCode::DomainError, "tail integral needs lower >= 0");
  const double cutoff = std::max(16.0, 4.0 * lower);
  return psi_integral(kernel, lower, cutoff) + psi_tail_series(kernel.beta, cutoff);
}

double solve_R_tilde(const CommunicationKernel& kernel, double Rx0, double Rv0) {
  if (!(Rx0 >= 0.0) || !(Rv0 >= 0.0)) {
    fail(ErrorCode::DomainError, "solve_R_tilde needs nonnegative diameters");
  }
  if (Rv0 == 0.0) return Rx0;
  if (kernel.is_constant()) return Rx0 + Rv0;
  if (kernel.beta > 1.0) {
    const double tail = psi_tail_integral(kernel, Rx0);
    if (!(Rv0 < tail)) {
      fail(ErrorCode::NoRoot, "velocity diameter exceeds the tail integral of psi");
    }
  }

  auto residual = [&](double R) { return psi_integral(kernel, Rx0, R) - Rv0; };

  // psi <= 1, so the integral over [Rx0, Rx0 + Rv0] is at most Rv0.
  double lo = Rx0 + Rv0;
  double f_lo = residual(lo);
  if (f_lo >= 0.0) return lo;
  double hi = 2.0 * lo;
  double f_hi = residual(hi);
  for (int i = 0; f_hi < 0.0; ++i) {
    if (i > 2000 || !std::isfinite(hi)) fail(ErrorCode::NoRoot, "could not bracket R_tilde");
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = residual(hi);
  }

  // Safeguarded Newton in u = log R, with bisection (also in log space) as fallback.
  const double tol = 1e-12 * std::max(1.0, Rv0);
  double u_lo = std::log(lo);
  double u_hi = std::log(hi);
  double u = 0.5 * (u_lo + u_hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double R = std::exp(u);
    const double f = residual(R);
    if (std::abs(f) <= tol) return R;
    if (f < 0.0) {
      u_lo = u;
    } else {
      u_hi = u;
    }
    const double slope = kernel(R) * R;
    double next = u - f / slope;
    if (!(next > u_lo && next < u_hi)) next = 0.5 * (u_lo + u_hi);
    if (u_hi - u_lo <= 1e-15 * std::max(1.0, std::abs(u))) return std::exp(next);
    u = next;
  }
  return std::exp(u);
}

}  // namespace swarmhydro
