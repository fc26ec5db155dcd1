#include "swarmhydro/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmhydro/error.hpp"

namespace swarmhydro {
namespace {

void check_sizes(std::span<const double> rho0, std::span<const double> du0, const Grid& grid) {
  if (rho0.size() != grid.x.size() || du0.size() != grid.x.size()) {
    fail(ErrorCode::ValidationError, "rho0, du0 and grid must have the same length");
  }
}

ThresholdVerdict with_witness(Region region, std::size_t node, double margin, const Grid& grid) {
  ThresholdVerdict v;
  v.region = region;
  v.margin = margin;
  v.witness = node;
  v.witness_x = grid.x[node];
  return v;
}

// Stable form of the sigma_plus equation: with s = psi_M sigma / (2 k rho0) > 0
// it reads 1/rho0 + (2k / psi_M^2) (expm1(s) - s).
double sigma_plus_stable(double k, double rho0, double psi_M, double sigma) {
  const double s = psi_M * sigma / (2.0 * k * rho0);
  return 1.0 / rho0 + 2.0 * k / (psi_M * psi_M) * (std::expm1(s) - s);
}

}  // namespace

const char* to_string(Region region) noexcept {
  switch (region) {
    case Region::Subcritical: return "Subcritical";
    case Region::Supercritical: return "Supercritical";
    case Region::Gap: return "Gap";
  }
  return "Unknown";
}

std::vector<double> psi_convolution(std::span<const double> rho0, const CommunicationKernel& kernel,
                                    const Grid& grid) {
  const std::size_t n = grid.x.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (rho0[j] != 0.0) s += kernel(grid.x[i] - grid.x[j]) * rho0[j];
    }
    out[i] = grid.dx * s;
  }
  return out;
}

std::vector<double> velocity_gradient(std::span<const double> u0, const Grid& grid) {
  return deta_dx(u0, grid.dx);
}

ThresholdVerdict classify_euler_alignment(std::span<const double> rho0, std::span<const double> du0,
                                          const CommunicationKernel& kernel, const Grid& grid) {
  check_sizes(rho0, du0, grid);
  const std::vector<double> conv = psi_convolution(rho0, kernel, grid);
  std::size_t worst = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const double e = du0[i] + conv[i];
    if (e < margin) {
      margin = e;
      worst = i;
    }
  }
  if (margin >= 0.0) {
    ThresholdVerdict v;
    v.margin = margin;
    return v;
  }
  return with_witness(Region::Supercritical, worst, margin, grid);
}

double sigma_minus(double k, double rho0) {
  if (!(k < 0.0)) fail(ErrorCode::DomainError, "sigma_minus needs k < 0");
  if (!(rho0 >= 0.0)) fail(ErrorCode::DomainError, "sigma_minus needs rho0 >= 0");
  return -std::sqrt(-4.0 * k * rho0);
}

double sigma_plus_residual(double k, double rho0, double psi_M, double sigma) {
  return 1.0 / rho0 -
         (2.0 * k + psi_M * sigma / rho0 - 2.0 * k * std::exp(psi_M * sigma / (2.0 * k * rho0))) /
             (psi_M * psi_M);
}

double sigma_plus(double k, double rho0, double psi_M) {
  if (!(k < 0.0)) fail(ErrorCode::DomainError, "sigma_plus needs k < 0");
  if (!(psi_M > 0.0)) fail(ErrorCode::DomainError, "sigma_plus needs psi_M > 0");
  if (!(rho0 >= 0.0)) fail(ErrorCode::DomainError, "sigma_plus needs rho0 >= 0");
  if (rho0 == 0.0) return 0.0;

  // F is increasing in sigma with F(0-) = 1/rho0 > 0 and F -> -inf as sigma -> -inf.
  auto F = [&](double s) { return sigma_plus_stable(k, rho0, psi_M, s); };
  const double scale = std::abs(2.0 * k * rho0 / psi_M);
  double hi = 0.0;
  double lo = -scale;
  while (F(lo) >= 0.0) {
    hi = lo;
    lo *= 2.0;
    if (-lo > 1e6 * scale) fail(ErrorCode::NoBracket, "no sign change for sigma_plus");
  }

  double x = lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = F(x);
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double s = psi_M * x / (2.0 * k * rho0);
    const double slope = std::expm1(s) / (psi_M * rho0);
    double next = x - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return next;
    }
    x = next;
  }
  return x;
}

ThresholdVerdict classify_euler_poisson(std::span<const double> rho0, std::span<const double> du0,
                                        const CommunicationKernel& kernel, const Grid& grid, double k,
                                        double psi_M) {
  check_sizes(rho0, du0, grid);
  if (k > 0.0) {
    const auto peak = static_cast<std::size_t>(
        std::distance(rho0.begin(), std::max_element(rho0.begin(), rho0.end())));
    return with_witness(Region::Supercritical, peak, -k, grid);
  }
  if (k == 0.0) return classify_euler_alignment(rho0, du0, kernel, grid);
  if (kernel.is_constant() && psi_M == 1.0) return classify_constant_psi(rho0, du0, grid, k);

  const std::vector<double> conv = psi_convolution(rho0, kernel, grid);
  double sub_margin = std::numeric_limits<double>::infinity();
  double super_margin = std::numeric_limits<double>::infinity();
  std::size_t sub_node = 0, super_node = 0;
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const double e = du0[i] + conv[i];
    const double a = e - sigma_plus(k, rho0[i], psi_M);
    const double b = e - sigma_minus(k, rho0[i]);
    if (a < sub_margin) {
      sub_margin = a;
      sub_node = i;
    }
    if (b < super_margin) {
      super_margin = b;
      super_node = i;
    }
  }
  if (super_margin < 0.0) return with_witness(Region::Supercritical, super_node, super_margin, grid);
  if (sub_margin >= 0.0) {
    ThresholdVerdict v;
    v.margin = sub_margin;
    return v;
  }
  return with_witness(Region::Gap, sub_node, sub_margin, grid);
}

ThresholdVerdict classify_constant_psi(std::span<const double> rho0, std::span<const double> du0,
                                       const Grid& grid, double k) {
  check_sizes(rho0, du0, grid);
  if (!(k < 0.0)) fail(ErrorCode::DomainError, "classify_constant_psi needs k < 0");
  double M0 = 0.0;
  for (double r : rho0) M0 += r;
  M0 *= grid.dx;
  double margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    const double a = du0[i] + M0 - sigma_plus(k, rho0[i], 1.0);
    if (a < margin) {
      margin = a;
      worst = i;
    }
  }
  if (margin > 0.0) {
    ThresholdVerdict v;
    v.margin = margin;
    return v;
  }
  return with_witness(Region::Supercritical, worst, margin, grid);
}

DampedConstants damped_constants(double M0) {
  if (!(M0 > 0.0)) fail(ErrorCode::DomainError, "M0 must be > 0");
  if (!(M0 < 0.25)) fail(ErrorCode::OutOfScope, "damped Newtonian threshold needs M0 < 1/4");
  DampedConstants c;
  c.xi = 1.0 - 4.0 * M0;
  const double r = std::sqrt(c.xi);
  c.lambda1 = 0.5 * (-1.0 + r);
  c.lambda2 = 0.5 * (-1.0 - r);
  return c;
}

ThresholdVerdict classify_damped_newtonian(std::span<const double> rho0, std::span<const double> du0,
                                           const Grid& grid, double M0) {
  check_sizes(rho0, du0, grid);
  const DampedConstants c = damped_constants(M0);
  const double r = std::sqrt(c.xi);
  double margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  bool super = false;
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (!(rho0[i] > 0.0)) continue;
    const double d = du0[i];
    const double q1 = d;
    const double q2 = (M0 - rho0[i]) - c.lambda1 * d;
    double slack = std::max(q1, q2);
    if (q1 < 0.0 && q2 < 0.0) {
      // Both bases are positive here: A > 0 by the second condition, and
      // B - A = (lambda2 - lambda1) d > 0.
      const double A = c.lambda1 * d + rho0[i] - M0;
      const double B = c.lambda2 * d + rho0[i] - M0;
      const double q3 = std::log(rho0[i]) - (-c.lambda2 / r * std::log(A) + c.lambda1 / r * std::log(B));
      slack = q3;
      if (q3 <= 0.0) super = true;
    }
    if (slack < margin) {
      margin = slack;
      worst = i;
    }
  }
  if (super) return with_witness(Region::Supercritical, worst, margin, grid);
  ThresholdVerdict v;
  v.margin = margin;
  return v;
}

BlowUpBound blowup_time_bound_newtonian(std::span<const double> rho0, std::span<const double> du0,
                                        const Grid& grid) {
  check_sizes(rho0, du0, grid);
  BlowUpBound out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    const double r = rho0[i];
    const double d = du0[i];
    if (!(r > 0.0) || !(d < 0.0)) continue;
    const double L = std::log1p(-d / (2.0 * r));
    if ((1.0 + d) / r + 2.0 * L <= 0.0) {
      ++out.witness_set_size;
      if (L < best) {
        best = L;
        out.witness = i;
      }
    }
  }
  if (out.witness_set_size > 0) {
    out.finite = true;
    out.bound = 2.0 * best;
    out.proof_bound = best;
  }
  return out;
}

BlowUpBound blowup_time_bound_log(std::span<const double> rho0, std::span<const double> du0,
                                  const Grid& grid, double M0) {
  check_sizes(rho0, du0, grid);
  const double disc = 1.0 - 4.0 * M0;
  if (disc < 0.0) fail(ErrorCode::OutOfScope, "log-potential bound needs 1 - 4 M0 >= 0");
  const double d_minus = 0.5 * (-1.0 - std::sqrt(disc));
  BlowUpBound out;
  double d_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (!(rho0[i] > 0.0)) continue;
    if (du0[i] < d_minus) ++out.witness_set_size;
    if (du0[i] < d_min) {
      d_min = du0[i];
      out.witness = i;
    }
  }
  if (d_min < d_minus) {
    out.finite = true;
    out.bound = 1.0 / (d_minus - d_min);
  } else {
    out.witness.reset();
  }
  return out;
}

}  // namespace swarmhydro
