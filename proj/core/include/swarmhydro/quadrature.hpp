#pragma once

#include <cstddef>
#include <functional>

namespace swarmhydro::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
/// The interval with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |value|) or max_intervals is hit.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     const Options& options = {});

}  // namespace swarmhydro::quadrature
