#pragma once

#include <functional>
#include <span>

namespace mixbench {

struct QuadratureResult {
  double value = 0.0;
  /// Sum of per-interval |K15 - G7| estimates.
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over
/// [breakpoints.front(), breakpoints.back()]. Interior breakpoints seed the
/// initial partition (use them for kinks). The interval with the largest
/// error estimate is bisected until the total estimate is <= abs_tol or
/// max_intervals is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, std::span<const double> breakpoints,
                                    double abs_tol, int max_intervals = 4000);

}  // namespace mixbench
