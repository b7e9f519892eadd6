#include "mixbench/normal.hpp"

#include <cmath>

namespace mixbench {

namespace {
constexpr double kInvSqrtTwo = 0.70710678118654752440;
constexpr double kInvSqrtTwoPi = 0.39894228040143267794;
}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrtTwoPi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) noexcept { return -0.5 * (kLogTwoPi + x * x); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrtTwo); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrtTwo); }

double normal_interval(double lower, double upper) noexcept {
  if (upper <= lower) return 0.0;
  if (lower > 0.0) return normal_sf(lower) - normal_sf(upper);
  if (upper < 0.0) return normal_cdf(upper) - normal_cdf(lower);
  return 1.0 - normal_sf(upper) - normal_cdf(lower);
}

}  // namespace mixbench
