#pragma once

// Standard normal density and distribution function helpers.

namespace mixbench {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogTwoPi = 1.83787706640934548356;

double normal_pdf(double x) noexcept;
double normal_log_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x) noexcept;
/// Phi(upper) - Phi(lower) without cancellation in either tail.
double normal_interval(double lower, double upper) noexcept;

}  // namespace mixbench
