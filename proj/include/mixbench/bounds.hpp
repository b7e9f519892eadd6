#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mixbench/loss.hpp"

namespace mixbench {

enum class TheoremKind { thm1_upper, thm1_upper_largesep, thm2_lower, thm3_upper, thm4_lower };

std::string_view to_string(TheoremKind kind) noexcept;
TheoremKind theorem_kind_from_string(std::string_view name);

/// Right-hand side of the minimax theorems, natural logs throughout.
/// Each kind enforces its own hypotheses and throws PreconditionViolated
/// naming the first one that fails:
///
///   thm1_upper          n >= max(68, 4d)
///                       600 max(4 sigma^2 / lambda^2, 1) sqrt(d log(nd) / n)
///   thm1_upper_largesep n >= max(68, 4d), lambda / sigma >= 2 max(80, 14 sqrt(5d))
///                       17 exp(-n / 32) + 9 exp(-lambda^2 / (80 sigma^2))
///   thm2_lower          d >= 9, lambda / sigma <= 0.2
///                       1/500 min{ sqrt(log 2)/3 sigma^2/lambda^2 sqrt((d-1)/n), 1/4 }
///   thm3_upper          n >= max(68, 4s), d >= 2, alpha(n, d) <= 1/4
///                       603 max(16 sigma^2 / lambda^2, 1) sqrt(s log(ns) / n)
///                         + 220 sigma sqrt(s) / lambda (log(nd) / n)^(1/4)
///   thm4_lower          lambda / sigma <= 0.2, d >= 17, 5 <= s <= (d-1)/4 + 1
///                       1/600 min{ sqrt(8/45) sigma^2/lambda^2
///                                  sqrt((s-1)/n log((d-1)/(s-1))), 1/2 }
///
/// Values above 1/2 are returned as is; see is_vacuous.
double theorem_bound(TheoremKind kind, std::int64_t n, std::int64_t d, std::int64_t s, double lambda, double sigma);

/// A loss bound above 1/2 carries no information.
inline bool is_vacuous(double loss_bound) { return loss_bound > 0.5; }

/// xi^4 (1 - cos_beta) for an equal-norm, common-center pair, where
/// xi = |h| / sigma and cos_beta = |h.h'| / |h|^2.
double kl_bound(double xi, double cos_beta);

struct MonteCarloValue {
  double estimate = 0.0;
  double std_err = 0.0;
};

/// KL(P_theta, P_theta') by Monte Carlo over X ~ P_theta on stream `seed`.
/// The log-ratio is paired with the log-ratio of the moment-matched
/// Gaussians as a control variate, whose expectation under P_theta is
/// available in closed form; the estimate stays unbiased. Exactly 0 with
/// zero standard error when theta_prime == theta.
MonteCarloValue kl_monte_carlo(const Mixture& theta, const Mixture& theta_prime, std::int64_t n_samples,
                               std::uint64_t seed);

enum class ConcentrationKind {
  chisq_upper,
  chisq_lower,
  gaussian_mean,
  prodnormal,
  wishart_spectral,
  mean_concentration,
  angle_concentration,
  perdim_variance,
};

std::string_view to_string(ConcentrationKind kind) noexcept;
ConcentrationKind concentration_kind_from_string(std::string_view name);

/// Inputs of the concentration bounds; each kind reads the fields it needs.
struct ConcentrationParams {
  double d = 0;
  double n = 0;
  double epsilon = 0;
  double delta = 0;
  double sigma = 1;
  /// |mu| for mean/angle bounds, |mu(i)| for the per-coordinate variance bound.
  double mean_norm = 0;
};

/// Tail probabilities (chisq_upper, chisq_lower, gaussian_mean, prodnormal)
/// or deviation radii holding with the stated probability (the rest):
///
///   chisq_upper      P(chi2_d > (1+eps) d)          <= exp(-d (eps - log(1+eps)) / 2)
///   chisq_lower      P(chi2_d < (1-eps) d), eps < 1 <= exp(d (eps + log(1-eps)) / 2)
///   gaussian_mean    P(|mean of n N(0,I_d)| >= sqrt((1+eps) d / n)), same value as chisq_upper
///   prodnormal       P(|mean of n products X_i Y_i| > eps/2) <= 2 exp(-n eps min(1, eps) / 10)
///   wishart_spectral |Sigma_hat - I|_2 radius, prob >= 1 - 3 delta, n >= d
///   mean_concentration   sigma sqrt(2 max(d, 8 L) / n) + |mu| sqrt(2 L / n), prob >= 1 - 3 delta
///   angle_concentration  14 max(sigma^2/|mu|^2, sigma/|mu|) sqrt(d)
///                        sqrt(10/n log(d/delta) max(1, 10/n log(d/delta)))
///   perdim_variance      sigma^2 sqrt(6L/n) + 2 sigma |mu_i| sqrt(2L/n) + (sigma + |mu_i|)^2 2L/n
///
/// with L = log(1/delta).
double concentration_bound(ConcentrationKind kind, const ConcentrationParams& params);

/// exp{-1/2 max(0, m/2 - 2 eps1)^2} [2 eps1 + eps2 m + 2 sin_beta (2 sin_beta m + 1)],
/// m = |h| / sigma. Requires eps1 >= 0, 0 <= eps2 <= 1/4, sin_beta <= 1/sqrt(5).
double general_loss_upper(double eps1, double eps2, double sin_beta, double mu_over_sigma);

enum class BoundDirection { upper, lower };

/// One bound evaluation, optionally confronted with an empirical value.
/// For an upper bound the check is empirical <= bound + slack, for a lower
/// bound empirical >= bound - slack; Monte-Carlo checks use slack = 3 se.
struct BoundReport {
  std::string kind;
  std::map<std::string, double> params;
  double bound_value = 0.0;
  BoundDirection direction = BoundDirection::upper;
  std::optional<double> empirical_value;
  double std_err = 0.0;
  double slack = 0.0;
  std::optional<bool> holds;
  bool vacuous = false;

  void set_empirical(double value, double se, double slack_value);
};

/// Monte-Carlo frequency of the chi-square tail event against its bound.
BoundReport verify_chisq_tail(bool upper, std::int64_t d, double epsilon, std::int64_t trials, std::uint64_t seed);

/// Monte-Carlo frequency of |mean X_i Y_i| > eps/2 against the product-normal bound.
BoundReport verify_prodnormal(std::int64_t n, double epsilon, std::int64_t trials, std::uint64_t seed);

/// kl_monte_carlo against kl_bound for an equal-norm, common-center pair.
BoundReport verify_kl(const Mixture& theta, const Mixture& theta_prime, std::int64_t n_samples, std::uint64_t seed);

}  // namespace mixbench
