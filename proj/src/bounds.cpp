#include "mixbench/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixbench/estimators.hpp"
#include "mixbench/normal.hpp"

namespace mixbench {

std::string_view to_string(TheoremKind kind) noexcept {
  switch (kind) {
    case TheoremKind::thm1_upper: return "thm1_upper";
    case TheoremKind::thm1_upper_largesep: return "thm1_upper_largesep";
    case TheoremKind::thm2_lower: return "thm2_lower";
    case TheoremKind::thm3_upper: return "thm3_upper";
    case TheoremKind::thm4_lower: return "thm4_lower";
  }
  return "unknown";
}

TheoremKind theorem_kind_from_string(std::string_view name) {
  for (auto kind : {TheoremKind::thm1_upper, TheoremKind::thm1_upper_largesep, TheoremKind::thm2_lower,
                    TheoremKind::thm3_upper, TheoremKind::thm4_lower})
    if (to_string(kind) == name) return kind;
  fail(Errc::ConfigError, "unknown theorem kind '" + std::string(name) + "'");
}

namespace {

void hypothesis(bool ok, const std::string& condition) {
  require(ok, Errc::PreconditionViolated, "hypothesis '" + condition + "' does not hold");
}

}  // namespace

double theorem_bound(TheoremKind kind, std::int64_t n, std::int64_t d, std::int64_t s, double lambda, double sigma) {
  require(lambda > 0.0 && sigma > 0.0, Errc::DomainError, "lambda and sigma must be positive");
  require(n >= 1 && d >= 1, Errc::DomainError, "n and d must be positive");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double ss = static_cast<double>(s);
  const double ratio = lambda / sigma;
  const double inv_snr2 = sigma * sigma / (lambda * lambda);
  switch (kind) {
    case TheoremKind::thm1_upper:
      hypothesis(n >= std::max<std::int64_t>(68, 4 * d), "n >= max(68, 4d)");
      return 600.0 * std::max(4.0 * inv_snr2, 1.0) * std::sqrt(dd * std::log(nn * dd) / nn);
    case TheoremKind::thm1_upper_largesep:
      hypothesis(n >= std::max<std::int64_t>(68, 4 * d), "n >= max(68, 4d)");
      hypothesis(ratio >= 2.0 * std::max(80.0, 14.0 * std::sqrt(5.0 * dd)), "lambda/sigma >= 2 max(80, 14 sqrt(5d))");
      return 17.0 * std::exp(-nn / 32.0) + 9.0 * std::exp(-lambda * lambda / (80.0 * sigma * sigma));
    case TheoremKind::thm2_lower:
      hypothesis(d >= 9, "d >= 9");
      hypothesis(ratio <= 0.2, "lambda/sigma <= 0.2");
      return std::min(std::sqrt(std::log(2.0)) / 3.0 * inv_snr2 * std::sqrt((dd - 1.0) / nn), 0.25) / 500.0;
    case TheoremKind::thm3_upper: {
      require(s >= 1, Errc::DomainError, "s must be positive");
      hypothesis(n >= std::max<std::int64_t>(68, 4 * s), "n >= max(68, 4s)");
      hypothesis(d >= 2, "d >= 2");
      hypothesis(screening_alpha(n, d) <= 0.25, "alpha <= 1/4");
      return 603.0 * std::max(16.0 * inv_snr2, 1.0) * std::sqrt(ss * std::log(nn * ss) / nn) +
             220.0 * std::sqrt(ss) / ratio * std::pow(std::log(nn * dd) / nn, 0.25);
    }
    case TheoremKind::thm4_lower:
      hypothesis(ratio <= 0.2, "lambda/sigma <= 0.2");
      hypothesis(d >= 17, "d >= 17");
      hypothesis(s >= 5 && 4 * (s - 1) <= d - 1, "5 <= s <= (d-1)/4 + 1");
      return std::min(std::sqrt(8.0 / 45.0) * inv_snr2 * std::sqrt((ss - 1.0) / nn * std::log((dd - 1.0) / (ss - 1.0))),
                      0.5) /
             600.0;
  }
  fail(Errc::DomainError, "unknown theorem kind");
}

double kl_bound(double xi, double cos_beta) {
  require(xi >= 0.0 && std::isfinite(xi), Errc::DomainError, "xi must be finite and nonnegative");
  require(cos_beta >= 0.0 && cos_beta <= 1.0, Errc::DomainError, "cos_beta must be an absolute cosine in [0, 1]");
  const double xi2 = xi * xi;
  return xi2 * xi2 * (1.0 - cos_beta);
}

namespace {

// Moment-matched Gaussian N(center, sigma^2 I + h h^T) of a mixture.
struct GaussianSurrogate {
  VectorXd center;
  VectorXd half;
  double var;
  double log_det;
  double spike;  // sigma^2 + |h|^2

  explicit GaussianSurrogate(const Mixture& theta)
      : center(theta.center()), half(theta.half_separation()), var(theta.sigma() * theta.sigma()) {
    spike = var + half.squaredNorm();
    log_det = static_cast<double>(center.size()) * std::log(var) + std::log1p(half.squaredNorm() / var);
  }

  double quad(const VectorXd& diff) const {
    const double along = half.dot(diff);
    return (diff.squaredNorm() - along * along / spike) / var;
  }

  double log_density(const VectorXd& x) const {
    return -0.5 * (static_cast<double>(center.size()) * kLogTwoPi + log_det + quad(x - center));
  }

  // E log N(X; this) for X with mean `mean` and covariance var I + h h^T.
  double expected_log_density(const VectorXd& mean, const VectorXd& h, double data_var) const {
    const double d = static_cast<double>(center.size());
    const double along = half.dot(h);
    const double trace = (d * data_var + h.squaredNorm() - (data_var * half.squaredNorm() + along * along) / spike) / var;
    return -0.5 * (d * kLogTwoPi + log_det + trace + quad(mean - center));
  }
};

}  // namespace

MonteCarloValue kl_monte_carlo(const Mixture& theta, const Mixture& theta_prime, std::int64_t n_samples,
                               std::uint64_t seed) {
  require(theta.dim() == theta_prime.dim(), Errc::ShapeError, "mixtures differ in dimension");
  require(theta.sigma() == theta_prime.sigma(), Errc::InvalidParams, "mixtures differ in sigma");
  require(n_samples >= 10000, Errc::TooFewSamples, "kl_monte_carlo needs at least 1e4 samples");

  const GaussianSurrogate p(theta);
  const GaussianSurrogate q(theta_prime);
  const double var = theta.sigma() * theta.sigma();
  const double control_mean = p.expected_log_density(theta.center(), theta.half_separation(), var) -
                              q.expected_log_density(theta.center(), theta.half_separation(), var);

  const Index d = theta.dim();
  CounterRng rng(seed);
  VectorXd x(d);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double y = rng.sign();
    for (Index j = 0; j < d; ++j)
      x(j) = theta.center()(j) + y * theta.half_separation()(j) + theta.sigma() * rng.normal();
    const double log_ratio = mixture_log_density(theta, x) - mixture_log_density(theta_prime, x);
    const double control = p.log_density(x) - q.log_density(x);
    const double residual = log_ratio - control;
    const double delta = residual - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (residual - mean);
  }
  const double nn = static_cast<double>(n_samples);
  return MonteCarloValue{control_mean + mean, std::sqrt(m2 / (nn - 1.0) / nn)};
}

std::string_view to_string(ConcentrationKind kind) noexcept {
  switch (kind) {
    case ConcentrationKind::chisq_upper: return "chisq_upper";
    case ConcentrationKind::chisq_lower: return "chisq_lower";
    case ConcentrationKind::gaussian_mean: return "gaussian_mean";
    case ConcentrationKind::prodnormal: return "prodnormal";
    case ConcentrationKind::wishart_spectral: return "wishart_spectral";
    case ConcentrationKind::mean_concentration: return "mean_concentration";
    case ConcentrationKind::angle_concentration: return "angle_concentration";
    case ConcentrationKind::perdim_variance: return "perdim_variance";
  }
  return "unknown";
}

ConcentrationKind concentration_kind_from_string(std::string_view name) {
  for (auto kind : {ConcentrationKind::chisq_upper, ConcentrationKind::chisq_lower, ConcentrationKind::gaussian_mean,
                    ConcentrationKind::prodnormal, ConcentrationKind::wishart_spectral,
                    ConcentrationKind::mean_concentration, ConcentrationKind::angle_concentration,
                    ConcentrationKind::perdim_variance})
    if (to_string(kind) == name) return kind;
  fail(Errc::ConfigError, "unknown concentration kind '" + std::string(name) + "'");
}

double concentration_bound(ConcentrationKind kind, const ConcentrationParams& p) {
  auto log_inv_delta = [&] {
    require(p.delta > 0.0, Errc::PreconditionViolated, "delta must be positive");
    return std::log(1.0 / p.delta);
  };
  switch (kind) {
    case ConcentrationKind::chisq_upper:
    case ConcentrationKind::gaussian_mean:
      require(p.d >= 1.0 && p.epsilon > 0.0, Errc::PreconditionViolated, "need d >= 1 and eps > 0");
      return std::exp(-0.5 * p.d * (p.epsilon - std::log1p(p.epsilon)));
    case ConcentrationKind::chisq_lower:
      require(p.d >= 1.0 && p.epsilon > 0.0, Errc::PreconditionViolated, "need d >= 1 and eps > 0");
      require(p.epsilon < 1.0, Errc::PreconditionViolated, "the lower chi-square tail needs eps < 1");
      return std::exp(0.5 * p.d * (p.epsilon + std::log1p(-p.epsilon)));
    case ConcentrationKind::prodnormal:
      require(p.n >= 1.0 && p.epsilon > 0.0, Errc::PreconditionViolated, "need n >= 1 and eps > 0");
      return 2.0 * std::exp(-p.n * p.epsilon * std::min(1.0, p.epsilon) / 10.0);
    case ConcentrationKind::wishart_spectral: {
      require(p.d >= 1.0 && p.n >= p.d, Errc::PreconditionViolated, "need n >= d >= 1");
      const double l = log_inv_delta();
      const double root = std::sqrt(p.d / p.n);
      const double a = 1.0 + std::sqrt(2.0 * l / p.d);
      const double b = 8.0 * l / p.d;
      return 3.0 * a * root * std::max(1.0, a * root) + (1.0 + std::sqrt(b * std::max(1.0, b))) * p.d / p.n;
    }
    case ConcentrationKind::mean_concentration: {
      require(p.d >= 1.0 && p.n >= 1.0 && p.sigma > 0.0 && p.mean_norm >= 0.0, Errc::PreconditionViolated,
              "need d, n >= 1, sigma > 0, |mu| >= 0");
      const double l = log_inv_delta();
      return p.sigma * std::sqrt(2.0 * std::max(p.d, 8.0 * l) / p.n) + p.mean_norm * std::sqrt(2.0 * l / p.n);
    }
    case ConcentrationKind::angle_concentration: {
      require(p.d > 1.0, Errc::PreconditionViolated, "need d > 1");
      require(p.n >= 4.0 * p.d, Errc::PreconditionViolated, "need n >= 4d");
      require(p.delta > 0.0 && p.delta < (p.d - 1.0) / std::sqrt(std::exp(1.0)), Errc::PreconditionViolated,
              "need 0 < delta < (d-1)/sqrt(e)");
      require(p.mean_norm > 0.0 && p.sigma > 0.0, Errc::PreconditionViolated, "need |mu| > 0 and sigma > 0");
      const double l = log_inv_delta();
      const double ratio = std::max(p.sigma * p.sigma / (p.mean_norm * p.mean_norm), p.sigma / p.mean_norm);
      require(ratio * std::sqrt(std::max(p.d, 8.0 * l) / p.n) <= 1.0 / 160.0, Errc::PreconditionViolated,
              "need max(sigma^2/|mu|^2, sigma/|mu|) sqrt(max(d, 8 log(1/delta)) / n) <= 1/160");
      const double c = 10.0 / p.n * std::log(p.d / p.delta);
      return 14.0 * ratio * std::sqrt(p.d) * std::sqrt(c * std::max(1.0, c));
    }
    case ConcentrationKind::perdim_variance: {
      require(p.delta > 0.0 && p.delta < 1.0 / std::sqrt(std::exp(1.0)), Errc::PreconditionViolated,
              "need 0 < delta < 1/sqrt(e)");
      require(p.n >= 1.0 && p.sigma > 0.0, Errc::PreconditionViolated, "need n >= 1 and sigma > 0");
      const double l = log_inv_delta();
      require(std::sqrt(6.0 * l / p.n) <= 0.5, Errc::PreconditionViolated, "need sqrt(6 log(1/delta) / n) <= 1/2");
      const double m = std::abs(p.mean_norm);
      return p.sigma * p.sigma * std::sqrt(6.0 * l / p.n) + 2.0 * p.sigma * m * std::sqrt(2.0 * l / p.n) +
             (p.sigma + m) * (p.sigma + m) * 2.0 * l / p.n;
    }
  }
  fail(Errc::DomainError, "unknown concentration kind");
}

double general_loss_upper(double eps1, double eps2, double sin_beta, double mu_over_sigma) {
  require(eps1 >= 0.0, Errc::PreconditionViolated, "need eps1 >= 0");
  require(eps2 >= 0.0 && eps2 <= 0.25, Errc::PreconditionViolated, "need 0 <= eps2 <= 1/4");
  require(sin_beta >= 0.0 && sin_beta <= 1.0 / std::sqrt(5.0), Errc::PreconditionViolated,
          "need 0 <= sin_beta <= 1/sqrt(5)");
  require(mu_over_sigma >= 0.0, Errc::PreconditionViolated, "need |mu|/sigma >= 0");
  const double m = mu_over_sigma;
  const double shrink = std::max(0.0, 0.5 * m - 2.0 * eps1);
  return std::exp(-0.5 * shrink * shrink) * (2.0 * eps1 + eps2 * m + 2.0 * sin_beta * (2.0 * sin_beta * m + 1.0));
}

void BoundReport::set_empirical(double value, double se, double slack_value) {
  empirical_value = value;
  std_err = se;
  slack = slack_value;
  holds = direction == BoundDirection::upper ? value <= bound_value + slack_value : value >= bound_value - slack_value;
}

BoundReport verify_chisq_tail(bool upper, std::int64_t d, double epsilon, std::int64_t trials, std::uint64_t seed) {
  require(trials >= 1, Errc::TooFewSamples, "need at least one trial");
  ConcentrationParams params;
  params.d = static_cast<double>(d);
  params.epsilon = epsilon;
  BoundReport report;
  report.kind = upper ? "chisq_upper" : "chisq_lower";
  report.params = {{"d", params.d}, {"epsilon", epsilon}, {"trials", static_cast<double>(trials)}};
  report.bound_value = concentration_bound(upper ? ConcentrationKind::chisq_upper : ConcentrationKind::chisq_lower, params);
  const double cut = (upper ? 1.0 + epsilon : 1.0 - epsilon) * params.d;
  CounterRng rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    double sum = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
      const double z = rng.normal();
      sum += z * z;
    }
    if (upper ? sum > cut : sum < cut) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double se = std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
  report.set_empirical(freq, se, 3.0 * se);
  return report;
}

BoundReport verify_prodnormal(std::int64_t n, double epsilon, std::int64_t trials, std::uint64_t seed) {
  require(trials >= 1, Errc::TooFewSamples, "need at least one trial");
  ConcentrationParams params;
  params.n = static_cast<double>(n);
  params.epsilon = epsilon;
  BoundReport report;
  report.kind = "prodnormal";
  report.params = {{"n", params.n}, {"epsilon", epsilon}, {"trials", static_cast<double>(trials)}};
  report.bound_value = concentration_bound(ConcentrationKind::prodnormal, params);
  CounterRng rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    double sum = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
      const double x = rng.normal();
      sum += x * rng.normal();
    }
    if (std::abs(sum / params.n) > 0.5 * epsilon) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double se = std::sqrt(freq * (1.0 - freq) / static_cast<double>(trials));
  report.set_empirical(freq, se, 3.0 * se);
  return report;
}

BoundReport verify_kl(const Mixture& theta, const Mixture& theta_prime, std::int64_t n_samples, std::uint64_t seed) {
  const double norm = theta.half_separation().norm();
  require((theta.center() - theta_prime.center()).norm() <= 1e-12 * std::max(1.0, theta.center().norm()),
          Errc::PreconditionViolated, "pair must share its center");
  require(std::abs(norm - theta_prime.half_separation().norm()) <= 1e-12 * std::max(1.0, norm),
          Errc::PreconditionViolated, "pair must have equal separation");
  require(norm > 0.0, Errc::DegenerateSeparation, "mu1 == mu2");
  const double xi = norm / theta.sigma();
  const double cos_beta =
      std::min(1.0, std::abs(theta.half_separation().dot(theta_prime.half_separation())) / (norm * norm));
  BoundReport report;
  report.kind = "kl";
  report.params = {{"xi", xi}, {"cos_beta", cos_beta}, {"d", static_cast<double>(theta.dim())},
                   {"samples", static_cast<double>(n_samples)}};
  report.bound_value = kl_bound(xi, cos_beta);
  const auto mc = kl_monte_carlo(theta, theta_prime, n_samples, seed);
  report.set_empirical(mc.estimate, mc.std_err, 3.0 * mc.std_err);
  return report;
}

}  // namespace mixbench
