#include "mixbench/loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "mixbench/normal.hpp"
#include "mixbench/quadrature.hpp"

namespace mixbench {

std::string_view to_string(LossMethod method) noexcept {
  return method == LossMethod::quadrature ? "quadrature" : "monte_carlo";
}

LossMethod loss_method_from_string(std::string_view name) {
  if (name == "quadrature") return LossMethod::quadrature;
  if (name == "monte_carlo") return LossMethod::monte_carlo;
  fail(Errc::ConfigError, "loss_method must be quadrature or monte_carlo, got '" + std::string(name) + "'");
}

namespace {

constexpr double kTruncation = 9.0;

struct Oriented {
  double cos_beta;
  double sin_beta;
  /// (t - mu0.v) / sigma with v oriented along h.
  double offset;
  double snr;
};

Oriented orient(const Mixture& theta, const Classifier& clf) {
  require(clf.direction.size() == theta.dim(), Errc::ShapeError, "classifier dimension differs from mixture");
  const double hnorm = theta.half_separation().norm();
  require(hnorm > 0.0, Errc::DegenerateSeparation, "mu1 == mu2");
  const VectorXd u = theta.half_separation() / hnorm;
  VectorXd v = clf.direction;
  double t = clf.threshold;
  double c = v.dot(u);
  if (c < 0.0) {
    v = -v;
    t = -t;
    c = -c;
  }
  c = std::min(c, 1.0);
  // Orthogonal residual is more accurate than sqrt(1 - c^2) for small angles.
  const double s = std::min((v - c * u).norm(), 1.0);
  return Oriented{c, s, (t - theta.center().dot(v)) / theta.sigma(), hnorm / theta.sigma()};
}

}  // namespace

GeometryDecomposition decompose(const Mixture& theta, const Classifier& clf) {
  const Oriented o = orient(theta, clf);
  const double r = o.cos_beta > 0.0 ? std::abs(o.offset * theta.sigma() / o.cos_beta)
                                     : std::numeric_limits<double>::infinity();
  return GeometryDecomposition{o.cos_beta, r, o.snr};
}

LossEstimate loss_exact_linear(const Mixture& theta, const Classifier& clf, double tol) {
  require(tol > 0.0 && tol <= 1e-4, Errc::InvalidTolerance, "tol must lie in (0, 1e-4]");
  require(std::abs(clf.direction.norm() - 1.0) <= 1e-12, Errc::InvalidClassifier, "direction is not a unit vector");
  const Oriented o = orient(theta, clf);
  if (o.cos_beta == 0.0) return LossEstimate{0.5, LossMethod::quadrature, 0.0, 0};

  const double a = o.snr;
  double p = 0.0;
  if (o.sin_beta == 0.0) {
    const double b = std::abs(o.offset);
    p = 0.5 * normal_interval(a - b, a + b);
  } else {
    const double intercept = o.offset / o.cos_beta;
    const double slope = o.sin_beta / o.cos_beta;
    auto integrand = [&](double y) {
      const double b = std::abs(intercept - y * slope);
      return normal_pdf(y) * 0.5 * normal_interval(a - b, a + b);
    };
    std::vector<double> cuts{-kTruncation};
    const double root = o.offset / o.sin_beta;
    if (root > -kTruncation && root < kTruncation) cuts.push_back(root);
    cuts.push_back(kTruncation);
    p = integrate_adaptive(integrand, cuts, 0.5 * tol).value;
  }
  p = std::clamp(p, 0.0, 1.0);
  return LossEstimate{std::min(p, 1.0 - p), LossMethod::quadrature, 0.0, 0};
}

LossEstimate loss_monte_carlo(const Mixture& theta, const LabelFunction& classify, std::int64_t n_samples,
                              std::uint64_t seed) {
  require(n_samples >= 100, Errc::TooFewSamples, "loss_monte_carlo needs at least 100 samples");
  const Classifier bayes = bayes_classifier(theta);
  const Index d = theta.dim();
  CounterRng rng(seed);
  VectorXd x(d);
  std::int64_t disagree = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double y = rng.sign();
    for (Index j = 0; j < d; ++j)
      x(j) = theta.center()(j) + y * theta.half_separation()(j) + theta.sigma() * rng.normal();
    if (classify(x) != bayes.label(x)) ++disagree;
  }
  const double p = static_cast<double>(disagree) / static_cast<double>(n_samples);
  const double value = std::min(p, 1.0 - p);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  return LossEstimate{value, LossMethod::monte_carlo, se, n_samples};
}

double g_function(double x) {
  require(x >= 0.0 && std::isfinite(x), Errc::DomainError, "g is defined for finite x >= 0");
  const double density = normal_pdf(x);
  return density * (density - x * normal_sf(x));
}

std::pair<double, double> loss_bounds_symmetric(double xi, double beta) {
  require(xi > 0.0, Errc::DomainError, "xi must be positive");
  require(beta >= 0.0 && beta < 0.5 * kPi, Errc::DomainError, "beta must lie in [0, pi/2)");
  return {2.0 * g_function(xi) * std::sin(beta) * std::cos(beta), std::tan(beta) / kPi};
}

}  // namespace mixbench
