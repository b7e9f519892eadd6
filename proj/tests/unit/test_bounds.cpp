#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixbench/bounds.hpp"
#include "mixbench/serialize.hpp"
#include "mixbench/verify.hpp"

using namespace mixbench;

namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoError;
}

// Exact KL between two one-dimensional symmetric mixtures, by composite
// Simpson on a wide window. Independent of the library's sampler.
double mix_pdf(double x, double c, double h, double sigma) {
  auto n = [&](double m) { return std::exp(-0.5 * (x - m) * (x - m) / (sigma * sigma)) / (sigma * std::sqrt(2 * M_PI)); };
  return 0.5 * n(c - h) + 0.5 * n(c + h);
}

double kl_1d(double c, double h, double hp, double sigma) {
  const double lo = c - std::max(h, hp) - 14 * sigma, hi = c + std::max(h, hp) + 14 * sigma;
  const int n = 200000;
  const double step = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * step;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double p = mix_pdf(x, c, h, sigma), q = mix_pdf(x, c, hp, sigma);
    if (p > 0 && q > 0) acc += w * p * std::log(p / q);
  }
  return acc * step / 3.0;
}

}  // namespace

TEST_CASE("theorem bounds evaluate their displayed formulas") {
  const double t1 = 600.0 * 4.0 * std::sqrt(10.0 * std::log(1e5) / 1e4);
  CHECK(theorem_bound(TheoremKind::thm1_upper, 10000, 10, 1, 1.0, 1.0) == doctest::Approx(t1).epsilon(1e-12));
  CHECK(theorem_bound(TheoremKind::thm1_upper, 10000, 10, 1, 1.0, 1.0) == doctest::Approx(257.5).epsilon(1e-3));

  const double t2 = std::min(std::sqrt(std::log(2.0)) / 3.0 * 25.0 * 0.03, 0.25) / 500.0;
  CHECK(theorem_bound(TheoremKind::thm2_lower, 10000, 10, 1, 0.2, 1.0) == doctest::Approx(t2).epsilon(1e-12));
  CHECK(theorem_bound(TheoremKind::thm2_lower, 10000, 10, 1, 0.2, 1.0) == doctest::Approx(4.163e-4).epsilon(1e-3));

  const double n = 20000, d = 300, s = 5, lam = 1.5, sig = 1.0;
  const double t3 = 603.0 * std::max(16.0 * sig * sig / (lam * lam), 1.0) * std::sqrt(s * std::log(n * s) / n) +
                    220.0 * sig * std::sqrt(s) / lam * std::pow(std::log(n * d) / n, 0.25);
  CHECK(theorem_bound(TheoremKind::thm3_upper, 20000, 300, 5, lam, sig) == doctest::Approx(t3).epsilon(1e-12));

  const double t4 = std::min(std::sqrt(8.0 / 45.0) / 0.04 * std::sqrt(4.0 / 1e4 * std::log(100.0 / 4.0)), 0.5) / 600.0;
  CHECK(theorem_bound(TheoremKind::thm4_lower, 10000, 101, 5, 0.2, 1.0) == doctest::Approx(t4).epsilon(1e-12));

  const double lam_big = 2.0 * 14.0 * std::sqrt(50.0) + 1.0;
  const double t1b = 17.0 * std::exp(-1000.0 / 32.0) + 9.0 * std::exp(-lam_big * lam_big / 80.0);
  CHECK(theorem_bound(TheoremKind::thm1_upper_largesep, 1000, 10, 1, lam_big, 1.0) == doctest::Approx(t1b));
}

TEST_CASE("theorem hypotheses are enforced") {
  CHECK(code_of([] { theorem_bound(TheoremKind::thm2_lower, 10000, 5, 1, 0.2, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm2_lower, 10000, 10, 1, 0.5, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm1_upper, 60, 10, 1, 1.0, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm1_upper, 100, 30, 1, 1.0, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm1_upper_largesep, 1000, 10, 1, 5.0, 1.0); }) ==
        Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm3_upper, 100, 1000, 4, 1.0, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm4_lower, 10000, 17, 4, 0.2, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm4_lower, 10000, 17, 6, 0.2, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { theorem_bound(TheoremKind::thm1_upper, 1000, 10, 1, 0.0, 1.0); }) == Errc::DomainError);
  CHECK(code_of([] { theorem_kind_from_string("thm9"); }) != Errc::IoError);
  for (auto k : {TheoremKind::thm1_upper, TheoremKind::thm1_upper_largesep, TheoremKind::thm2_lower,
                 TheoremKind::thm3_upper, TheoremKind::thm4_lower})
    CHECK(theorem_kind_from_string(to_string(k)) == k);
}

TEST_CASE("theorem bounds are nonnegative and monotone") {
  double prev = INFINITY;
  for (std::int64_t n = 100; n <= 1'000'000; n *= 10) {
    const double v = theorem_bound(TheoremKind::thm1_upper, n, 20, 1, 1.0, 1.0);
    CHECK(v >= 0.0);
    CHECK(v < prev);
    prev = v;
  }
  prev = 0.0;
  for (std::int64_t d = 2; d <= 200; d *= 2) {
    const double v = theorem_bound(TheoremKind::thm1_upper, 100000, d, 1, 1.0, 1.0);
    CHECK(v > prev);
    prev = v;
  }
  // thm2: increasing in d, decreasing in n and lambda (below the 1/4 cap)
  prev = 0.0;
  for (std::int64_t d = 9; d <= 9 * 64; d *= 2) {
    const double v = theorem_bound(TheoremKind::thm2_lower, 1'000'000, d, 1, 0.2, 1.0);
    CHECK(v > prev);
    prev = v;
  }
  prev = INFINITY;
  for (std::int64_t n = 10000; n <= 10'000'000; n *= 10) {
    const double v = theorem_bound(TheoremKind::thm2_lower, n, 10, 1, 0.2, 1.0);
    CHECK(v >= 0.0);
    CHECK(v < prev);
    prev = v;
  }
  prev = INFINITY;
  for (double lam : {0.05, 0.1, 0.15, 0.2}) {
    const double v = theorem_bound(TheoremKind::thm2_lower, 1'000'000, 10, 1, lam, 1.0);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(is_vacuous(theorem_bound(TheoremKind::thm1_upper, 10000, 10, 1, 1.0, 1.0)));
  CHECK_FALSE(is_vacuous(theorem_bound(TheoremKind::thm2_lower, 10000, 10, 1, 0.2, 1.0)));
}

TEST_CASE("kl_bound") {
  CHECK(kl_bound(0.7, 1.0) == 0.0);
  CHECK(kl_bound(0.1, 0.0) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(kl_bound(0.3, 0.5) < kl_bound(0.3, 0.0));
  CHECK(kl_bound(0.0, 0.3) == 0.0);
  CHECK(code_of([] { kl_bound(0.2, -0.1); }) == Errc::DomainError);
  CHECK(code_of([] { kl_bound(0.2, 1.1); }) == Errc::DomainError);
  CHECK(code_of([] { kl_bound(-0.2, 0.5); }) == Errc::DomainError);
}

TEST_CASE("kl_monte_carlo") {
  const Mixture theta(VectorXd::Constant(3, -0.2), VectorXd::Constant(3, 0.2), 1.0);

  SUBCASE("identical mixtures give exactly zero") {
    const auto mc = kl_monte_carlo(theta, theta, 10000, 3);
    CHECK(mc.estimate == 0.0);
    CHECK(mc.std_err == 0.0);
  }

  SUBCASE("stays under the symmetric-pair bound") {
    CounterRng rng(17);
    const double beta = std::acos(0.8);
    const auto [a, b] = random_equal_norm_pair(rng, 4, 0.5, 1.3, beta);
    const auto mc = kl_monte_carlo(a, b, 100000, 5);
    CHECK(mc.estimate <= kl_bound(0.5, 0.8) + 3.0 * mc.std_err);
    const auto report = verify_kl(a, b, 100000, 5);
    CHECK(report.holds.value());
    CHECK(report.empirical_value.value() == mc.estimate);
  }

  SUBCASE("deterministic per seed") {
    const Mixture other(VectorXd::Constant(3, -0.1), VectorXd::Constant(3, 0.3), 1.0);
    const auto a = kl_monte_carlo(theta, other, 20000, 9);
    const auto b = kl_monte_carlo(theta, other, 20000, 9);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_err == b.std_err);
  }

  SUBCASE("dimension mismatch") {
    const Mixture other(VectorXd::Constant(2, -0.1), VectorXd::Constant(2, 0.3), 1.0);
    CHECK(code_of([&] { kl_monte_carlo(theta, other, 10000, 1); }) == Errc::ShapeError);
  }

  SUBCASE("agrees with a quadrature oracle in one dimension") {
    struct Case {
      double c, h, hp, sigma;
    };
    for (const Case& k : {Case{0.0, 0.5, 0.2, 1.0}, Case{1.0, 1.5, 0.5, 1.0}, Case{-0.3, 0.8, 1.2, 0.7},
                          Case{0.0, 0.3, -0.6, 1.0}}) {
      const Mixture p = Mixture::from_center(VectorXd::Constant(1, k.c), VectorXd::Constant(1, k.h), k.sigma);
      const Mixture q = Mixture::from_center(VectorXd::Constant(1, k.c), VectorXd::Constant(1, k.hp), k.sigma);
      const double exact = kl_1d(k.c, k.h, k.hp, k.sigma);
      const auto mc = kl_monte_carlo(p, q, 200000, 11);
      CAPTURE(exact);
      CAPTURE(mc.estimate);
      CHECK(std::abs(mc.estimate - exact) <= 4.0 * mc.std_err + 1e-9);
      CHECK(mc.std_err < 0.05 * exact + 1e-6);
    }
  }
}

TEST_CASE("concentration bounds") {
  ConcentrationParams p;
  p.d = 10;
  p.epsilon = 0.5;
  CHECK(concentration_bound(ConcentrationKind::chisq_upper, p) == doctest::Approx(std::exp(-5.0 * (0.5 - std::log(1.5)))));
  CHECK(concentration_bound(ConcentrationKind::chisq_upper, p) == doctest::Approx(0.6233).epsilon(1e-3));
  CHECK(concentration_bound(ConcentrationKind::gaussian_mean, p) ==
        concentration_bound(ConcentrationKind::chisq_upper, p));
  CHECK(concentration_bound(ConcentrationKind::chisq_lower, p) == doctest::Approx(std::exp(5.0 * (0.5 + std::log(0.5)))));
  p.epsilon = 1.0;
  CHECK(code_of([&] { concentration_bound(ConcentrationKind::chisq_lower, p); }) == Errc::PreconditionViolated);

  ConcentrationParams q;
  q.n = 100;
  q.epsilon = 1.0;
  CHECK(concentration_bound(ConcentrationKind::prodnormal, q) == doctest::Approx(2.0 * std::exp(-10.0)).epsilon(1e-12));
  CHECK(concentration_bound(ConcentrationKind::prodnormal, q) == doctest::Approx(9.08e-5).epsilon(1e-3));
  q.epsilon = 0.5;
  CHECK(concentration_bound(ConcentrationKind::prodnormal, q) == doctest::Approx(2.0 * std::exp(-100 * 0.25 / 10)));

  ConcentrationParams m;
  m.d = 20;
  m.n = 1000;
  m.delta = 0.01;
  m.sigma = 2.0;
  m.mean_norm = 1.5;
  const double l = std::log(100.0);
  CHECK(concentration_bound(ConcentrationKind::mean_concentration, m) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * std::max(20.0, 8.0 * l) / 1000.0) + 1.5 * std::sqrt(2.0 * l / 1000.0)));
  CHECK(concentration_bound(ConcentrationKind::perdim_variance, m) ==
        doctest::Approx(4.0 * std::sqrt(6 * l / 1000) + 2 * 2.0 * 1.5 * std::sqrt(2 * l / 1000) + 3.5 * 3.5 * 2 * l / 1000));
  CHECK(concentration_bound(ConcentrationKind::wishart_spectral, m) > 0.0);
  m.delta = 0.0;
  CHECK(code_of([&] { concentration_bound(ConcentrationKind::mean_concentration, m); }) == Errc::PreconditionViolated);

  for (auto k : {ConcentrationKind::chisq_upper, ConcentrationKind::chisq_lower, ConcentrationKind::gaussian_mean,
                 ConcentrationKind::prodnormal, ConcentrationKind::wishart_spectral, ConcentrationKind::mean_concentration,
                 ConcentrationKind::angle_concentration, ConcentrationKind::perdim_variance})
    CHECK(concentration_kind_from_string(to_string(k)) == k);
}

TEST_CASE("general_loss_upper examples") {
  CHECK(general_loss_upper(0.0, 0.0, 0.0, 3.0) == 0.0);
  CHECK(general_loss_upper(0.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(general_loss_upper(0.1, 0.1, 0.2, 1.0) == doctest::Approx(std::exp(-0.045) * 0.86).epsilon(1e-12));
  CHECK(general_loss_upper(0.1, 0.1, 0.2, 1.0) == doctest::Approx(0.8222).epsilon(1e-3));
  CHECK(code_of([] { general_loss_upper(0.1, 0.3, 0.2, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { general_loss_upper(0.1, 0.1, 0.5, 1.0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { general_loss_upper(-0.1, 0.1, 0.2, 1.0); }) == Errc::PreconditionViolated);
}

TEST_CASE("general_loss_upper dominates the exact loss") {
  CounterRng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + static_cast<Index>(rng.uniform() * 6);
    const double sigma = 0.5 + 1.5 * rng.uniform();
    VectorXd mu(d), center(d), w(d);
    for (Index i = 0; i < d; ++i) {
      mu(i) = rng.normal();
      center(i) = rng.normal();
      w(i) = rng.normal();
    }
    mu *= sigma * 4.0 * rng.uniform() / mu.norm();
    if (mu.norm() == 0.0) continue;
    const VectorXd u = mu.normalized();
    w -= w.dot(u) * u;
    w.normalize();
    const double sin_beta = rng.uniform() / std::sqrt(5.0);
    const VectorXd v = std::sqrt(1.0 - sin_beta * sin_beta) * u + sin_beta * w;
    const double eps1 = 0.5 * rng.uniform();
    const double eps2 = 0.25 * rng.uniform();
    const double offset = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (sigma * eps1 + mu.norm() * eps2);
    const Mixture theta = Mixture::from_center(center, mu, sigma);
    const Classifier clf{v, center.dot(v) + offset, false};
    const double loss = loss_exact_linear(theta, clf).value;
    const double bound = general_loss_upper(eps1, eps2, sin_beta, mu.norm() / sigma);
    CAPTURE(trial);
    CHECK(loss <= bound + 1e-9);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("Monte-Carlo tail verification") {
  for (std::int64_t d : {5, 50})
    for (double eps : {0.1, 0.5, 1.0}) {
      const auto r = verify_chisq_tail(true, d, eps, 20000, 7);
      CAPTURE(d);
      CAPTURE(eps);
      CHECK(r.holds.value());
      CHECK(r.slack == doctest::Approx(3.0 * r.std_err));
    }
  for (double eps : {0.1, 0.5}) CHECK(verify_chisq_tail(false, 50, eps, 20000, 8).holds.value());
  for (std::int64_t n : {50, 500}) CHECK(verify_prodnormal(n, 0.5, 5000, 9).holds.value());

  // The empirical frequency is what it claims: P(chi2_1 > 2) is about 0.1573.
  const auto r = verify_chisq_tail(true, 1, 1.0, 100000, 10);
  CHECK(std::abs(r.empirical_value.value() - 0.157299) < 4.0 * r.std_err);

  const auto a = verify_prodnormal(50, 0.5, 2000, 4);
  const auto b = verify_prodnormal(50, 0.5, 2000, 4);
  CHECK(a.empirical_value == b.empirical_value);
}

TEST_CASE("BoundReport verdicts and JSON") {
  BoundReport up;
  up.kind = "x";
  up.bound_value = 0.1;
  up.set_empirical(0.12, 0.01, 0.03);
  CHECK(up.holds.value());
  up.set_empirical(0.14, 0.01, 0.03);
  CHECK_FALSE(up.holds.value());

  BoundReport low;
  low.direction = BoundDirection::lower;
  low.bound_value = 0.5;
  low.set_empirical(0.45, 0.0, 0.0);
  CHECK_FALSE(low.holds.value());

  BoundReport r;
  r.kind = "thm1_upper";
  r.params = {{"n", 1000.0}, {"d", 5.0}};
  r.bound_value = 3.5;
  r.vacuous = true;
  r.set_empirical(0.2, 0.01, 0.03);
  const nlohmann::json j = r;
  const auto back = j.get<BoundReport>();
  CHECK(back.kind == r.kind);
  CHECK(back.params == r.params);
  CHECK(back.bound_value == r.bound_value);
  CHECK(back.direction == r.direction);
  CHECK(back.empirical_value == r.empirical_value);
  CHECK(back.holds == r.holds);
  CHECK(back.vacuous);

  BoundReport bare;
  bare.kind = "y";
  bare.bound_value = 0.25;
  const auto back2 = nlohmann::json(bare).get<BoundReport>();
  CHECK_FALSE(back2.empirical_value.has_value());
  CHECK_FALSE(back2.holds.has_value());
}
