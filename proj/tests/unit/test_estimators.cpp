#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "mixbench/estimators.hpp"
#include "mixbench/loss.hpp"
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

Dataset<double> from_points(MatrixXd points) {
  Dataset<double> data;
  data.points = std::move(points);
  return data;
}

Mixture spiked(const VectorXd& h, double sigma = 1.0) {
  return Mixture::from_center(VectorXd::Zero(h.size()), h, sigma);
}

double spectral_norm(const MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("sample mean and covariance") {
  SUBCASE("identical points") {
    MatrixXd p(4, 3);
    p.rowwise() = Eigen::RowVector3d(1.0, -2.0, 0.5);
    const auto mc = sample_mean_cov(p);
    CHECK(mc.mean == Eigen::Vector3d(1.0, -2.0, 0.5));
    CHECK(mc.cov.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("two points, 1/n normalization") {
    MatrixXd p(2, 2);
    p << 1, 0, -1, 0;
    const auto mc = sample_mean_cov(from_points(p));
    CHECK(mc.mean.norm() == 0.0);
    CHECK(mc.cov(0, 0) == 1.0);
    CHECK(mc.cov(1, 1) == 0.0);
    CHECK(mc.cov(0, 1) == 0.0);
  }
  SUBCASE("large sample approaches sigma^2 I + h h^T") {
    VectorXd h = VectorXd::Zero(5);
    h << 0.6, 0.0, -0.8, 0.0, 0.0;
    const auto data = sample(spiked(h), 1000000, 5);
    const auto mc = sample_mean_cov(data);
    const MatrixXd population = MatrixXd::Identity(5, 5) + h * h.transpose();
    CHECK(spectral_norm(mc.cov - population) <= 0.02);
    CHECK((mc.cov - mc.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(mc.cov).eigenvalues().minCoeff() >= -1e-10);
  }
  SUBCASE("empty") { CHECK(code_of([] { sample_mean_cov(MatrixXd(0, 3)); }) == Errc::EmptySample); }
  SUBCASE("single precision") {
    Eigen::MatrixXf p(2, 2);
    p << 1, 0, -1, 0;
    const auto mc = sample_mean_cov(p);
    CHECK(mc.cov(0, 0) == 1.0f);
  }
}

TEST_CASE("top eigenvector") {
  SUBCASE("diagonal") {
    MatrixXd m(2, 2);
    m << 3, 0, 0, 1;
    const auto r = top_eigenvector(m);
    CHECK(r.converged);
    CHECK(r.vector(0) == doctest::Approx(1.0));
    CHECK(std::abs(r.vector(1)) < 1e-10);
  }
  SUBCASE("rank-one spike along (3, 4)") {
    VectorXd h(2);
    h << 3, 4;
    const MatrixXd m = MatrixXd::Identity(2, 2) + h * h.transpose();
    const auto r = top_eigenvector(m);
    CHECK(r.converged);
    CHECK(r.vector(0) == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(r.vector(1) == doctest::Approx(0.8).epsilon(1e-9));
  }
  SUBCASE("identity has no simple top eigenvalue") {
    const auto r = top_eigenvector(MatrixXd::Identity(4, 4));
    CHECK_FALSE(r.converged);
    CHECK(r.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    Index arg = 0;
    r.vector.cwiseAbs().maxCoeff(&arg);
    CHECK(r.vector(arg) >= 0.0);
  }
  SUBCASE("non-symmetric input") {
    MatrixXd m(2, 2);
    m << 1, 2, 0, 1;
    CHECK(code_of([&] { top_eigenvector(m); }) == Errc::InvalidMatrix);
  }
  SUBCASE("largest eigenvalue, not largest magnitude") {
    MatrixXd m(2, 2);
    m << -5, 0, 0, 1;
    const auto r = top_eigenvector(m);
    CHECK(r.converged);
    CHECK(std::abs(r.vector(1)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("start orthogonal to the top eigenvector") {
    // Largest diagonal entry is at index 0 but the top eigenvector is (0, 1, 1)/sqrt 2.
    MatrixXd m(3, 3);
    m << 2.0, 0, 0, 0, 1.9, 1.0, 0, 1.0, 1.9;
    const auto r = top_eigenvector(m);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.9).epsilon(1e-9));
    CHECK(std::abs(r.vector(0)) < 1e-8);
  }
  SUBCASE("matches a dense eigensolver on random spiked matrices") {
    CounterRng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      const Index d = 2 + static_cast<Index>(rng.below(30));
      VectorXd h(d);
      for (Index i = 0; i < d; ++i) h(i) = rng.normal();
      h *= (0.3 + rng.uniform()) / h.norm();
      MatrixXd g(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rng.normal();
      const double sigma2 = 0.5 + rng.uniform();
      const MatrixXd m = sigma2 * MatrixXd::Identity(d, d) + h * h.transpose() + 0.01 * (g + g.transpose());
      const auto r = top_eigenvector(m);
      const Eigen::SelfAdjointEigenSolver<MatrixXd> ref(m);
      const double l1 = ref.eigenvalues()(d - 1), l2 = ref.eigenvalues()(d - 2);
      CHECK(r.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
      // Near-ties need more than the default iteration budget; the flag must say so.
      if ((l1 - l2) / l1 < 0.02) {
        if (!r.converged) continue;
      }
      REQUIRE(r.converged);
      CHECK(std::abs(r.vector.dot(ref.eigenvectors().col(d - 1))) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK((m * r.vector - (r.vector.dot(m * r.vector)) * r.vector).norm() <= 1e-10 * spectral_norm(m));
    }
  }
  SUBCASE("population covariance returns h / |h|") {
    CounterRng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      const Index d = 2 + static_cast<Index>(rng.below(20));
      VectorXd h(d);
      for (Index i = 0; i < d; ++i) h(i) = rng.normal();
      h *= std::pow(10.0, -1.5 + 2.5 * rng.uniform()) / h.norm();
      const auto r = top_eigenvector(MatrixXd(MatrixXd::Identity(d, d) + h * h.transpose()));
      const VectorXd expected = detail::canonical_sign<double>(h.normalized());
      CHECK((r.vector - expected).norm() <= 1e-6);
    }
  }
}

TEST_CASE("pca classifier") {
  SUBCASE("two clusters on the first axis") {
    MatrixXd p = MatrixXd::Zero(100, 3);
    p.col(0).head(50).setConstant(1.0);
    p.col(0).tail(50).setConstant(-1.0);
    const auto clf = pca_classifier(from_points(p));
    CHECK(clf.direction(0) == doctest::Approx(1.0));
    CHECK(clf.direction.tail(2).norm() < 1e-10);
    CHECK(clf.threshold == doctest::Approx(0.0));
  }
  SUBCASE("translation equivariance") {
    VectorXd h(3);
    h << 1.0, 0.5, 0.0;
    auto data = sample(spiked(h), 400, 8);
    const auto base = pca_classifier(data);
    Eigen::RowVectorXd c(3);
    c << 5.0, -1.0, 2.0;
    data.points.rowwise() += c;
    const auto moved = pca_classifier(data);
    CHECK((moved.direction - base.direction).norm() < 1e-9);
    CHECK(moved.threshold == doctest::Approx(base.threshold + base.direction.dot(c.transpose())).epsilon(1e-9));
  }
  SUBCASE("rotation equivariance") {
    VectorXd h(4);
    h << 1.0, 0.3, 0.0, -0.4;
    const auto data = sample(spiked(h), 500, 9);
    CounterRng rng(10);
    MatrixXd g(4, 4);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) g(i, j) = rng.normal();
    const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
    const auto base = pca_classifier(data);
    const auto rotated = pca_classifier(from_points(data.points * q.transpose()));
    const auto expected = Classifier::canonical(q * base.direction, base.threshold);
    CHECK((rotated.direction - expected.direction).norm() < 1e-8);
    CHECK(rotated.threshold == doctest::Approx(expected.threshold).epsilon(1e-8));
  }
  SUBCASE("one dimension") {
    MatrixXd p(3, 1);
    p << 1, 2, 6;
    const auto clf = pca_classifier(from_points(p));
    CHECK(clf.direction(0) == 1.0);
    CHECK(clf.threshold == 3.0);
  }
  SUBCASE("too few samples") {
    CHECK(code_of([] { pca_classifier(from_points(MatrixXd::Ones(1, 3))); }) == Errc::TooFewSamples);
  }
  SUBCASE("low loss with strong signal") {
    VectorXd h = VectorXd::Zero(10);
    h(0) = 2.0;
    const auto theta = spiked(h);
    const auto clf = pca_classifier(sample(theta, 2000, 12));
    CHECK(loss_exact_linear(theta, clf).value < 0.01);
  }
}

TEST_CASE("screening alpha") {
  // Independent evaluation in extended precision.
  const long double lg = std::log(static_cast<long double>(1000) * 100);
  const long double expected = std::sqrt(6.0L * lg / 1000) + 2.0L * lg / 1000;
  CHECK(screening_alpha(1000, 100) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-15));
  CHECK(screening_alpha(1000, 100) == doctest::Approx(0.28585).epsilon(1e-4));
  CHECK(screening_alpha(4000, 100) < screening_alpha(1000, 100));
  CHECK(screening_alpha(4000, 256) == doctest::Approx(0.1508).epsilon(1e-3));
}

TEST_CASE("screening") {
  VectorXd h = VectorXd::Zero(20);
  h(3) = 2.0;
  h(11) = -1.5;
  const auto data = sample(spiked(h), 3000, 14);
  const auto r = screening(data);
  CHECK(r.alpha == screening_alpha(3000, 20));
  CHECK(r.tau_hat == (1.0 + r.alpha) / (1.0 - r.alpha) * r.diag_variances.minCoeff());
  for (Index i = 0; i < 20; ++i) {
    const bool in = std::find(r.selected.begin(), r.selected.end(), i) != r.selected.end();
    CHECK(in == (r.diag_variances(i) > r.tau_hat));
  }
  CHECK(r.selected == std::vector<Index>{3, 11});
  CHECK_FALSE(r.guarantee_violated());

  SUBCASE("invariant to the order of the sample") {
    std::vector<Index> order(3000);
    std::iota(order.begin(), order.end(), Index{0});
    std::reverse(order.begin(), order.end());
    std::swap(order[5], order[1700]);
    const auto permuted = from_points(data.points(order, Eigen::all));
    CHECK(screening(permuted).selected == r.selected);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { screening(from_points(MatrixXd::Ones(5, 1))); }) == Errc::InvalidDimension);
    CHECK(code_of([] { screening(from_points(MatrixXd::Ones(1, 4))); }) == Errc::TooFewSamples);
  }
  SUBCASE("small n raises the warning flag") { CHECK(screening(sample(spiked(h), 200, 1)).guarantee_violated()); }
}

TEST_CASE("no signal: empty selection") {
  const auto theta = spiked(VectorXd::Zero(10));
  const auto rep = support_recovery_check(theta, 2000, 500, 15);
  CHECK(rep.truth.relevant.empty());
  CHECK(rep.truth.strong.empty());
  CHECK(rep.frequency >= rep.floor - 3.0 * rep.std_err);
  int degenerate = 0;
  for (int r = 0; r < 200; ++r) degenerate += sparse_pca_classifier(sample(theta, 2000, stream_seed(16, r))).first.degenerate;
  CHECK(degenerate >= 180);
}

TEST_CASE("sparse pca classifier") {
  SUBCASE("full index set reproduces dense pca") {
    VectorXd h(4);
    h << 1.0, 0.2, 0.0, 0.5;
    const auto data = sample(spiked(h), 300, 17);
    const auto full = restricted_pca_classifier(data, {0, 1, 2, 3});
    const auto dense = pca_classifier(data);
    CHECK(full.direction == dense.direction);
    CHECK(full.threshold == dense.threshold);
  }
  SUBCASE("restricted direction is supported on the selection") {
    VectorXd h = VectorXd::Zero(30);
    h(2) = 3.0;
    h(7) = 3.0;
    const auto data = sample(spiked(h), 2000, 18);
    const auto [clf, scr] = sparse_pca_classifier(data);
    CHECK(scr.selected == std::vector<Index>{2, 7});
    for (Index i = 0; i < 30; ++i)
      if (i != 2 && i != 7) CHECK(clf.direction(i) == 0.0);
    CHECK(clf.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const VectorXd mean = data.points.colwise().mean();
    CHECK(clf.threshold == doctest::Approx(mean.dot(clf.direction)).epsilon(1e-12));
  }
  SUBCASE("empty selection fallback") {
    MatrixXd p(3, 2);
    p << 1, 0, 2, 0, 6, 0;
    const auto clf = restricted_pca_classifier(from_points(p), {});
    CHECK(clf.degenerate);
    CHECK(clf.direction == VectorXd::Unit(2, 0));
    CHECK(clf.threshold == 3.0);
  }
  SUBCASE("strong single coordinate") {
    VectorXd h = VectorXd::Zero(10);
    h(0) = 5.0;
    const auto theta = spiked(h);
    int good = 0;
    for (int r = 0; r < 200; ++r) {
      const auto clf = sparse_pca_classifier(sample(theta, 4000, stream_seed(19, r))).first;
      good += loss_exact_linear(theta, clf).value < 0.01;
    }
    CHECK(good >= 190);
  }
  SUBCASE("oracle support") {
    VectorXd h = VectorXd::Zero(50);
    h.head(4).setConstant(0.5);
    const auto theta = spiked(h);
    auto data = sample(theta, 1000, 20);
    const auto clf = oracle_support_pca_classifier(data);
    CHECK(clf.direction.tail(46).norm() == 0.0);
    data.theta.reset();
    CHECK(code_of([&] { oracle_support_pca_classifier(data); }) == Errc::InvalidParams);
  }
}

TEST_CASE("support truth and recovery predicate") {
  VectorXd h = VectorXd::Zero(6);
  h << 2.0, 0.0, 0.1, -3.0, 0.0, 0.0;
  const auto truth = support_truth(spiked(h), 0.1);
  CHECK(truth.relevant == std::vector<Index>{0, 2, 3});
  CHECK(truth.strong == std::vector<Index>{0, 3});  // threshold 4 sqrt(0.1) = 1.26
  CHECK(recovery_holds(truth, {0, 3}));
  CHECK(recovery_holds(truth, {0, 2, 3}));
  CHECK_FALSE(recovery_holds(truth, {0}));
  CHECK_FALSE(recovery_holds(truth, {0, 1, 3}));
}

TEST_CASE("support recovery at strong signal") {
  VectorXd h = VectorXd::Zero(256);
  h.head(4).setConstant(2.0);
  const auto rep = support_recovery_check(spiked(h), 4000, 500, 21);
  CHECK(rep.alpha == doctest::Approx(0.1508).epsilon(1e-3));
  CHECK(4.0 * std::sqrt(rep.alpha) == doctest::Approx(1.55).epsilon(1e-2));
  CHECK(rep.truth.strong.size() == 4);
  CHECK(rep.floor == 1.0 - 6.0 / 4000.0);
  CHECK(rep.frequency >= rep.floor - 3.0 * rep.std_err);

  const auto json = nlohmann::json(rep);
  const auto back = json.get<RecoveryReport>();
  CHECK(back.successes == rep.successes);
  CHECK(back.truth.strong == rep.truth.strong);

  CHECK(code_of([&] { support_recovery_check(spiked(h), 4000, 0, 1); }) == Errc::PreconditionViolated);
  CHECK(code_of([&] { support_recovery_check(spiked(h), 300, 10, 1); }) == Errc::PreconditionViolated);
}

TEST_CASE("screening result JSON round trip") {
  VectorXd h = VectorXd::Zero(5);
  h(1) = 3.0;
  const auto r = screening(sample(spiked(h), 500, 22));
  const auto j = nlohmann::json(r);
  CHECK(j.at("selected") == nlohmann::json::array({1}));
  const auto back = j.get<ScreeningResult<double>>();
  CHECK(back.alpha == r.alpha);
  CHECK(back.tau_hat == r.tau_hat);
  CHECK(back.selected == r.selected);
  CHECK(back.diag_variances == r.diag_variances);
}

TEST_CASE("davis-kahan check") {
  SUBCASE("no perturbation") {
    MatrixXd a(2, 2);
    a << 2, 0, 0, 1;
    const auto r = davis_kahan_check(a, MatrixXd::Zero(2, 2));
    CHECK(r.sin_angle == 0.0);
    CHECK(r.bound == 0.0);
    CHECK(r.holds);
  }
  SUBCASE("two by two closed form") {
    MatrixXd a(2, 2), e(2, 2);
    a << 2, 0, 0, 1;
    e << 0, 0.1, 0.1, 0;
    const auto r = davis_kahan_check(a, e);
    CHECK(r.sin_angle == doctest::Approx(std::sin(0.5 * std::atan(0.2))).epsilon(1e-12));
    CHECK(r.sin_angle == doctest::Approx(0.0985).epsilon(1e-3));
    CHECK(r.bound == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(r.holds);
  }
  SUBCASE("perturbation too large") {
    MatrixXd a(2, 2), e(2, 2);
    a << 2, 0, 0, 1;
    e << 0.3, 0, 0, 0;
    CHECK(code_of([&] { davis_kahan_check(a, e); }) == Errc::PreconditionViolated);
  }
  SUBCASE("repeated top eigenvalue") {
    CHECK(code_of([] { davis_kahan_check(MatrixXd::Identity(3, 3), MatrixXd::Zero(3, 3)); }) ==
          Errc::PreconditionViolated);
  }
  SUBCASE("random admissible instances") {
    CounterRng rng(23);
    for (int i = 0; i < 1000; ++i) {
      const auto d = static_cast<Index>(2 + rng.below(9));
      const auto [a, e] = random_davis_kahan_instance(rng, d);
      const auto r = davis_kahan_check(a, e);
      REQUIRE(r.perturbation_norm <= r.gap / 5.0);
      CHECK(r.holds);
    }
  }
}
