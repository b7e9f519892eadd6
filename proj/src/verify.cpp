#include "mixbench/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/QR>

#include "mixbench/estimators.hpp"

namespace mixbench {

std::string_view to_string(Suite suite) noexcept {
  switch (suite) {
    case Suite::loss_sandwich: return "loss-sandwich";
    case Suite::kl: return "kl";
    case Suite::concentration: return "concentration";
    case Suite::fano: return "fano";
    case Suite::triangle: return "triangle";
    case Suite::davis_kahan: return "davis-kahan";
    case Suite::support_recovery: return "support-recovery";
  }
  return "unknown";
}

std::vector<Suite> all_suites() {
  return {Suite::loss_sandwich, Suite::kl,          Suite::concentration,   Suite::fano,
          Suite::triangle,      Suite::davis_kahan, Suite::support_recovery};
}

Suite suite_from_string(std::string_view name) {
  for (auto suite : all_suites())
    if (to_string(suite) == name) return suite;
  fail(Errc::ConfigError, "suite: unknown value '" + std::string(name) + "'");
}

bool SuiteResult::all_hold() const { return failures() == 0; }

std::int64_t SuiteResult::failures() const {
  return std::count_if(checks.begin(), checks.end(), [](const BoundReport& r) { return r.holds && !*r.holds; });
}

namespace {

double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

VectorXd gaussian(CounterRng& rng, Index d) {
  VectorXd v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

MatrixXd random_orthogonal(CounterRng& rng, Index d) {
  MatrixXd g(d, d);
  for (Index j = 0; j < d; ++j) g.col(j) = gaussian(rng, d);
  return Eigen::HouseholderQR<MatrixXd>(g).householderQ();
}

}  // namespace

std::pair<Mixture, Mixture> random_equal_norm_pair(CounterRng& rng, Index d, double xi, double sigma, double beta) {
  require(d >= 2, Errc::InvalidDimension, "need d >= 2 for a nontrivial angle");
  const MatrixXd q = random_orthogonal(rng, d);
  const VectorXd center = gaussian(rng, d);
  const double norm = xi * sigma;
  const VectorXd h = norm * q.col(0);
  const VectorXd h_prime = norm * (std::cos(beta) * q.col(0) + std::sin(beta) * q.col(1));
  return {Mixture::from_center(center, h, sigma), Mixture::from_center(center, h_prime, sigma)};
}

std::pair<MatrixXd, MatrixXd> random_davis_kahan_instance(CounterRng& rng, Index d) {
  require(d >= 2, Errc::InvalidDimension, "need d >= 2");
  VectorXd spectrum(d);
  for (Index i = 0; i < d; ++i) spectrum(i) = uniform(rng, -1.0, 1.0);
  const double gap = uniform(rng, 0.05, 2.0);
  Index top = 0;
  spectrum.maxCoeff(&top);
  spectrum(top) = spectrum.maxCoeff() + gap;
  // Second largest may now sit anywhere below; the gap is at least `gap`.
  const MatrixXd q = random_orthogonal(rng, d);
  MatrixXd a = q * spectrum.asDiagonal() * q.transpose();
  a = 0.5 * (a + a.transpose()).eval();

  MatrixXd g(d, d);
  for (Index j = 0; j < d; ++j) g.col(j) = gaussian(rng, d);
  MatrixXd e = 0.5 * (g + g.transpose());
  const double norm = Eigen::SelfAdjointEigenSolver<MatrixXd>(e, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
  e *= uniform(rng, 0.0, 1.0) * gap / 5.0 / norm;
  return {a, e};
}

namespace {

void loss_sandwich(SuiteResult& out) {
  for (double xi : {0.05, 0.1, 0.2, 0.5, 1.0}) {
    for (double beta : {0.05, 0.1, 0.3, 0.6}) {
      VectorXd h = VectorXd::Zero(2);
      h(0) = xi;
      const auto theta = Mixture::from_center(VectorXd::Zero(2), h, 1.0);
      VectorXd v(2);
      v << std::cos(beta), std::sin(beta);
      const double loss = loss_exact_linear(theta, Classifier{v, 0.0, false}, 1e-8).value;
      const auto [lower, upper] = loss_bounds_symmetric(xi, beta);
      for (bool is_upper : {true, false}) {
        BoundReport r;
        r.kind = is_upper ? "loss_sandwich_upper" : "loss_sandwich_lower";
        r.params = {{"xi", xi}, {"beta", beta}};
        r.direction = is_upper ? BoundDirection::upper : BoundDirection::lower;
        r.bound_value = is_upper ? upper : lower;
        r.set_empirical(loss, 0.0, 1e-7);
        out.checks.push_back(std::move(r));
      }
    }
  }
}

void kl_suite(SuiteResult& out, const SuiteOptions& opt) {
  CounterRng rng(stream_seed(opt.seed, 0x4B4C));
  for (std::int64_t i = 0; i < opt.kl_pairs; ++i) {
    const auto d = static_cast<Index>(2 + rng.below(7));
    const double xi = uniform(rng, 0.02, 0.5);
    const double sigma = uniform(rng, 0.5, 2.0);
    const double beta = uniform(rng, 0.0, kPi / 2.0);
    const auto [theta, theta_prime] = random_equal_norm_pair(rng, d, xi, sigma, beta);
    out.checks.push_back(verify_kl(theta, theta_prime, opt.trials, stream_seed(opt.seed, static_cast<std::uint64_t>(i))));
  }
}

void concentration_suite(SuiteResult& out, const SuiteOptions& opt) {
  std::uint64_t index = 0;
  for (std::int64_t d : {5, 50}) {
    for (double eps : {0.1, 0.5, 1.0}) out.checks.push_back(verify_chisq_tail(true, d, eps, opt.trials, stream_seed(opt.seed, index++)));
    for (double eps : {0.1, 0.5}) out.checks.push_back(verify_chisq_tail(false, d, eps, opt.trials, stream_seed(opt.seed, index++)));
  }
  for (std::int64_t n : {50, 500})
    for (double eps : {0.1, 0.5, 1.0}) out.checks.push_back(verify_prodnormal(n, eps, opt.trials, stream_seed(opt.seed, index++)));
}

std::vector<PackingFamily> default_families(const SuiteOptions& opt) {
  if (opt.family) return {*opt.family};
  return {lower_bound_family(Regime::dense, 10000, 9, 0, 0.2, 1.0, opt.seed),
          lower_bound_family(Regime::sparse, 10000, 17, 4, 0.2, 1.0, opt.seed)};
}

std::map<std::string, double> family_params(const PackingFamily& f) {
  return {{"n", static_cast<double>(f.n)},
          {"d", static_cast<double>(f.d)},
          {"s", static_cast<double>(f.s)},
          {"lambda", f.lambda},
          {"sigma", f.sigma},
          {"epsilon", f.epsilon},
          {"hypotheses", static_cast<double>(f.thetas.size())}};
}

void fano_suite(SuiteResult& out, const SuiteOptions& opt) {
  for (const auto& family : default_families(opt)) {
    const auto params = family_params(family);
    for (auto method : {KlMethod::bound, KlMethod::monte_carlo}) {
      const auto report = fano_check(family, family.n, method, opt.trials, opt.seed);
      BoundReport budget;
      budget.kind = method == KlMethod::bound ? "fano_budget" : "fano_budget_mc";
      budget.params = params;
      budget.params["max_kl"] = report.max_kl;
      budget.bound_value = 0.125;
      budget.empirical_value = report.alpha_fano;
      budget.holds = report.holds;  // strict: alpha_fano < 1/8
      out.checks.push_back(std::move(budget));
      if (method != KlMethod::bound) continue;

      BoundReport low;
      low.kind = "pair_loss_window_lower";
      low.params = params;
      low.params["pairs"] = static_cast<double>(report.pairs_checked);
      low.direction = BoundDirection::lower;
      low.bound_value = report.window_lower;
      low.set_empirical(report.min_pair_loss, 0.0, 0.0);
      BoundReport high = low;
      high.kind = "pair_loss_window_upper";
      high.direction = BoundDirection::upper;
      high.bound_value = report.window_upper;
      high.set_empirical(report.max_pair_loss, 0.0, 0.0);
      out.checks.push_back(std::move(low));
      out.checks.push_back(std::move(high));
    }
  }
}

BoundReport triangle_report(const Mixture& theta, const Mixture& theta_prime, const Classifier& clf) {
  const auto t = local_triangle_check(theta, theta_prime, clf);
  BoundReport r;
  r.kind = "local_triangle";
  r.params = {{"base_loss", t.base_loss}, {"clf_loss", t.clf_loss}, {"kl", t.kl}, {"tau", t.tau},
              {"lower", t.lower}};
  r.bound_value = t.upper;
  if (t.observed) r.empirical_value = t.observed;
  r.slack = 3.0 * kDefaultLossTolerance;
  r.holds = t.holds;
  return r;
}

void triangle_suite(SuiteResult& out, const SuiteOptions& opt) {
  for (const auto& family : default_families(opt)) {
    const auto count = std::min<std::size_t>(family.thetas.size(), 6);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < count; ++j) {
        if (i == j) continue;
        for (std::size_t k = 0; k < count; ++k)
          if (k != j) out.checks.push_back(triangle_report(family.thetas[i], family.thetas[j], bayes_classifier(family.thetas[k])));
      }
  }
  CounterRng rng(stream_seed(opt.seed, 0x7419));
  for (int i = 0; i < 200; ++i) {
    const auto d = static_cast<Index>(2 + rng.below(6));
    const double xi = uniform(rng, 0.05, 1.5);
    const double beta = uniform(rng, 0.0, 0.4);
    auto [theta, theta_prime] = random_equal_norm_pair(rng, d, xi, 1.0, beta);
    // Classifier: the Bayes rule of theta, tilted and shifted a little.
    Classifier clf = bayes_classifier(theta);
    VectorXd v = clf.direction + 0.2 * uniform(rng, 0.0, 1.0) * gaussian(rng, d);
    clf = Classifier::canonical(v, v.dot(theta.center()) + 0.1 * rng.normal());
    out.checks.push_back(triangle_report(theta, theta_prime, clf));
  }
}

void davis_kahan_suite(SuiteResult& out, const SuiteOptions& opt) {
  CounterRng rng(stream_seed(opt.seed, 0xD4));
  for (std::int64_t i = 0; i < opt.dk_instances; ++i) {
    const auto d = static_cast<Index>(2 + rng.below(9));
    const auto [a, e] = random_davis_kahan_instance(rng, d);
    const auto dk = davis_kahan_check(a, e);
    BoundReport r;
    r.kind = "davis_kahan";
    r.params = {{"d", static_cast<double>(d)}, {"gap", dk.gap}, {"perturbation_norm", dk.perturbation_norm}};
    r.bound_value = dk.bound;
    r.set_empirical(dk.sin_angle, 0.0, 1e-12);
    out.checks.push_back(std::move(r));
  }
}

void support_recovery_suite(SuiteResult& out, const SuiteOptions& opt) {
  struct Setting {
    Index d;
    Index n;
    std::vector<double> half;  // leading nonzero coordinates of h, sigma = 1
  };
  const std::vector<Setting> settings = {
      {256, 4000, {2.0, 2.0, 2.0, 2.0}},
      {64, 4000, {2.0, -2.0, 0.3, 0.1}},
      {10, 2000, {}},
  };
  std::uint64_t index = 0;
  for (const auto& s : settings) {
    VectorXd h = VectorXd::Zero(s.d);
    for (std::size_t i = 0; i < s.half.size(); ++i) h(static_cast<Index>(i)) = s.half[i];
    const auto theta = Mixture::from_center(VectorXd::Zero(s.d), h, 1.0);
    const auto rep = support_recovery_check(theta, s.n, opt.recovery_replicates, stream_seed(opt.seed, index++));
    BoundReport r;
    r.kind = "support_recovery";
    r.params = {{"d", static_cast<double>(s.d)}, {"n", static_cast<double>(s.n)}, {"alpha", rep.alpha},
                {"relevant", static_cast<double>(rep.truth.relevant.size())},
                {"strong", static_cast<double>(rep.truth.strong.size())},
                {"replicates", static_cast<double>(rep.replicates)}};
    r.direction = BoundDirection::lower;
    r.bound_value = rep.floor;
    r.set_empirical(rep.frequency, rep.std_err, 3.0 * rep.std_err);
    out.checks.push_back(std::move(r));
  }
}

}  // namespace

SuiteResult run_suite(Suite suite, const SuiteOptions& options) {
  SuiteResult out;
  out.suite = suite;
  switch (suite) {
    case Suite::loss_sandwich: loss_sandwich(out); break;
    case Suite::kl: kl_suite(out, options); break;
    case Suite::concentration: concentration_suite(out, options); break;
    case Suite::fano: fano_suite(out, options); break;
    case Suite::triangle: triangle_suite(out, options); break;
    case Suite::davis_kahan: davis_kahan_suite(out, options); break;
    case Suite::support_recovery: support_recovery_suite(out, options); break;
  }
  return out;
}

}  // namespace mixbench
