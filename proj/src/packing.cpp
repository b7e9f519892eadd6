#include "mixbench/packing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixbench/bounds.hpp"

namespace mixbench {

Index hamming_distance(const Codeword& a, const Codeword& b) {
  require(a.size() == b.size(), Errc::ShapeError, "codewords differ in length");
  Index dist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += a[i] != b[i];
  return dist;
}

Index min_pairwise_distance(const BinaryCode& code) {
  Index best = code.length + 1;
  for (std::size_t i = 0; i < code.codewords.size(); ++i)
    for (std::size_t j = i + 1; j < code.codewords.size(); ++j)
      best = std::min(best, hamming_distance(code.codewords[i], code.codewords[j]));
  return best;
}

namespace {

bool admissible(const std::vector<Codeword>& admitted, const Codeword& word, Index min_distance) {
  return std::all_of(admitted.begin(), admitted.end(),
                     [&](const Codeword& other) { return hamming_distance(other, word) >= min_distance; });
}

}  // namespace

BinaryCode vg_code(Index m) {
  require(m >= 8, Errc::PreconditionViolated, "vg_code needs m >= 8");
  require(m <= 24, Errc::BudgetExceeded, "vg_code enumerates at most 2^24 words");
  BinaryCode code;
  code.length = m;
  code.min_distance = (m + 7) / 8;
  const auto target = static_cast<std::size_t>(std::ceil(std::exp2(static_cast<double>(m) / 8.0))) + 1;
  Codeword word(static_cast<std::size_t>(m));
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t w = 0; w < count && code.codewords.size() < target; ++w) {
    // Most significant bit first, so numeric order is lexicographic order.
    for (Index i = 0; i < m; ++i) word[static_cast<std::size_t>(i)] = (w >> (m - 1 - i)) & 1U;
    if (admissible(code.codewords, word, code.min_distance)) code.codewords.push_back(word);
  }
  require(code.codewords.size() >= target, Errc::ConstructionFailed, "greedy scan ended below the target size");
  return code;
}

BinaryCode sparse_code(Index m, Index s, std::uint64_t seed, std::int64_t budget) {
  require(s >= 1, Errc::PreconditionViolated, "sparse_code needs s >= 1");
  require(4 * s <= m, Errc::PreconditionViolated, "sparse_code needs s <= m/4");
  BinaryCode code;
  code.length = m;
  code.weight = s;
  // Equal-weight words are at even distance, so "> s/2" means ">= the next even number".
  code.min_distance = 2 * (s / 4 + 1);
  const double ms = static_cast<double>(m);
  const double ss = static_cast<double>(s);
  const auto target = static_cast<std::size_t>(std::ceil(std::exp(ss / 5.0 * std::log(ms / ss)) - 1e-12));

  CounterRng rng(seed);
  std::vector<Index> positions(static_cast<std::size_t>(m));
  Codeword word(static_cast<std::size_t>(m));
  for (std::int64_t draw = 0; draw < budget && code.codewords.size() < target; ++draw) {
    std::iota(positions.begin(), positions.end(), Index{0});
    std::fill(word.begin(), word.end(), 0);
    for (Index k = 0; k < s; ++k) {
      const auto pick = static_cast<Index>(k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - k))));
      std::swap(positions[static_cast<std::size_t>(k)], positions[static_cast<std::size_t>(pick)]);
      word[static_cast<std::size_t>(positions[static_cast<std::size_t>(k)])] = 1;
    }
    if (admissible(code.codewords, word, code.min_distance)) code.codewords.push_back(word);
  }
  require(code.codewords.size() >= target, Errc::ConstructionFailed,
          "draw budget exhausted after admitting " + std::to_string(code.codewords.size()) + " of " +
              std::to_string(target) + " words");
  return code;
}

std::string_view to_string(Regime regime) noexcept { return regime == Regime::dense ? "dense" : "sparse"; }

Regime regime_from_string(std::string_view name) {
  if (name == "dense") return Regime::dense;
  if (name == "sparse") return Regime::sparse;
  fail(Errc::ConfigError, "regime must be dense or sparse, got '" + std::string(name) + "'");
}

PackingFamily make_family(Regime regime, std::int64_t n, Index d, Index s, double lambda, double sigma, double epsilon,
                          BinaryCode code) {
  require(lambda > 0.0 && sigma > 0.0 && epsilon >= 0.0, Errc::PreconditionViolated,
          "need lambda > 0, sigma > 0, eps >= 0");
  require(code.length == d - 1, Errc::ShapeError, "code length must be d - 1");
  PackingFamily family;
  family.regime = regime;
  family.n = n;
  family.d = d;
  family.s = regime == Regime::sparse ? s : 0;
  family.lambda = lambda;
  family.sigma = sigma;
  family.epsilon = epsilon;
  const double k = static_cast<double>(family.perturbed());
  const double lambda0_sq = lambda * lambda - k * epsilon * epsilon;
  require(lambda0_sq >= 0.0, Errc::PreconditionViolated, "eps too large: lambda0^2 < 0");
  family.lambda0 = std::sqrt(lambda0_sq);
  const double xi = family.xi();
  const double penalty = regime == Regime::dense ? 2.0 * xi * xi : std::sqrt(2.0) * xi * xi;
  family.gamma = 0.25 * (g_function(xi) - penalty) * std::sqrt(k) * epsilon / lambda;

  family.thetas.reserve(code.codewords.size());
  for (const auto& word : code.codewords) {
    VectorXd mu = VectorXd::Zero(d);
    mu(d - 1) = family.lambda0;
    for (Index i = 0; i + 1 < d; ++i) {
      const double bit = word[static_cast<std::size_t>(i)];
      mu(i) = (regime == Regime::dense ? 2.0 * bit - 1.0 : bit) * epsilon;
    }
    family.thetas.emplace_back(-0.5 * mu, 0.5 * mu, sigma);
  }
  family.code = std::move(code);
  return family;
}

PackingFamily lower_bound_family(Regime regime, std::int64_t n, Index d, Index s, double lambda, double sigma,
                                 std::uint64_t seed) {
  require(n >= 1, Errc::PreconditionViolated, "need n >= 1");
  require(lambda > 0.0 && sigma > 0.0, Errc::PreconditionViolated, "need lambda > 0 and sigma > 0");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double var = sigma * sigma;
  if (regime == Regime::dense) {
    require(d >= 9, Errc::PreconditionViolated, "dense family needs d >= 9");
    const double eps = std::min(std::sqrt(std::log(2.0)) / 3.0 * var / lambda / std::sqrt(nn),
                                lambda / (4.0 * std::sqrt(dd - 1.0)));
    auto family = make_family(regime, n, d, 0, lambda, sigma, eps, vg_code(d - 1));
    require(family.lambda0 * family.lambda0 >= 15.0 / 16.0 * lambda * lambda * (1.0 - 1e-12),
            Errc::ConstructionFailed, "lambda0^2 < 15/16 lambda^2");
    return family;
  }
  require(s >= 4 && 4 * s <= d - 1, Errc::PreconditionViolated, "sparse family needs 4 <= s <= (d-1)/4");
  const double ss = static_cast<double>(s);
  const double eps = std::min(std::sqrt(8.0 / 45.0) * var / lambda * std::sqrt(std::log((dd - 1.0) / ss) / nn),
                              0.5 * lambda / std::sqrt(ss));
  auto family = make_family(regime, n, d, s, lambda, sigma, eps, sparse_code(d - 1, s, seed));
  require(family.lambda0 * family.lambda0 >= 0.75 * lambda * lambda * (1.0 - 1e-12), Errc::ConstructionFailed,
          "lambda0^2 < 3/4 lambda^2");
  return family;
}

FanoReport fano_check(const PackingFamily& family, std::int64_t n, KlMethod method, std::int64_t mc_samples,
                      std::uint64_t seed) {
  const auto count = static_cast<std::int64_t>(family.thetas.size());
  require(count >= 3, Errc::PreconditionViolated, "need M >= 2 alternatives besides theta_0");
  FanoReport report;
  report.hypotheses = count;
  const Mixture& base = family.thetas.front();
  const double xi = base.snr();
  const double norm_sq = base.half_separation().squaredNorm();
  for (std::int64_t i = 1; i < count; ++i) {
    const Mixture& other = family.thetas[static_cast<std::size_t>(i)];
    double kl = 0.0;
    if (method == KlMethod::bound) {
      const double cos_beta = std::min(1.0, std::abs(other.half_separation().dot(base.half_separation())) / norm_sq);
      kl = kl_bound(xi, cos_beta);
    } else {
      kl = kl_monte_carlo(other, base, mc_samples, stream_seed(seed, static_cast<std::uint64_t>(i))).estimate;
    }
    report.max_kl = std::max(report.max_kl, kl);
  }
  report.alpha_fano = static_cast<double>(n) * report.max_kl / std::log(static_cast<double>(count - 1));
  report.holds = report.alpha_fano < 0.125;

  const double scale = std::sqrt(static_cast<double>(family.perturbed())) * family.epsilon / family.lambda;
  report.window_lower = 0.5 * g_function(family.xi()) * scale;
  report.window_upper = 4.0 / kPi * scale;
  report.min_pair_loss = 1.0;
  for (std::int64_t i = 0; i < count; ++i) {
    for (std::int64_t j = 0; j < count; ++j) {
      if (i == j) continue;
      const auto& theta = family.thetas[static_cast<std::size_t>(i)];
      const auto& alt = family.thetas[static_cast<std::size_t>(j)];
      const double loss = loss_exact_linear(theta, bayes_classifier(alt)).value;
      report.min_pair_loss = std::min(report.min_pair_loss, loss);
      report.max_pair_loss = std::max(report.max_pair_loss, loss);
      ++report.pairs_checked;
      if (loss < report.window_lower || loss > report.window_upper) ++report.window_violations;
    }
  }
  report.windows_hold = report.window_violations == 0;
  report.implied_lower_bound = 0.07 * family.gamma;
  return report;
}

TriangleReport local_triangle_check(const Mixture& theta, const Mixture& theta_prime, const Classifier& clf,
                                    double tol) {
  const double norm = theta.half_separation().norm();
  require(theta.dim() == theta_prime.dim(), Errc::ShapeError, "mixtures differ in dimension");
  require(theta.sigma() == theta_prime.sigma(), Errc::PreconditionViolated, "mixtures differ in sigma");
  require((theta.center() - theta_prime.center()).norm() <= 1e-12 * std::max(1.0, theta.center().norm()),
          Errc::PreconditionViolated, "pair must share its center");
  require(std::abs(norm - theta_prime.half_separation().norm()) <= 1e-12 * std::max(1.0, norm),
          Errc::PreconditionViolated, "pair must have equal separation");

  TriangleReport report;
  report.base_loss = loss_exact_linear(theta, bayes_classifier(theta_prime), tol).value;
  report.clf_loss = loss_exact_linear(theta, clf, tol).value;
  const double cos_beta =
      std::min(1.0, std::abs(theta.half_separation().dot(theta_prime.half_separation())) / (norm * norm));
  report.kl = kl_bound(theta.snr(), cos_beta);
  report.tau = report.clf_loss + std::sqrt(report.kl / 2.0);
  report.lower = report.base_loss - report.tau;
  report.upper = report.base_loss + report.tau;
  report.applicable = report.base_loss + report.tau <= 0.5;
  if (report.applicable) {
    const double observed = loss_exact_linear(theta_prime, clf, tol).value;
    report.observed = observed;
    // Quadrature values carry up to `tol` absolute error each.
    report.holds = observed >= report.lower - 3.0 * tol && observed <= report.upper + 3.0 * tol;
  }
  return report;
}

}  // namespace mixbench
