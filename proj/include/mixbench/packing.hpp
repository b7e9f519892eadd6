#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mixbench/loss.hpp"

namespace mixbench {

using Codeword = std::vector<std::uint8_t>;

struct BinaryCode {
  Index length = 0;
  std::vector<Codeword> codewords;
  /// Guaranteed lower bound on every pairwise Hamming distance.
  Index min_distance = 0;
  /// Common Hamming weight, for constant-weight codes.
  std::optional<Index> weight;
};

Index hamming_distance(const Codeword& a, const Codeword& b);

/// Smallest pairwise distance, by exhaustive comparison.
Index min_pairwise_distance(const BinaryCode& code);

/// Greedy lexicographic code of length m in [8, 24]: scanning words in
/// lexicographic order from the all-zeros word, a word is admitted iff it is
/// at distance >= ceil(m/8) from every admitted word. The scan stops once
/// ceil(2^(m/8)) + 1 words (omega_0 = 0 plus M >= 2^(m/8)) are admitted.
BinaryCode vg_code(Index m);

inline constexpr std::int64_t kDefaultSparseBudget = 1'000'000;

/// Randomized greedy constant-weight code: weight-s words are drawn on
/// stream `seed` and admitted iff at distance > s/2 from every admitted
/// word, until ceil(exp((s/5) log(m/s))) words are admitted. Needs
/// 1 <= s <= m/4; exhausting `budget` draws throws ConstructionFailed.
BinaryCode sparse_code(Index m, Index s, std::uint64_t seed, std::int64_t budget = kDefaultSparseBudget);

enum class Regime { dense, sparse };

std::string_view to_string(Regime regime) noexcept;
Regime regime_from_string(std::string_view name);

/// Hypotheses theta_w = (-mu_w / 2, mu_w / 2) built on a binary code, with
/// mu_w = lambda0 e_d + sum_i c_i(w) eps e_i where c_i = 2 w_i - 1 (dense)
/// or c_i = w_i (sparse). Every member has |mu_w| = lambda.
struct PackingFamily {
  Regime regime = Regime::dense;
  std::int64_t n = 0;
  Index d = 0;
  /// Sparse regime: number of perturbed coordinates s'; members lie in
  /// the (s'+1)-sparse class. Zero for the dense regime.
  Index s = 0;
  double lambda = 0.0;
  double sigma = 1.0;
  double epsilon = 0.0;
  double lambda0 = 0.0;
  double gamma = 0.0;
  BinaryCode code;
  std::vector<Mixture> thetas;

  /// Number of perturbed coordinates: d - 1 (dense) or s (sparse).
  Index perturbed() const noexcept { return regime == Regime::dense ? d - 1 : s; }
  double xi() const noexcept { return lambda / (2.0 * sigma); }
};

/// Builds a family from an explicit epsilon and code. lambda0^2 =
/// lambda^2 - perturbed * eps^2 must be nonnegative.
PackingFamily make_family(Regime regime, std::int64_t n, Index d, Index s, double lambda, double sigma, double epsilon,
                          BinaryCode code);

/// The lower-bound construction. Dense (d >= 9):
///   eps = min{ sqrt(log 2)/3 sigma^2/lambda / sqrt(n), lambda / (4 sqrt(d-1)) },
///   code = vg_code(d - 1), gamma = 1/4 (g(xi) - 2 xi^2) sqrt(d-1) eps / lambda.
/// Sparse (4 <= s <= (d-1)/4, s = number of perturbed coordinates):
///   eps = min{ sqrt(8/45) sigma^2/lambda sqrt(log((d-1)/s) / n), lambda / (2 sqrt(s)) },
///   code = sparse_code(d - 1, s, seed), gamma = 1/4 (g(xi) - sqrt(2) xi^2) sqrt(s) eps / lambda.
/// xi = lambda / (2 sigma).
PackingFamily lower_bound_family(Regime regime, std::int64_t n, Index d, Index s, double lambda, double sigma,
                                 std::uint64_t seed);

enum class KlMethod { bound, monte_carlo };

struct FanoReport {
  std::int64_t hypotheses = 0;  ///< M + 1
  double max_kl = 0.0;          ///< max_i KL(P_i, P_0)
  double alpha_fano = 0.0;      ///< n max_kl / log M
  bool holds = false;           ///< alpha_fano < 1/8
  double window_lower = 0.0;    ///< 1/2 g(xi) sqrt(k) eps / lambda
  double window_upper = 0.0;    ///< 4/pi sqrt(k) eps / lambda
  double min_pair_loss = 0.0;
  double max_pair_loss = 0.0;
  std::int64_t pairs_checked = 0;
  std::int64_t window_violations = 0;
  bool windows_hold = false;
  double implied_lower_bound = 0.0;  ///< 0.07 gamma
};

/// Certifies the KL budget of a family (alpha_fano < 1/8, KL evaluated with
/// kl_bound or Monte Carlo) and checks that the quadrature loss of every
/// ordered pair (theta_i, Bayes rule of theta_j) lies in the window.
FanoReport fano_check(const PackingFamily& family, std::int64_t n, KlMethod method, std::int64_t mc_samples = 100000,
                      std::uint64_t seed = 0);

struct TriangleReport {
  bool applicable = false;
  double base_loss = 0.0;  ///< L_theta(F_theta')
  double clf_loss = 0.0;   ///< L_theta(clf)
  double kl = 0.0;         ///< kl_bound of the pair
  double tau = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> observed;  ///< L_theta'(clf)
  std::optional<bool> holds;
};

/// Local triangle inequality for an equal-norm, common-center pair, with
/// tau = L_theta(clf) + sqrt(kl_bound / 2). Applicable when
/// L_theta(F_theta') + tau <= 1/2; then checks
/// L_theta(F_theta') - tau <= L_theta'(clf) <= L_theta(F_theta') + tau.
TriangleReport local_triangle_check(const Mixture& theta, const Mixture& theta_prime, const Classifier& clf,
                                    double tol = kDefaultLossTolerance);

}  // namespace mixbench
