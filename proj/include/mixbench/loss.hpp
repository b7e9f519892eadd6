#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>

#include "mixbench/model.hpp"

namespace mixbench {

using Mixture = MixtureParams<double>;
using Classifier = LinearClassifier<double>;

enum class LossMethod { quadrature, monte_carlo };

std::string_view to_string(LossMethod method) noexcept;
LossMethod loss_method_from_string(std::string_view name);

/// Relative misclustering probability of a clustering against the Bayes
/// rule, minimized over the two label permutations.
struct LossEstimate {
  double value = 0.0;
  LossMethod method = LossMethod::quadrature;
  double std_err = 0.0;
  std::int64_t n_samples = 0;
};

/// Position of a hyperplane relative to the mixture, after orienting v so
/// that v.h >= 0.
struct GeometryDecomposition {
  /// |v.h| / |h|
  double cos_beta = 0.0;
  /// |(t - mu0.v) / cos_beta|; infinite when cos_beta == 0.
  double offset = 0.0;
  /// |h| / sigma
  double snr = 0.0;
};

GeometryDecomposition decompose(const Mixture& theta, const Classifier& clf);

inline constexpr double kDefaultLossTolerance = 1e-10;

/// Exact loss of a hyperplane clustering. The problem is reduced to the
/// plane spanned by h and v; in standardized coordinates, with
/// a = |h| / sigma and b(y) = t0 / cos_beta - y tan_beta, the one-orientation
/// disagreement probability is
///
///   p = int phi(y) * 1/2 [Phi(a + |b(y)|) - Phi(a - |b(y)|)] dy,
///
/// integrated adaptively over y in [-9, 9] (split at the root of b) to
/// absolute accuracy `tol`. Returns min(p, 1 - p); exactly 1/2 when v is
/// orthogonal to h.
LossEstimate loss_exact_linear(const Mixture& theta, const Classifier& clf, double tol = kDefaultLossTolerance);

using LabelFunction = std::function<int(const Eigen::Ref<const VectorXd>&)>;

/// Monte-Carlo loss of an arbitrary labeling: draws `n_samples` points from
/// P_theta on the stream `seed`, compares with the Bayes labels and reports
/// min(p, 1 - p) with binomial standard error.
LossEstimate loss_monte_carlo(const Mixture& theta, const LabelFunction& classify, std::int64_t n_samples,
                              std::uint64_t seed);

/// g(x) = phi(x) (phi(x) - x Phi(-x)), x >= 0.
double g_function(double x);

/// Closed-form bracket for the loss of the Bayes rule of an equal-norm,
/// common-center alternative at angle beta:
/// 2 g(xi) sin(beta) cos(beta) <= L <= tan(beta) / pi, with xi = |h| / sigma.
std::pair<double, double> loss_bounds_symmetric(double xi, double beta);

}  // namespace mixbench
