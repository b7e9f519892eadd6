#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "mixbench/model.hpp"

namespace mixbench {

template <typename Scalar>
struct MeanCov {
  Vector<Scalar> mean;
  Matrix<Scalar> cov;
};

/// Sample mean and 1/n-normalized sample covariance.
template <typename Derived>
MeanCov<typename Derived::Scalar> sample_mean_cov(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  require(points.rows() >= 1, Errc::EmptySample, "cannot estimate moments of an empty sample");
  const Scalar n = Scalar(points.rows());
  MeanCov<Scalar> out;
  out.mean = points.colwise().sum().transpose() / n;
  const Matrix<Scalar> centered = points.rowwise() - out.mean.transpose();
  out.cov = Matrix<Scalar>::Zero(points.cols(), points.cols());
  out.cov.template selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), Scalar(1) / n);
  out.cov = out.cov.template selfadjointView<Eigen::Lower>();
  return out;
}

template <typename Scalar>
MeanCov<Scalar> sample_mean_cov(const Dataset<Scalar>& data) {
  return sample_mean_cov(data.points);
}

/// Per-coordinate 1/n-normalized variances (the diagonal of the sample covariance).
template <typename Derived>
Vector<typename Derived::Scalar> sample_variances(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  require(points.rows() >= 1, Errc::EmptySample, "cannot estimate moments of an empty sample");
  const Scalar n = Scalar(points.rows());
  const Vector<Scalar> mean = points.colwise().sum().transpose() / n;
  return (points.rowwise() - mean.transpose()).colwise().squaredNorm().transpose() / n;
}

template <typename Scalar>
struct EigenResult {
  Vector<Scalar> vector;
  Scalar value = Scalar(0);
  bool converged = false;
  int iterations = 0;
};

inline int default_power_iterations(Index d) {
  const double dd = static_cast<double>(std::max<Index>(d, 1));
  return static_cast<int>(10.0 * dd * std::log(dd)) + 500;
}

namespace detail {

template <typename Scalar>
EigenResult<Scalar> power_run(const Matrix<Scalar>& m, Vector<Scalar> v, Scalar tol, int max_iter) {
  EigenResult<Scalar> out;
  v.normalize();
  Scalar norm_estimate(0);
  for (int k = 1; k <= max_iter; ++k) {
    const Vector<Scalar> w = m * v;
    const Scalar rq = v.dot(w);
    const Scalar wnorm = w.norm();
    norm_estimate = std::max(norm_estimate, wnorm);
    out.iterations = k;
    out.value = rq;
    if ((w - rq * v).norm() <= tol * norm_estimate) {
      out.converged = true;
      break;
    }
    v = w / wnorm;
  }
  out.vector = std::move(v);
  return out;
}

template <typename Scalar>
Vector<Scalar> canonical_sign(Vector<Scalar> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < Scalar(0)) v = -v;
  return v;
}

}  // namespace detail

/// Eigenvector of the largest eigenvalue of a symmetric matrix by power
/// iteration. The first run starts at the basis vector of the largest
/// diagonal entry and a second run starts at a fixed pseudorandom vector;
/// the larger Rayleigh quotient wins. Two converged runs with equal
/// Rayleigh quotients but different vectors mean the top eigenvalue is not
/// simple, reported as converged = false. Matrices whose dominant
/// eigenvalue is negative are shifted to make the algebraically largest one
/// dominant. Output is sign-canonical.
template <typename Derived>
EigenResult<typename Derived::Scalar> top_eigenvector(const Eigen::MatrixBase<Derived>& matrix,
                                                      typename Derived::Scalar tol = 1e-10, int max_iter = -1) {
  using Scalar = typename Derived::Scalar;
  require(matrix.rows() == matrix.cols() && matrix.rows() >= 1, Errc::InvalidMatrix, "matrix must be square");
  Matrix<Scalar> m = matrix;
  const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
  require(m.allFinite(), Errc::InvalidMatrix, "matrix has non-finite entries");
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= Scalar(1e-10) * scale, Errc::InvalidMatrix,
          "matrix is not symmetric");
  const Index d = m.rows();
  if (max_iter < 0) max_iter = default_power_iterations(d);

  Index start = 0;
  m.diagonal().maxCoeff(&start);
  Vector<Scalar> basis = Vector<Scalar>::Unit(d, start);
  Vector<Scalar> scrambled(d);
  CounterRng rng(0x5EED0F7E16E7ULL);
  for (Index i = 0; i < d; ++i) scrambled(i) = Scalar(rng.normal());

  auto solve = [&](const Matrix<Scalar>& target) {
    auto first = detail::power_run<Scalar>(target, basis, tol, max_iter);
    auto second = detail::power_run<Scalar>(target, scrambled, tol, max_iter);
    return std::pair{std::move(first), std::move(second)};
  };

  auto [a, b] = solve(m);
  Scalar shift(0);
  if (std::min(a.value, b.value) < Scalar(0)) {
    shift = std::min(a.value, b.value);
    m.diagonal().array() -= shift;
    std::tie(a, b) = solve(m);
  }

  EigenResult<Scalar> out;
  const Scalar spread = tol * std::max(std::abs(a.value), std::abs(b.value)) * Scalar(10);
  const bool tie = a.converged && b.converged && std::abs(a.value - b.value) <= spread &&
                   std::abs(a.vector.dot(b.vector)) < Scalar(1) - Scalar(1e-6);
  if (tie) {
    out = std::move(a);
    out.converged = false;
  } else if (a.converged != b.converged) {
    out = a.converged ? std::move(a) : std::move(b);
  } else {
    out = a.value >= b.value ? std::move(a) : std::move(b);
  }

  if (!out.converged && !tie) {
    // Stalled on a small relative gap: subtract an estimate of the smallest
    // eigenvalue so the bulk of the spectrum contracts towards zero.
    const Scalar bound = m.cwiseAbs().rowwise().sum().maxCoeff();
    Matrix<Scalar> flipped = -m;
    flipped.diagonal().array() += bound;
    const Scalar floor = bound - detail::power_run<Scalar>(flipped, scrambled, tol, max_iter).value;
    Matrix<Scalar> deflated = m;
    deflated.diagonal().array() -= floor;
    auto [p, q] = solve(deflated);
    auto& best = p.converged && (!q.converged || p.value >= q.value) ? p : q;
    if (best.converged && best.value + floor >= out.value - spread) {
      out = std::move(best);
      out.value += floor;
    }
  }
  out.value += shift;
  out.vector = detail::canonical_sign<Scalar>(std::move(out.vector));
  return out;
}

/// Dense PCA-split clustering: v = top eigenvector of the sample
/// covariance, t = sample mean . v.
template <typename Scalar>
LinearClassifier<Scalar> pca_classifier(const Dataset<Scalar>& data) {
  require(data.size() >= 2, Errc::TooFewSamples, "pca_classifier needs at least 2 points");
  if (data.dim() == 1) {
    const Scalar mean = data.points.col(0).mean();
    return LinearClassifier<Scalar>{Vector<Scalar>::Ones(1), mean, false};
  }
  const auto moments = sample_mean_cov(data.points);
  const auto top = top_eigenvector(moments.cov);
  return LinearClassifier<Scalar>{top.vector, moments.mean.dot(top.vector), false};
}

/// PCA-split on the columns in `indices`, embedded back into R^d with zeros
/// elsewhere. An empty index set yields the flagged degenerate classifier
/// v = e_1, t = mean(x_1).
template <typename Scalar>
LinearClassifier<Scalar> restricted_pca_classifier(const Dataset<Scalar>& data, const std::vector<Index>& indices) {
  require(data.size() >= 2, Errc::TooFewSamples, "restricted PCA needs at least 2 points");
  const Index d = data.dim();
  if (indices.empty())
    return LinearClassifier<Scalar>{Vector<Scalar>::Unit(d, 0), data.points.col(0).mean(), true};
  if (static_cast<Index>(indices.size()) == d) return pca_classifier(data);
  Dataset<Scalar> restricted;
  restricted.points = data.points(Eigen::all, indices);
  const auto sub = pca_classifier(restricted);
  Vector<Scalar> v = Vector<Scalar>::Zero(d);
  for (std::size_t k = 0; k < indices.size(); ++k) v(indices[k]) = sub.direction(static_cast<Index>(k));
  return LinearClassifier<Scalar>{std::move(v), sub.threshold, false};
}

/// alpha = sqrt(6 log(nd) / n) + 2 log(nd) / n.
inline double screening_alpha(Index n, Index d) {
  const double nn = static_cast<double>(n);
  const double l = std::log(nn * static_cast<double>(d));
  return std::sqrt(6.0 * l / nn) + 2.0 * l / nn;
}

template <typename Scalar>
struct ScreeningResult {
  Scalar alpha = Scalar(0);
  Scalar tau_hat = Scalar(0);
  /// 0-based, increasing.
  std::vector<Index> selected;
  Vector<Scalar> diag_variances;

  /// The recovery guarantee needs alpha <= 1/4; the estimator still runs.
  bool guarantee_violated() const { return alpha > Scalar(0.25); }
};

/// Variance-threshold screening: keeps coordinates whose sample variance
/// strictly exceeds tau = (1 + alpha) / (1 - alpha) * min_i variance_i.
template <typename Scalar>
ScreeningResult<Scalar> screening(const Dataset<Scalar>& data) {
  require(data.dim() >= 2, Errc::InvalidDimension, "screening needs d >= 2");
  require(data.size() >= 2, Errc::TooFewSamples, "screening needs n >= 2");
  ScreeningResult<Scalar> out;
  out.alpha = Scalar(screening_alpha(data.size(), data.dim()));
  out.diag_variances = sample_variances(data.points);
  out.tau_hat = (Scalar(1) + out.alpha) / (Scalar(1) - out.alpha) * out.diag_variances.minCoeff();
  for (Index i = 0; i < data.dim(); ++i)
    if (out.diag_variances(i) > out.tau_hat) out.selected.push_back(i);
  return out;
}

/// Screening followed by PCA-split on the selected coordinates.
template <typename Scalar>
std::pair<LinearClassifier<Scalar>, ScreeningResult<Scalar>> sparse_pca_classifier(const Dataset<Scalar>& data) {
  auto screened = screening(data);
  auto clf = restricted_pca_classifier(data, screened.selected);
  return {std::move(clf), std::move(screened)};
}

/// PCA-split on the true support of data.theta; a comparator only, it needs
/// the generating parameters.
template <typename Scalar>
LinearClassifier<Scalar> oracle_support_pca_classifier(const Dataset<Scalar>& data) {
  require(data.theta.has_value(), Errc::InvalidParams, "oracle support needs the generating parameters");
  return restricted_pca_classifier(data, data.theta->support());
}

// ---------------------------------------------------------------------------
// Recovery and perturbation checks (double precision).

struct SupportTruth {
  std::vector<Index> relevant;  ///< S = {i : h_i != 0}
  std::vector<Index> strong;    ///< S~ = {i : |h_i| >= 4 sigma sqrt(alpha)}
};

SupportTruth support_truth(const MixtureParams<double>& theta, double alpha);

/// Whether strong ⊆ selected ⊆ relevant (all sorted ascending).
bool recovery_holds(const SupportTruth& truth, const std::vector<Index>& selected);

struct RecoveryReport {
  double frequency = 0.0;
  std::int64_t successes = 0;
  std::int64_t replicates = 0;
  double floor = 0.0;  ///< 1 - 6/n
  double std_err = 0.0;
  double alpha = 0.0;
  Index n = 0;
  SupportTruth truth;
};

/// Fraction of `replicates` samples of size n (stream(seed, r)) whose
/// screening set satisfies S~ ⊆ S_hat ⊆ S.
RecoveryReport support_recovery_check(const MixtureParams<double>& theta, Index n, std::int64_t replicates,
                                      std::uint64_t seed);

struct DavisKahanResult {
  double sin_angle = 0.0;
  double bound = 0.0;
  bool holds = false;
  double gap = 0.0;
  double perturbation_norm = 0.0;
};

/// Compares the angle between top eigenvectors of a and a + e with
/// 4 |u| / gap, u_i = v_{i+1}(a)^T e v_1(a). Requires gap > 0 and
/// |e|_2 <= gap / 5.
DavisKahanResult davis_kahan_check(const MatrixXd& a, const MatrixXd& e);

}  // namespace mixbench
