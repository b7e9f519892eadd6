#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <string>
#include <vector>

#include "mixbench/error.hpp"
#include "mixbench/normal.hpp"
#include "mixbench/rng.hpp"

namespace mixbench {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

using Index = Eigen::Index;

/// Equal-weight two-component isotropic Gaussian mixture
/// 1/2 N(mu1, sigma^2 I) + 1/2 N(mu2, sigma^2 I).
///
/// Internally described by the center mu0 = (mu1 + mu2) / 2, the
/// half-separation h = (mu2 - mu1) / 2 and sigma. The separation is
/// lambda = |mu1 - mu2| = 2 |h| and the signal-to-noise ratio is
/// xi = |h| / sigma; every public formula in this library is stated in
/// terms of that xi.
template <typename Scalar = double>
class MixtureParams {
 public:
  using VectorType = Vector<Scalar>;

  MixtureParams(VectorType mu1, VectorType mu2, Scalar sigma)
      : mu1_(std::move(mu1)), mu2_(std::move(mu2)), sigma_(sigma) {
    require(mu1_.size() == mu2_.size(), Errc::ShapeError, "mu1 and mu2 differ in dimension");
    require(mu1_.size() >= 1, Errc::InvalidParams, "dimension must be at least 1");
    require(mu1_.allFinite() && mu2_.allFinite() && std::isfinite(sigma_), Errc::InvalidParams,
            "non-finite mixture parameter");
    require(sigma_ > Scalar(0), Errc::InvalidParams, "sigma must be positive");
    center_ = (mu1_ + mu2_) / Scalar(2);
    half_ = (mu2_ - mu1_) / Scalar(2);
  }

  /// theta = (center - half, center + half).
  static MixtureParams from_center(const VectorType& center, const VectorType& half, Scalar sigma) {
    require(center.size() == half.size(), Errc::ShapeError, "center and half-separation differ in dimension");
    return MixtureParams(center - half, center + half, sigma);
  }

  Index dim() const noexcept { return mu1_.size(); }
  const VectorType& mu1() const noexcept { return mu1_; }
  const VectorType& mu2() const noexcept { return mu2_; }
  Scalar sigma() const noexcept { return sigma_; }
  const VectorType& center() const noexcept { return center_; }
  const VectorType& half_separation() const noexcept { return half_; }

  Scalar separation() const { return Scalar(2) * half_.norm(); }
  Scalar snr() const { return half_.norm() / sigma_; }

  /// Indices (0-based) of the coordinates where the two means differ.
  std::vector<Index> support() const {
    std::vector<Index> out;
    for (Index i = 0; i < dim(); ++i)
      if (half_(i) != Scalar(0)) out.push_back(i);
    return out;
  }
  Index sparsity() const { return static_cast<Index>(support().size()); }

  MixtureParams shifted(const VectorType& offset) const {
    require(offset.size() == dim(), Errc::ShapeError, "shift dimension mismatch");
    return MixtureParams(mu1_ + offset, mu2_ + offset, sigma_);
  }

 private:
  VectorType mu1_;
  VectorType mu2_;
  Scalar sigma_;
  VectorType center_;
  VectorType half_;
};

/// Hyperplane clustering: label 1 when x.v >= t, label 2 otherwise.
template <typename Scalar = double>
struct LinearClassifier {
  Vector<Scalar> direction;
  Scalar threshold = Scalar(0);
  /// Set when the producing estimator had no usable signal.
  bool degenerate = false;

  int label(const Eigen::Ref<const Vector<Scalar>>& x) const {
    return x.dot(direction) >= threshold ? 1 : 2;
  }

  /// Normalizes v and flips (v, t) -> (-v, -t) so that the coordinate of
  /// largest magnitude is nonnegative. Both forms induce the same partition.
  static LinearClassifier canonical(Vector<Scalar> v, Scalar t, bool degenerate = false) {
    const Scalar norm = v.norm();
    require(norm > Scalar(0) && std::isfinite(norm), Errc::InvalidClassifier, "zero or non-finite direction");
    v /= norm;
    t /= norm;
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < Scalar(0)) {
      v = -v;
      t = -t;
    }
    return LinearClassifier{std::move(v), t, degenerate};
  }
};

/// n x d sample with optional latent labels (1 for mu1, 2 for mu2).
template <typename Scalar = double>
struct Dataset {
  Matrix<Scalar> points;
  std::optional<std::vector<int>> labels;
  std::uint64_t seed = 0;
  std::optional<MixtureParams<Scalar>> theta;

  Index size() const noexcept { return points.rows(); }
  Index dim() const noexcept { return points.cols(); }

  void validate() const {
    require(points.rows() >= 1, Errc::EmptySample, "dataset has no rows");
    require(points.allFinite(), Errc::InvalidParams, "dataset contains non-finite values");
    if (labels) require(static_cast<Index>(labels->size()) == points.rows(), Errc::ShapeError, "label count differs from row count");
  }
};

/// Draws n points X_i = mu0 + Y_i h + sigma Z_i with Y_i uniform on {-1, +1}.
/// Row i consumes the counter stream of `seed` in order: one sign draw
/// followed by d normals.
template <typename Scalar>
Dataset<Scalar> sample(const MixtureParams<Scalar>& theta, Index n, std::uint64_t seed) {
  require(n >= 1, Errc::EmptySample, "sample size must be positive");
  const Index d = theta.dim();
  Dataset<Scalar> out;
  out.points.resize(n, d);
  out.labels.emplace(static_cast<std::size_t>(n));
  out.seed = seed;
  out.theta = theta;
  CounterRng rng(seed);
  const auto& center = theta.center();
  const auto& half = theta.half_separation();
  const Scalar sigma = theta.sigma();
  for (Index i = 0; i < n; ++i) {
    const int y = rng.sign();
    (*out.labels)[static_cast<std::size_t>(i)] = y < 0 ? 1 : 2;
    for (Index j = 0; j < d; ++j)
      out.points(i, j) = center(j) + Scalar(y) * half(j) + sigma * static_cast<Scalar>(rng.normal());
  }
  return out;
}

/// Bayes-optimal clustering: the perpendicular bisector of mu1 and mu2.
template <typename Scalar>
LinearClassifier<Scalar> bayes_classifier(const MixtureParams<Scalar>& theta) {
  const Scalar norm = theta.half_separation().norm();
  require(norm > Scalar(0), Errc::DegenerateSeparation, "mu1 == mu2");
  Vector<Scalar> v = theta.half_separation() / norm;
  auto clf = LinearClassifier<Scalar>::canonical(v, Scalar(0));
  clf.threshold = theta.center().dot(clf.direction);
  return clf;
}

/// log p_theta(x) via log-sum-exp of the two component log-densities.
template <typename Scalar>
Scalar mixture_log_density(const MixtureParams<Scalar>& theta, const Eigen::Ref<const Vector<std::type_identity_t<Scalar>>>& x) {
  require(x.size() == theta.dim(), Errc::ShapeError, "point dimension differs from mixture dimension");
  using std::log;
  const Scalar var = theta.sigma() * theta.sigma();
  const Scalar base = -Scalar(0.5) * Scalar(theta.dim()) * (Scalar(kLogTwoPi) + log(var)) - Scalar(std::log(2.0));
  const Scalar e1 = -(x - theta.mu1()).squaredNorm() / (Scalar(2) * var);
  const Scalar e2 = -(x - theta.mu2()).squaredNorm() / (Scalar(2) * var);
  const Scalar hi = std::max(e1, e2);
  const Scalar lo = std::min(e1, e2);
  return base + hi + std::log1p(std::exp(lo - hi));
}

}  // namespace mixbench
