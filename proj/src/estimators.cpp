#include "mixbench/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace mixbench {

SupportTruth support_truth(const MixtureParams<double>& theta, double alpha) {
  SupportTruth out;
  out.relevant = theta.support();
  const double cutoff = 4.0 * theta.sigma() * std::sqrt(alpha);
  for (Index i : out.relevant)
    if (std::abs(theta.half_separation()(i)) >= cutoff) out.strong.push_back(i);
  return out;
}

bool recovery_holds(const SupportTruth& truth, const std::vector<Index>& selected) {
  return std::includes(selected.begin(), selected.end(), truth.strong.begin(), truth.strong.end()) &&
         std::includes(truth.relevant.begin(), truth.relevant.end(), selected.begin(), selected.end());
}

RecoveryReport support_recovery_check(const MixtureParams<double>& theta, Index n, std::int64_t replicates,
                                      std::uint64_t seed) {
  require(replicates >= 1, Errc::PreconditionViolated, "replicates must be positive");
  require(theta.dim() >= 2, Errc::InvalidDimension, "support recovery needs d >= 2");
  require(n >= 2, Errc::TooFewSamples, "support recovery needs n >= 2");
  const double alpha = screening_alpha(n, theta.dim());
  require(alpha <= 0.25, Errc::PreconditionViolated, "alpha(n, d) = " + std::to_string(alpha) + " exceeds 1/4");

  RecoveryReport report;
  report.alpha = alpha;
  report.n = n;
  report.replicates = replicates;
  report.floor = 1.0 - 6.0 / static_cast<double>(n);
  report.truth = support_truth(theta, alpha);
  for (std::int64_t r = 0; r < replicates; ++r) {
    const auto data = sample(theta, n, stream_seed(seed, static_cast<std::uint64_t>(r)));
    if (recovery_holds(report.truth, screening(data).selected)) ++report.successes;
  }
  const double reps = static_cast<double>(replicates);
  report.frequency = static_cast<double>(report.successes) / reps;
  report.std_err = std::sqrt(report.frequency * (1.0 - report.frequency) / reps);
  return report;
}

DavisKahanResult davis_kahan_check(const MatrixXd& a, const MatrixXd& e) {
  require(a.rows() == a.cols() && e.rows() == e.cols() && a.rows() == e.rows(), Errc::ShapeError,
          "a and e must be square of equal size");
  require(a.rows() >= 2, Errc::InvalidDimension, "need d >= 2");
  const double scale = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), e.cwiseAbs().maxCoeff()));
  require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, Errc::InvalidMatrix, "a is not symmetric");
  require((e - e.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, Errc::InvalidMatrix, "e is not symmetric");

  // Eigenvalues come back ascending.
  const Eigen::SelfAdjointEigenSolver<MatrixXd> base(a);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> noise(e, Eigen::EigenvaluesOnly);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> perturbed(a + e);
  const Index d = a.rows();

  DavisKahanResult out;
  out.gap = base.eigenvalues()(d - 1) - base.eigenvalues()(d - 2);
  out.perturbation_norm = noise.eigenvalues().cwiseAbs().maxCoeff();
  require(out.gap > 0.0, Errc::PreconditionViolated, "top eigenvalue of a is not simple");
  require(out.perturbation_norm <= out.gap / 5.0, Errc::PreconditionViolated, "|e|_2 exceeds gap / 5");

  const VectorXd top = base.eigenvectors().col(d - 1);
  const VectorXd moved = perturbed.eigenvectors().col(d - 1);
  const VectorXd others = base.eigenvectors().leftCols(d - 1).transpose() * (e * top);
  out.sin_angle = (moved - moved.dot(top) * top).norm();
  out.bound = 4.0 * others.norm() / out.gap;
  out.holds = out.sin_angle <= out.bound;
  return out;
}

}  // namespace mixbench
