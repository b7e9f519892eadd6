#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixbench/config.hpp"

namespace mixbench {

struct SweepRow {
  double axis_value = 0.0;
  std::int64_t replicate = 0;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t s = 0;
  double lambda = 0.0;
  double sigma = 0.0;
  double loss = 0.0;
  bool degenerate = false;
  double runtime_ms = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepSummary {
  double axis_value = 0.0;
  std::int64_t replicates = 0;
  double mean_loss = 0.0;
  double std_err = 0.0;

  bool operator==(const SweepSummary&) const = default;
};

/// Log-log least-squares fit y ~ exp(intercept) x^slope. The 95% interval
/// is infinite with only two points.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t points = 0;

  bool operator==(const RateFit&) const = default;
};

struct SweepResult {
  /// "n", "d", "lambda", "s", or "none" without a sweep.
  std::string axis = "none";
  EstimatorKind estimator = EstimatorKind::dense_pca;
  LossMethod loss_method = LossMethod::quadrature;
  std::int64_t mc_samples = 0;
  /// Sorted by (axis_value, replicate).
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summary;
  std::optional<RateFit> fitted_slope;
  std::vector<std::string> warnings;

  bool operator==(const SweepResult&) const = default;
};

RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct RunOptions {
  int threads = 1;
  /// Wall-clock timing makes output run-dependent; off by default.
  bool record_timing = false;
};

/// Replicate r at every axis value uses seed stream_seed(master_seed, r),
/// so the sweep compares axis values on common random numbers. Tasks run on
/// `threads` workers and write into preassigned slots; the result does not
/// depend on the thread count.
SweepResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Recomputes summary and fitted slope from rows. Zero mean losses are
/// floored at 1/(2 mc_samples) under Monte Carlo and dropped under
/// quadrature; both leave a warning.
void summarize(SweepResult& result);

/// `requested`, unless MIXBENCH_THREADS holds a positive integer.
int resolve_threads(int requested);

}  // namespace mixbench
