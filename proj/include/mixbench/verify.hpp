#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mixbench/bounds.hpp"
#include "mixbench/packing.hpp"
#include "mixbench/rng.hpp"

namespace mixbench {

enum class Suite { loss_sandwich, kl, concentration, fano, triangle, davis_kahan, support_recovery };

/// Hyphenated CLI names: loss-sandwich, kl, concentration, fano, triangle,
/// davis-kahan, support-recovery.
std::string_view to_string(Suite suite) noexcept;
Suite suite_from_string(std::string_view name);
std::vector<Suite> all_suites();

struct SuiteOptions {
  std::uint64_t seed = 0;
  /// Replaces the default families of the fano and triangle suites.
  std::optional<PackingFamily> family;
  /// Monte-Carlo trials per check (kl, concentration).
  std::int64_t trials = 100000;
  std::int64_t dk_instances = 1000;
  std::int64_t kl_pairs = 200;
  std::int64_t recovery_replicates = 500;
};

struct SuiteResult {
  Suite suite = Suite::kl;
  std::vector<BoundReport> checks;

  /// Every applicable check holds (checks without a verdict are skipped).
  bool all_hold() const;
  std::int64_t failures() const;
};

SuiteResult run_suite(Suite suite, const SuiteOptions& options = {});

/// Common-center pair with |h| = |h'| = xi sigma at angle beta, in a random
/// orientation drawn from `rng`.
std::pair<Mixture, Mixture> random_equal_norm_pair(CounterRng& rng, Index d, double xi, double sigma, double beta);

/// Symmetric a with a simple top eigenvalue and symmetric e with
/// |e|_2 <= gap / 5.
std::pair<MatrixXd, MatrixXd> random_davis_kahan_instance(CounterRng& rng, Index d);

}  // namespace mixbench
