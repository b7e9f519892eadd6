#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mixbench/loss.hpp"

namespace mixbench {

enum class EstimatorKind { dense_pca, sparse_pca, oracle_support_pca };
enum class SignalProfile { equal_coords, single_coord, custom };
enum class SweepAxis { n, d, lambda, s };

std::string_view to_string(EstimatorKind kind) noexcept;
std::string_view to_string(SignalProfile profile) noexcept;
std::string_view to_string(SweepAxis axis) noexcept;
EstimatorKind estimator_from_string(std::string_view name);
SweepAxis axis_from_string(std::string_view name);

struct Sweep {
  SweepAxis axis = SweepAxis::n;
  std::vector<double> values;

  bool operator==(const Sweep&) const = default;
};

/// One simulation setting. The mixture is centered at the origin with
/// mu2 - mu1 given by the signal profile:
///   equal_coords  lambda / sqrt(s) on the first s coordinates
///   single_coord  lambda e_1 (requires s = 1)
///   custom        `custom_signal` verbatim (length d, norm lambda, at most s nonzeros)
struct ExperimentConfig {
  EstimatorKind estimator = EstimatorKind::dense_pca;
  std::int64_t n = 1000;
  std::int64_t d = 16;
  std::int64_t s = 1;
  double lambda = 1.0;
  double sigma = 1.0;
  SignalProfile signal_profile = SignalProfile::equal_coords;
  std::vector<double> custom_signal;
  std::int64_t replicates = 200;
  std::uint64_t master_seed = 0;
  LossMethod loss_method = LossMethod::quadrature;
  std::int64_t mc_samples = 100000;
  std::optional<Sweep> sweep;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Copy with the sweep axis set to `value` (sweep itself is dropped).
  ExperimentConfig at(SweepAxis axis, double value) const;

  Mixture theta() const;

  /// Non-fatal conditions outside the estimator's guarantees.
  std::vector<std::string> warnings() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the flat JSON schema; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace mixbench
