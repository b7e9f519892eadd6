#include "mixbench/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "mixbench/estimators.hpp"

namespace mixbench {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::dense_pca: return "dense_pca";
    case EstimatorKind::sparse_pca: return "sparse_pca";
    case EstimatorKind::oracle_support_pca: return "oracle_support_pca";
  }
  return "unknown";
}

std::string_view to_string(SignalProfile profile) noexcept {
  switch (profile) {
    case SignalProfile::equal_coords: return "equal_coords";
    case SignalProfile::single_coord: return "single_coord";
    case SignalProfile::custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::n: return "n";
    case SweepAxis::d: return "d";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::s: return "s";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  for (auto kind : {EstimatorKind::dense_pca, EstimatorKind::sparse_pca, EstimatorKind::oracle_support_pca})
    if (to_string(kind) == name) return kind;
  fail(Errc::ConfigError, "estimator: unknown value '" + std::string(name) + "'");
}

SweepAxis axis_from_string(std::string_view name) {
  for (auto axis : {SweepAxis::n, SweepAxis::d, SweepAxis::lambda, SweepAxis::s})
    if (to_string(axis) == name) return axis;
  fail(Errc::ConfigError, "sweep.axis: unknown value '" + std::string(name) + "'");
}

namespace {

void field(bool ok, const std::string& name, const std::string& why) {
  require(ok, Errc::ConfigError, name + ": " + why);
}

bool is_integral(double x) { return std::isfinite(x) && x == std::round(x); }

}  // namespace

void ExperimentConfig::validate() const {
  field(n >= 2, "n", "must be at least 2");
  field(d >= 1, "d", "must be at least 1");
  field(s >= 1 && s <= d, "s", "must lie in [1, d]");
  field(std::isfinite(lambda) && lambda > 0.0, "lambda", "must be positive");
  field(std::isfinite(sigma) && sigma > 0.0, "sigma", "must be positive");
  field(replicates >= 1, "replicates", "must be at least 1");
  field(mc_samples >= 100, "mc_samples", "must be at least 100");
  if (estimator == EstimatorKind::sparse_pca) field(d >= 2, "d", "sparse_pca needs d >= 2");
  switch (signal_profile) {
    case SignalProfile::equal_coords: break;
    case SignalProfile::single_coord: field(s == 1, "signal_profile", "single_coord requires s = 1"); break;
    case SignalProfile::custom: {
      field(static_cast<std::int64_t>(custom_signal.size()) == d, "signal_profile", "custom vector must have length d");
      double norm_sq = 0.0;
      std::int64_t nonzero = 0;
      for (double x : custom_signal) {
        field(std::isfinite(x), "signal_profile", "custom vector must be finite");
        norm_sq += x * x;
        nonzero += x != 0.0;
      }
      field(std::abs(std::sqrt(norm_sq) - lambda) <= 1e-9 * lambda, "signal_profile",
            "custom vector norm must equal lambda");
      field(nonzero <= s, "signal_profile", "custom vector has more than s nonzeros");
      break;
    }
  }
  if (sweep) {
    field(!sweep->values.empty(), "sweep.values", "must not be empty");
    for (std::size_t i = 0; i < sweep->values.size(); ++i) {
      const double v = sweep->values[i];
      field(std::isfinite(v) && v > 0.0, "sweep.values", "must be positive");
      if (i > 0) field(v > sweep->values[i - 1], "sweep.values", "must be strictly increasing");
      if (sweep->axis != SweepAxis::lambda) field(is_integral(v), "sweep.values", "must be integers for this axis");
    }
    if (signal_profile == SignalProfile::custom)
      field(sweep->axis == SweepAxis::n, "sweep.axis", "a custom signal profile can only be swept over n");
    for (double v : sweep->values) at(sweep->axis, v).validate();
  }
}

ExperimentConfig ExperimentConfig::at(SweepAxis axis, double value) const {
  ExperimentConfig out = *this;
  out.sweep.reset();
  switch (axis) {
    case SweepAxis::n: out.n = static_cast<std::int64_t>(std::llround(value)); break;
    case SweepAxis::d: out.d = static_cast<std::int64_t>(std::llround(value)); break;
    case SweepAxis::lambda: out.lambda = value; break;
    case SweepAxis::s: out.s = static_cast<std::int64_t>(std::llround(value)); break;
  }
  return out;
}

Mixture ExperimentConfig::theta() const {
  VectorXd separation = VectorXd::Zero(d);
  switch (signal_profile) {
    case SignalProfile::equal_coords:
      separation.head(s).setConstant(lambda / std::sqrt(static_cast<double>(s)));
      break;
    case SignalProfile::single_coord: separation(0) = lambda; break;
    case SignalProfile::custom:
      separation = Eigen::Map<const VectorXd>(custom_signal.data(), static_cast<Index>(custom_signal.size()));
      break;
  }
  return Mixture(-0.5 * separation, 0.5 * separation, sigma);
}

std::vector<std::string> ExperimentConfig::warnings() const {
  std::vector<std::string> out;
  if (estimator == EstimatorKind::oracle_support_pca)
    out.emplace_back("oracle_support_pca reads the true support; it is a comparator, not a data-driven estimator");
  auto check = [&](const ExperimentConfig& c) {
    if (c.estimator == EstimatorKind::dense_pca && c.n < std::max<std::int64_t>(68, 4 * c.d))
      out.push_back("dense_pca with n=" + std::to_string(c.n) + " < max(68, 4d=" + std::to_string(4 * c.d) +
                    "): outside the upper-bound guarantee");
    if (c.estimator == EstimatorKind::sparse_pca && screening_alpha(c.n, c.d) > 0.25)
      out.push_back("sparse_pca with alpha(n=" + std::to_string(c.n) + ", d=" + std::to_string(c.d) +
                    ") > 1/4: outside the screening guarantee");
  };
  if (sweep)
    for (double v : sweep->values) check(at(sweep->axis, v));
  else
    check(*this);
  return out;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  require(j.is_object(), Errc::ConfigError, "config must be a JSON object");
  static const std::set<std::string> known = {"estimator",   "n",           "d",          "s",
                                              "lambda",      "sigma",       "signal_profile", "replicates",
                                              "master_seed", "loss_method", "mc_samples", "sweep"};
  for (const auto& [key, value] : j.items()) field(known.count(key) > 0, key, "unknown key");

  ExperimentConfig c;
  try {
    if (j.contains("estimator")) c.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    if (j.contains("n")) c.n = j.at("n").get<std::int64_t>();
    if (j.contains("d")) c.d = j.at("d").get<std::int64_t>();
    if (j.contains("s")) c.s = j.at("s").get<std::int64_t>();
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<std::int64_t>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("loss_method")) c.loss_method = loss_method_from_string(j.at("loss_method").get<std::string>());
    if (j.contains("mc_samples")) c.mc_samples = j.at("mc_samples").get<std::int64_t>();
    if (j.contains("signal_profile")) {
      const auto& p = j.at("signal_profile");
      if (p.is_array()) {
        c.signal_profile = SignalProfile::custom;
        c.custom_signal = p.get<std::vector<double>>();
      } else {
        const auto name = p.get<std::string>();
        if (name == "equal_coords")
          c.signal_profile = SignalProfile::equal_coords;
        else if (name == "single_coord")
          c.signal_profile = SignalProfile::single_coord;
        else
          field(false, "signal_profile", "unknown value '" + name + "'");
      }
    }
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
      const auto& sw = j.at("sweep");
      field(sw.is_object(), "sweep", "must be an object");
      for (const auto& [key, value] : sw.items()) field(key == "axis" || key == "values", "sweep." + key, "unknown key");
      Sweep sweep;
      sweep.axis = axis_from_string(sw.at("axis").get<std::string>());
      sweep.values = sw.at("values").get<std::vector<double>>();
      c.sweep = std::move(sweep);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ConfigError, std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ConfigError, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["estimator"] = to_string(c.estimator);
  j["n"] = c.n;
  j["d"] = c.d;
  j["s"] = c.s;
  j["lambda"] = c.lambda;
  j["sigma"] = c.sigma;
  if (c.signal_profile == SignalProfile::custom)
    j["signal_profile"] = c.custom_signal;
  else
    j["signal_profile"] = to_string(c.signal_profile);
  j["replicates"] = c.replicates;
  j["master_seed"] = c.master_seed;
  j["loss_method"] = to_string(c.loss_method);
  j["mc_samples"] = c.mc_samples;
  if (c.sweep) j["sweep"] = {{"axis", to_string(c.sweep->axis)}, {"values", c.sweep->values}};
  return j;
}

}  // namespace mixbench
