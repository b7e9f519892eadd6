#include "mixbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "mixbench/estimators.hpp"

namespace mixbench {

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
  std::set<double> distinct;
  for (const auto& [x, y] : points) {
    require(std::isfinite(x) && x > 0.0, Errc::DomainError, "fit_rate needs positive x");
    require(std::isfinite(y) && y > 0.0, Errc::DomainError, "fit_rate needs positive y");
    distinct.insert(x);
  }
  require(distinct.size() >= 2, Errc::TooFewPoints, "fit_rate needs at least 2 distinct x values");

  const auto k = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  RateFit fit;
  fit.points = static_cast<std::int64_t>(points.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (points.size() <= 2) {
    fit.ci_low = -std::numeric_limits<double>::infinity();
    fit.ci_high = std::numeric_limits<double>::infinity();
    return fit;
  }
  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - fit.intercept - fit.slope * std::log(x);
    ssr += r * r;
  }
  const double se = std::sqrt(ssr / (k - 2.0) / sxx);
  const double q = boost::math::quantile(boost::math::students_t(k - 2.0), 0.975);
  fit.ci_low = fit.slope - q * se;
  fit.ci_high = fit.slope + q * se;
  return fit;
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("MIXBENCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1, requested);
}

namespace {

Classifier fit_estimator(EstimatorKind kind, const Dataset<double>& data) {
  switch (kind) {
    case EstimatorKind::dense_pca: return pca_classifier(data);
    case EstimatorKind::sparse_pca: return sparse_pca_classifier(data).first;
    case EstimatorKind::oracle_support_pca: return oracle_support_pca_classifier(data);
  }
  fail(Errc::ConfigError, "estimator: unknown kind");
}

SweepRow run_replicate(const ExperimentConfig& cfg, double axis_value, std::int64_t replicate, bool record_timing) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.axis_value = axis_value;
  row.replicate = replicate;
  row.seed = stream_seed(cfg.master_seed, static_cast<std::uint64_t>(replicate));
  row.n = cfg.n;
  row.d = cfg.d;
  row.s = cfg.s;
  row.lambda = cfg.lambda;
  row.sigma = cfg.sigma;

  const Mixture theta = cfg.theta();
  auto data = sample(theta, cfg.n, row.seed);
  data.theta = theta;
  const Classifier clf = fit_estimator(cfg.estimator, data);
  row.degenerate = clf.degenerate;
  if (cfg.loss_method == LossMethod::quadrature) {
    row.loss = loss_exact_linear(theta, clf).value;
  } else {
    row.loss = loss_monte_carlo(
                   theta, [&clf](const Eigen::Ref<const VectorXd>& x) { return clf.label(x); }, cfg.mc_samples,
                   stream_seed(row.seed, 1))
                   .value;
  }
  if (record_timing)
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

void summarize(SweepResult& result) {
  result.summary.clear();
  result.fitted_slope.reset();
  std::map<double, std::vector<double>> groups;
  for (const auto& row : result.rows) groups[row.axis_value].push_back(row.loss);
  for (const auto& [value, losses] : groups) {
    SweepSummary s;
    s.axis_value = value;
    s.replicates = static_cast<std::int64_t>(losses.size());
    double sum = 0.0;
    for (double l : losses) sum += l;
    s.mean_loss = sum / static_cast<double>(losses.size());
    if (losses.size() > 1) {
      double ss = 0.0;
      for (double l : losses) ss += (l - s.mean_loss) * (l - s.mean_loss);
      s.std_err = std::sqrt(ss / static_cast<double>(losses.size() - 1) / static_cast<double>(losses.size()));
    }
    result.summary.push_back(s);
  }
  if (result.axis == "none" || result.summary.size() < 2) return;

  std::vector<std::pair<double, double>> points;
  for (const auto& s : result.summary) {
    if (s.mean_loss > 0.0) {
      points.emplace_back(s.axis_value, s.mean_loss);
    } else if (result.loss_method == LossMethod::monte_carlo) {
      points.emplace_back(s.axis_value, 0.5 / static_cast<double>(result.mc_samples));
      result.warnings.push_back("zero mean loss at " + result.axis + "=" + std::to_string(s.axis_value) +
                                " floored at 1/(2 mc_samples)");
    } else {
      result.warnings.push_back("zero mean loss at " + result.axis + "=" + std::to_string(s.axis_value) +
                                " dropped from the rate fit");
    }
  }
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.first);
  if (distinct.size() >= 2)
    result.fitted_slope = fit_rate(points);
  else
    result.warnings.push_back("fewer than 2 usable axis values; no rate fit");
}

SweepResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  SweepResult result;
  result.estimator = config.estimator;
  result.loss_method = config.loss_method;
  result.mc_samples = config.mc_samples;
  result.warnings = config.warnings();

  std::vector<std::pair<double, ExperimentConfig>> settings;
  if (config.sweep) {
    result.axis = std::string(to_string(config.sweep->axis));
    for (double v : config.sweep->values) settings.emplace_back(v, config.at(config.sweep->axis, v));
  } else {
    settings.emplace_back(0.0, config);
  }

  const auto reps = config.replicates;
  const auto total = static_cast<std::int64_t>(settings.size()) * reps;
  result.rows.resize(static_cast<std::size_t>(total));

  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t task = next.fetch_add(1);
      if (task >= total) return;
      try {
        const auto& [value, cfg] = settings[static_cast<std::size_t>(task / reps)];
        result.rows[static_cast<std::size_t>(task)] = run_replicate(cfg, value, task % reps, options.record_timing);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(total);
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::int64_t>(std::max(1, options.threads), std::max<std::int64_t>(1, total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  summarize(result);
  return result;
}

}  // namespace mixbench
