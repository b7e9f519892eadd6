#include "mixbench/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or(const json& j, double fallback) { return j.is_null() ? fallback : j.get<double>(); }

json vector_json(const mixbench::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

mixbench::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const mixbench::VectorXd>(values.data(), static_cast<mixbench::Index>(values.size()));
}

std::string str(std::string_view s) { return std::string(s); }

}  // namespace

namespace nlohmann {

void adl_serializer<mixbench::Mixture>::to_json(json& j, const mixbench::Mixture& theta) {
  j = json{{"mu1", vector_json(theta.mu1())}, {"mu2", vector_json(theta.mu2())}, {"sigma", theta.sigma()}};
}

mixbench::Mixture adl_serializer<mixbench::Mixture>::from_json(const json& j) {
  return mixbench::Mixture(vector_from(j.at("mu1")), vector_from(j.at("mu2")), j.at("sigma").get<double>());
}

void adl_serializer<mixbench::Classifier>::to_json(json& j, const mixbench::Classifier& clf) {
  j = json{{"direction", vector_json(clf.direction)}, {"threshold", clf.threshold}, {"degenerate", clf.degenerate}};
}

mixbench::Classifier adl_serializer<mixbench::Classifier>::from_json(const json& j) {
  return mixbench::Classifier{vector_from(j.at("direction")), j.at("threshold").get<double>(),
                              j.value("degenerate", false)};
}

}  // namespace nlohmann

namespace mixbench {

void to_json(json& j, const LossEstimate& e) {
  j = json{{"value", e.value}, {"method", str(to_string(e.method))}, {"std_err", e.std_err}, {"n_samples", e.n_samples}};
}

void from_json(const json& j, LossEstimate& e) {
  e.value = j.at("value").get<double>();
  e.method = loss_method_from_string(j.at("method").get<std::string>());
  e.std_err = j.at("std_err").get<double>();
  e.n_samples = j.at("n_samples").get<std::int64_t>();
}

void to_json(json& j, const ScreeningResult<double>& r) {
  j = json{{"alpha", r.alpha},
           {"tau_hat", r.tau_hat},
           {"selected", r.selected},
           {"diag_variances", vector_json(r.diag_variances)},
           {"guarantee_violated", r.guarantee_violated()}};
}

void from_json(const json& j, ScreeningResult<double>& r) {
  r.alpha = j.at("alpha").get<double>();
  r.tau_hat = j.at("tau_hat").get<double>();
  r.selected = j.at("selected").get<std::vector<Index>>();
  r.diag_variances = vector_from(j.at("diag_variances"));
}

void to_json(json& j, const SupportTruth& t) { j = json{{"relevant", t.relevant}, {"strong", t.strong}}; }

void from_json(const json& j, SupportTruth& t) {
  t.relevant = j.at("relevant").get<std::vector<Index>>();
  t.strong = j.at("strong").get<std::vector<Index>>();
}

void to_json(json& j, const RecoveryReport& r) {
  j = json{{"frequency", r.frequency}, {"successes", r.successes}, {"replicates", r.replicates},
           {"floor", r.floor},         {"std_err", r.std_err},     {"alpha", r.alpha},
           {"n", r.n},                 {"truth", r.truth}};
}

void from_json(const json& j, RecoveryReport& r) {
  r.frequency = j.at("frequency").get<double>();
  r.successes = j.at("successes").get<std::int64_t>();
  r.replicates = j.at("replicates").get<std::int64_t>();
  r.floor = j.at("floor").get<double>();
  r.std_err = j.at("std_err").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.n = j.at("n").get<Index>();
  r.truth = j.at("truth").get<SupportTruth>();
}

void to_json(json& j, const DavisKahanResult& r) {
  j = json{{"sin_angle", r.sin_angle},
           {"bound", r.bound},
           {"holds", r.holds},
           {"gap", r.gap},
           {"perturbation_norm", r.perturbation_norm}};
}

void to_json(json& j, const BoundReport& r) {
  json params = json::object();
  for (const auto& [key, value] : r.params) params[key] = number(value);
  j = json{{"kind", r.kind},
           {"params", params},
           {"bound_value", number(r.bound_value)},
           {"direction", r.direction == BoundDirection::upper ? "upper" : "lower"},
           {"empirical_value", r.empirical_value ? number(*r.empirical_value) : json(nullptr)},
           {"std_err", number(r.std_err)},
           {"slack", number(r.slack)},
           {"holds", r.holds ? json(*r.holds) : json(nullptr)},
           {"vacuous", r.vacuous}};
}

void from_json(const json& j, BoundReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.kind = j.at("kind").get<std::string>();
  r.params.clear();
  for (const auto& [key, value] : j.at("params").items()) r.params[key] = number_or(value, nan);
  r.bound_value = number_or(j.at("bound_value"), nan);
  r.direction = j.at("direction").get<std::string>() == "lower" ? BoundDirection::lower : BoundDirection::upper;
  r.empirical_value.reset();
  if (!j.at("empirical_value").is_null()) r.empirical_value = j.at("empirical_value").get<double>();
  r.std_err = number_or(j.at("std_err"), nan);
  r.slack = number_or(j.at("slack"), nan);
  r.holds.reset();
  if (!j.at("holds").is_null()) r.holds = j.at("holds").get<bool>();
  r.vacuous = j.at("vacuous").get<bool>();
}

void to_json(json& j, const FanoReport& r) {
  j = json{{"hypotheses", r.hypotheses},
           {"max_kl", r.max_kl},
           {"alpha_fano", r.alpha_fano},
           {"holds", r.holds},
           {"window_lower", r.window_lower},
           {"window_upper", r.window_upper},
           {"min_pair_loss", r.min_pair_loss},
           {"max_pair_loss", r.max_pair_loss},
           {"pairs_checked", r.pairs_checked},
           {"window_violations", r.window_violations},
           {"windows_hold", r.windows_hold},
           {"implied_lower_bound", r.implied_lower_bound}};
}

void to_json(json& j, const TriangleReport& r) {
  j = json{{"applicable", r.applicable},
           {"base_loss", r.base_loss},
           {"clf_loss", r.clf_loss},
           {"kl", r.kl},
           {"tau", r.tau},
           {"lower", r.lower},
           {"upper", r.upper},
           {"observed", r.observed ? json(*r.observed) : json(nullptr)},
           {"holds", r.holds ? json(*r.holds) : json(nullptr)}};
}

void to_json(json& j, const BinaryCode& c) {
  j = json{{"length", c.length},
           {"min_distance", c.min_distance},
           {"weight", c.weight ? json(*c.weight) : json(nullptr)},
           {"codewords", c.codewords}};
}

void from_json(const json& j, BinaryCode& c) {
  c.length = j.at("length").get<Index>();
  c.min_distance = j.at("min_distance").get<Index>();
  c.weight.reset();
  if (!j.at("weight").is_null()) c.weight = j.at("weight").get<Index>();
  c.codewords = j.at("codewords").get<std::vector<Codeword>>();
}

void to_json(json& j, const PackingFamily& f) {
  j = json{{"regime", str(to_string(f.regime))},
           {"n", f.n},
           {"d", f.d},
           {"s", f.s},
           {"lambda", f.lambda},
           {"sigma", f.sigma},
           {"epsilon", f.epsilon},
           {"lambda0", f.lambda0},
           {"gamma", f.gamma},
           {"min_distance", f.code.min_distance},
           {"codewords", f.code.codewords},
           {"thetas", f.thetas}};
}

void from_json(const json& j, PackingFamily& f) {
  try {
    f.regime = regime_from_string(j.at("regime").get<std::string>());
    f.n = j.at("n").get<std::int64_t>();
    f.d = j.at("d").get<Index>();
    f.s = j.at("s").get<Index>();
    f.lambda = j.at("lambda").get<double>();
    f.sigma = j.at("sigma").get<double>();
    f.epsilon = j.at("epsilon").get<double>();
    f.lambda0 = j.at("lambda0").get<double>();
    f.gamma = j.at("gamma").get<double>();
    f.code = BinaryCode{};
    f.code.length = f.d - 1;
    f.code.codewords = j.at("codewords").get<std::vector<Codeword>>();
    if (j.contains("min_distance")) f.code.min_distance = j.at("min_distance").get<Index>();
    if (f.regime == Regime::sparse) f.code.weight = f.s;
    f.thetas.clear();
    for (const auto& t : j.at("thetas")) f.thetas.push_back(t.get<Mixture>());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ConfigError, std::string("malformed packing family: ") + e.what());
  }
  require(f.thetas.size() == f.code.codewords.size(), Errc::ShapeError, "one theta per codeword expected");
}

void to_json(json& j, const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"axis_value", row.axis_value},
                        {"replicate", row.replicate},
                        {"seed", row.seed},
                        {"n", row.n},
                        {"d", row.d},
                        {"s", row.s},
                        {"lambda", row.lambda},
                        {"sigma", row.sigma},
                        {"loss", row.loss},
                        {"degenerate", row.degenerate},
                        {"runtime_ms", row.runtime_ms}});
  json summary = json::array();
  for (const auto& s : r.summary)
    summary.push_back(json{{"axis_value", s.axis_value},
                           {"replicates", s.replicates},
                           {"mean_loss", s.mean_loss},
                           {"std_err", s.std_err}});
  json fit = nullptr;
  if (r.fitted_slope)
    fit = json{{"slope", r.fitted_slope->slope},
               {"intercept", r.fitted_slope->intercept},
               {"ci95", json::array({number(r.fitted_slope->ci_low), number(r.fitted_slope->ci_high)})},
               {"points", r.fitted_slope->points}};
  j = json{{"axis", r.axis},
           {"estimator", str(to_string(r.estimator))},
           {"loss_method", str(to_string(r.loss_method))},
           {"mc_samples", r.mc_samples},
           {"rows", rows},
           {"summary", summary},
           {"fitted_slope", fit},
           {"warnings", r.warnings}};
}

void from_json(const json& j, SweepResult& r) {
  const double inf = std::numeric_limits<double>::infinity();
  try {
    r.axis = j.at("axis").get<std::string>();
    r.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    r.loss_method = loss_method_from_string(j.at("loss_method").get<std::string>());
    r.mc_samples = j.at("mc_samples").get<std::int64_t>();
    r.rows.clear();
    for (const auto& row : j.at("rows"))
      r.rows.push_back(SweepRow{row.at("axis_value").get<double>(), row.at("replicate").get<std::int64_t>(),
                                row.at("seed").get<std::uint64_t>(), row.at("n").get<std::int64_t>(),
                                row.at("d").get<std::int64_t>(), row.at("s").get<std::int64_t>(),
                                row.at("lambda").get<double>(), row.at("sigma").get<double>(),
                                row.at("loss").get<double>(), row.at("degenerate").get<bool>(),
                                row.at("runtime_ms").get<double>()});
    r.summary.clear();
    for (const auto& s : j.at("summary"))
      r.summary.push_back(SweepSummary{s.at("axis_value").get<double>(), s.at("replicates").get<std::int64_t>(),
                                       s.at("mean_loss").get<double>(), s.at("std_err").get<double>()});
    r.fitted_slope.reset();
    if (const auto& fit = j.at("fitted_slope"); !fit.is_null()) {
      const auto& ci = fit.at("ci95");
      r.fitted_slope = RateFit{fit.at("slope").get<double>(), fit.at("intercept").get<double>(),
                               number_or(ci.at(0), -inf), number_or(ci.at(1), inf),
                               fit.at("points").get<std::int64_t>()};
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ConfigError, std::string("malformed sweep result: ") + e.what());
  }
}

void write_dataset_csv(const Dataset<double>& data, std::ostream& out) {
  const Index d = data.dim();
  for (Index k = 0; k < d; ++k) out << (k ? "," : "") << 'x' << k;
  if (data.labels) out << ",label";
  out << '\n';
  char buf[32];
  for (Index i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", data.points(i, k));
      out << (k ? "," : "") << buf;
    }
    if (data.labels) out << ',' << (*data.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) fail(Errc::IoError, "dataset write failed");
}

json dataset_header(const Dataset<double>& data) {
  return json{{"n", data.size()},
              {"d", data.dim()},
              {"seed", data.seed},
              {"has_labels", data.labels.has_value()},
              {"theta", data.theta ? json(*data.theta) : json(nullptr)}};
}

Dataset<double> read_dataset_csv(std::istream& in, const json* header) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::EmptySample, "dataset CSV has no header");
  std::vector<std::string> columns;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(col);
  }
  const bool labeled = !columns.empty() && columns.back() == "label";
  const auto d = static_cast<Index>(columns.size()) - (labeled ? 1 : 0);
  require(d >= 1, Errc::ShapeError, "dataset CSV has no coordinate columns");

  std::vector<double> values;
  std::vector<int> labels;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Index k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k < d)
        values.push_back(std::stod(cell));
      else
        labels.push_back(std::stoi(cell));
      ++k;
    }
    require(k == static_cast<Index>(columns.size()), Errc::ShapeError,
            "row " + std::to_string(rows + 1) + " has " + std::to_string(k) + " fields");
    ++rows;
  }
  Dataset<double> data;
  data.points = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, d);
  if (labeled) data.labels = std::move(labels);
  if (header) {
    data.seed = header->at("seed").get<std::uint64_t>();
    if (!header->at("theta").is_null()) data.theta = header->at("theta").get<Mixture>();
  }
  data.validate();
  return data;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  require(out.good(), Errc::IoError, "write to '" + path + "' failed");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::ConfigError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace mixbench
