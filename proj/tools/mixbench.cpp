#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixbench/bounds.hpp"
#include "mixbench/config.hpp"
#include "mixbench/experiment.hpp"
#include "mixbench/packing.hpp"
#include "mixbench/report.hpp"
#include "mixbench/serialize.hpp"
#include "mixbench/verify.hpp"

using namespace mixbench;
using nlohmann::json;

namespace {

void print_warnings(const SweepResult& result) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
}

void write_or_print(const json& j, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(j, out);
}

// Six geometric steps from the config's own value: x2 for integer axes,
// x sqrt(2) for lambda.
std::vector<double> default_axis_values(const ExperimentConfig& c, SweepAxis axis) {
  std::vector<double> values;
  for (int k = 0; k < 6; ++k) {
    switch (axis) {
      case SweepAxis::n: values.push_back(static_cast<double>(c.n << k)); break;
      case SweepAxis::d: values.push_back(static_cast<double>(c.d << k)); break;
      case SweepAxis::s: values.push_back(static_cast<double>(c.s << k)); break;
      case SweepAxis::lambda: values.push_back(c.lambda * std::pow(std::sqrt(2.0), k)); break;
    }
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-component Gaussian mixture clustering: simulation, bounds and verification"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (MIXBENCH_THREADS overrides)")->check(CLI::PositiveNumber);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a configured experiment and write a CSV or JSON report");
  std::string config_path, out_path;
  bool record_timing = false;
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out_path, "Report path ending in .csv or .json")->required();
  simulate->add_flag("--record-timing", record_timing, "Fill runtime_ms with wall-clock times");

  // rates
  auto* rates = app.add_subcommand("rates", "Sweep one axis and fit the log-log loss slope");
  std::string axis_name, rates_out;
  std::vector<double> axis_values;
  rates->add_option("--axis", axis_name, "n, d, lambda or s")->required()->check(CLI::IsMember({"n", "d", "lambda", "s"}));
  rates->add_option("--config", config_path, "Experiment config (JSON)")->required();
  rates->add_option("--values", axis_values, "Axis values (default: the config sweep, else six geometric steps)");
  rates->add_option("--out", rates_out, "Report path ending in .csv or .json (default: JSON on stdout)");

  // packing
  auto* packing = app.add_subcommand("packing", "Build a lower-bound hypothesis family");
  std::string regime_name, packing_out;
  std::int64_t pn = 0, pd = 0, ps = 0;
  double plambda = 0.0, psigma = 1.0;
  std::uint64_t pseed = 0;
  packing->add_option("--regime", regime_name, "dense or sparse")->required()->check(CLI::IsMember({"dense", "sparse"}));
  packing->add_option("--n", pn, "Sample size")->required();
  packing->add_option("--d", pd, "Dimension")->required();
  packing->add_option("--s", ps, "Perturbed coordinates (sparse regime)");
  packing->add_option("--lambda", plambda, "Separation")->required();
  packing->add_option("--sigma", psigma, "Noise level");
  packing->add_option("--seed", pseed, "Seed of the sparse code");
  packing->add_option("--out", packing_out, "Output JSON (default: stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification suite; exit 0 iff every check holds");
  std::string suite_name, family_path, verify_out;
  std::uint64_t vseed = 0;
  verify->add_option("--suite", suite_name, "loss-sandwich, kl, concentration, fano, triangle, davis-kahan, support-recovery or all")
      ->required();
  verify->add_option("--family", family_path, "Packing family JSON for the fano and triangle suites");
  verify->add_option("--seed", vseed, "Master seed");
  verify->add_option("--out", verify_out, "Output JSON (default: stdout)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate a theorem or concentration bound");
  std::string kind_name;
  std::int64_t bn = 0, bd = 0, bs = 1;
  double blambda = 1.0, bsigma = 1.0, beps = 0.0, bdelta = 0.0, bmean = 0.0;
  bounds->add_option("--kind", kind_name, "thm1_upper, thm1_upper_largesep, thm2_lower, thm3_upper, thm4_lower, or a concentration kind")
      ->required();
  bounds->add_option("--n", bn, "Sample size");
  bounds->add_option("--d", bd, "Dimension");
  bounds->add_option("--s", bs, "Sparsity");
  bounds->add_option("--lambda", blambda, "Separation");
  bounds->add_option("--sigma", bsigma, "Noise level");
  bounds->add_option("--epsilon", beps, "Deviation (concentration kinds)");
  bounds->add_option("--delta", bdelta, "Failure probability (concentration kinds)");
  bounds->add_option("--mean-norm", bmean, "|mu| or |mu(i)| (concentration kinds)");

  CLI11_PARSE(app, argc, argv);
  const int workers = resolve_threads(threads);

  try {
    if (*simulate) {
      const auto config = load_config(config_path);
      const auto result = run_experiment(config, {workers, record_timing});
      print_warnings(result);
      emit_report(result, report_format_for(out_path), out_path);
      return 0;
    }

    if (*rates) {
      auto config = load_config(config_path);
      const SweepAxis axis = axis_from_string(axis_name);
      Sweep sweep{axis, axis_values};
      if (sweep.values.empty())
        sweep.values = config.sweep && config.sweep->axis == axis ? config.sweep->values : default_axis_values(config, axis);
      config.sweep = sweep;
      config.validate();
      const auto result = run_experiment(config, {workers, false});
      print_warnings(result);
      if (result.fitted_slope)
        std::cerr << "slope " << result.fitted_slope->slope << " ci95 [" << result.fitted_slope->ci_low << ", "
                  << result.fitted_slope->ci_high << "]\n";
      if (rates_out.empty())
        write_json(result, std::cout);
      else
        emit_report(result, report_format_for(rates_out), rates_out);
      return 0;
    }

    if (*packing) {
      const auto family =
          lower_bound_family(regime_from_string(regime_name), pn, static_cast<Index>(pd), static_cast<Index>(ps), plambda, psigma, pseed);
      write_or_print(json(family), packing_out);
      return 0;
    }

    if (*verify) {
      SuiteOptions options;
      options.seed = vseed;
      if (!family_path.empty()) options.family = read_json_file(family_path).get<PackingFamily>();
      std::vector<Suite> suites = suite_name == "all" ? all_suites() : std::vector<Suite>{suite_from_string(suite_name)};
      json out = json::object();
      bool ok = true;
      for (auto suite : suites) {
        const auto result = run_suite(suite, options);
        out[std::string(to_string(suite))] = result.checks;
        std::cerr << to_string(suite) << ": " << result.checks.size() - static_cast<std::size_t>(result.failures())
                  << "/" << result.checks.size() << " checks hold\n";
        ok = ok && result.all_hold();
      }
      write_or_print(suites.size() == 1 ? out.begin().value() : out, verify_out);
      return ok ? 0 : 1;
    }

    if (*bounds) {
      BoundReport report;
      report.kind = kind_name;
      if (kind_name.rfind("thm", 0) == 0) {
        report.params = {{"n", static_cast<double>(bn)}, {"d", static_cast<double>(bd)}, {"s", static_cast<double>(bs)},
                         {"lambda", blambda},            {"sigma", bsigma}};
        const auto kind = theorem_kind_from_string(kind_name);
        report.direction = kind == TheoremKind::thm2_lower || kind == TheoremKind::thm4_lower ? BoundDirection::lower
                                                                                               : BoundDirection::upper;
        report.bound_value = theorem_bound(kind, bn, bd, bs, blambda, bsigma);
      } else {
        const ConcentrationParams p{static_cast<double>(bd), static_cast<double>(bn), beps, bdelta, bsigma, bmean};
        report.params = {{"d", p.d}, {"n", p.n}, {"epsilon", p.epsilon}, {"delta", p.delta}, {"sigma", p.sigma},
                         {"mean_norm", p.mean_norm}};
        report.bound_value = concentration_bound(concentration_kind_from_string(kind_name), p);
      }
      report.vacuous = report.kind.rfind("thm", 0) == 0 && is_vacuous(report.bound_value);
      std::cout << json(report).dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
