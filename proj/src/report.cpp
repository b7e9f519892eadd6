#include "mixbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "mixbench/serialize.hpp"

namespace mixbench {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ReportFormat report_format_for(const std::string& path) {
  if (ends_with(path, ".csv")) return ReportFormat::csv;
  if (ends_with(path, ".json")) return ReportFormat::json;
  fail(Errc::ConfigError, "out: extension must be .csv or .json, got '" + path + "'");
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << "axis,axis_value,replicate,seed,n,d,s,lambda,sigma,estimator,loss,loss_method,degenerate,runtime_ms\n";
  const std::string estimator(to_string(result.estimator));
  const std::string method(to_string(result.loss_method));
  for (const auto& r : result.rows) {
    out << result.axis << ',' << num(r.axis_value) << ',' << r.replicate << ',' << r.seed << ',' << r.n << ','
        << r.d << ',' << r.s << ',' << num(r.lambda) << ',' << num(r.sigma) << ',' << estimator << ','
        << num(r.loss) << ',' << method << ',' << (r.degenerate ? "true" : "false") << ',' << num(r.runtime_ms)
        << '\n';
  }
  out << "# summary\n# axis_value,replicates,mean_loss,std_err\n";
  for (const auto& s : result.summary)
    out << "# " << num(s.axis_value) << ',' << s.replicates << ',' << num(s.mean_loss) << ',' << num(s.std_err)
        << '\n';
  if (result.fitted_slope) {
    const auto& f = *result.fitted_slope;
    out << "# fitted_slope,intercept,ci95_low,ci95_high,points\n# " << num(f.slope) << ',' << num(f.intercept) << ','
        << num(f.ci_low) << ',' << num(f.ci_high) << ',' << f.points << '\n';
  }
  for (const auto& w : result.warnings) out << "# warning: " << w << '\n';
}

void write_json(const SweepResult& result, std::ostream& out) { out << nlohmann::json(result).dump(2) << '\n'; }

void emit_report(const SweepResult& result, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open '" + path + "' for writing");
  if (format == ReportFormat::csv)
    write_csv(result, out);
  else
    write_json(result, out);
  out.flush();
  require(out.good(), Errc::IoError, "write to '" + path + "' failed");
}

SweepResult read_report_json(const std::string& path) { return read_json_file(path).get<SweepResult>(); }

}  // namespace mixbench
