#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mixbench/experiment.hpp"

namespace mixbench {

enum class ReportFormat { csv, json };

/// Picks the format from the file extension (.csv or .json).
ReportFormat report_format_for(const std::string& path);

/// CSV: one row per (axis_value, replicate) under the header
///   axis,axis_value,replicate,seed,n,d,s,lambda,sigma,estimator,loss,loss_method,degenerate,runtime_ms
/// followed by '#'-prefixed summary lines. Numbers use %.17g.
void write_csv(const SweepResult& result, std::ostream& out);
void write_json(const SweepResult& result, std::ostream& out);

/// Throws IoError when `path` cannot be written.
void emit_report(const SweepResult& result, ReportFormat format, const std::string& path);

SweepResult read_report_json(const std::string& path);

}  // namespace mixbench
