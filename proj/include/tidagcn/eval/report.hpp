#pragma once

// JSON-lines reports: one object per (variant, domain).

#include <iosfwd>
#include <span>
#include <string>

#include "tidagcn/eval/evaluate.hpp"

namespace tidagcn {

// Serialized lines for one report (two lines, domains A then B). Metrics are
// null and "metrics_present" false for a domain with no evaluated sequence.
std::string report_lines(const EvalReport& report);

void write_reports(std::span<const EvalReport> reports, std::ostream& out);
void write_reports_file(std::span<const EvalReport> reports, const std::string& path);

}  // namespace tidagcn
