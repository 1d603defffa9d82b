#pragma once

#include "itrc/experiment/experiment.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace itrc::exp {

enum class ReportFormat { Csv, Markdown };

/// "csv", "md" or "markdown".
ReportFormat parse_format(std::string_view s);

/// Means are rounded to three decimals. CSV carries sample variances as
/// var_<metric> columns in %.3e; markdown follows the means table with a
/// variance table of the same layout.
std::string format_report(const std::vector<AggregateRow>& rows, ReportFormat format);

/// Throws std::runtime_error when the path cannot be written.
void emit_report(const std::vector<AggregateRow>& rows, ReportFormat format, const std::string& path);

}  // namespace itrc::exp
