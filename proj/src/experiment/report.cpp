#include "itrc/experiment/report.hpp"

#include "itrc/io/codec.hpp"

#include <cstdio>
#include <stdexcept>

namespace itrc::exp {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv(const std::vector<AggregateRow>& rows) {
  std::string out = "model,type,trials";
  for (const char* m : kMetricNames) out += std::string(",") + m;
  for (const char* m : kMetricNames) out += std::string(",var_") + m;
  out += '\n';
  for (const auto& r : rows) {
    out += r.model + "," + (r.baseline ? "baseline" : "proposed") + "," + std::to_string(r.trials);
    for (double v : r.mean) out += "," + fmt("%.3f", v);
    for (double v : r.variance) out += "," + fmt("%.3e", v);
    out += '\n';
  }
  return out;
}

std::string markdown_table(const std::vector<AggregateRow>& rows, bool variance) {
  std::string out =
      "| Model | Sim P | Sim R | Sim F1 | Com P | Com R | Com F1 | Macro F1 | Accuracy |\n"
      "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.model;
    for (double v : variance ? r.variance : r.mean) out += " | " + fmt(variance ? "%.3e" : "%.3f", v);
    out += " |\n";
  }
  return out;
}

}  // namespace

ReportFormat parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  throw std::invalid_argument("unknown report format '" + std::string(s) + "' (csv or md)");
}

std::string format_report(const std::vector<AggregateRow>& rows, ReportFormat format) {
  if (rows.empty()) throw std::invalid_argument("report: no results");
  if (format == ReportFormat::Csv) return csv(rows);
  std::size_t trials = rows.front().trials;
  return "Mean over " + std::to_string(trials) + " trial(s), test pairs only.\n\n" + markdown_table(rows, false) +
         "\nSample variance.\n\n" + markdown_table(rows, true);
}

void emit_report(const std::vector<AggregateRow>& rows, ReportFormat format, const std::string& path) {
  io::write_text(path, format_report(rows, format));
}

}  // namespace itrc::exp
