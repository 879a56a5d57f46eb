#pragma once

#include "episignal/simulation.hpp"

#include <string>
#include <vector>

namespace episignal {

/// 17-significant-digit decimal form; round-trip exact for doubles.
std::string format_double(double value);

/// RFC-4180 field quoting (quotes only when needed).
std::string csv_escape(const std::string& field);

/// Atomically writes `content` (temp file + rename). Throws on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

/// Per-week CSV: one row per (run, week), then mean and std rows per week.
std::string weekly_csv(const std::vector<RunResult>& runs, const SummaryStats& stats);

/// JSON scenario summary with stable key order.
std::string summary_json(const std::string& scenario_name, const ScenarioConfig& config,
                         const SummaryStats& stats);

/// Stress report as JSON and as CSV.
std::string stress_json(const StressReport& report);
std::string stress_csv(const StressReport& report);

/// Reshape a weekly CSV (as produced by weekly_csv) into long format rows
/// keyed (scenario, metric, week); only the mean rows are kept.
std::string long_format_from_weekly_csv(const std::string& scenario_name, const std::string& csv);

}  // namespace episignal
