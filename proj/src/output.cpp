#include "episignal/output.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace episignal {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += "\"";
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const std::string temp = path + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + temp + " for writing");
        }
        out << content;
        if (!out) {
            throw std::runtime_error("write failed for " + temp);
        }
    }
    if (std::rename(temp.c_str(), path.c_str()) != 0) {
        std::remove(temp.c_str());
        throw std::runtime_error("rename failed for " + path);
    }
}

namespace {

void append_metrics_row(std::ostringstream& out, const std::string& run_label,
                        const WeeklyMetrics& metrics)
{
    out << csv_escape(run_label) << "," << metrics.week;
    for (std::size_t i = 0; i < metric_names().size(); ++i) {
        out << "," << format_double(metric_value(metrics, i));
    }
    out << "\r\n";
}

}  // namespace

std::string weekly_csv(const std::vector<RunResult>& runs, const SummaryStats& stats)
{
    std::ostringstream out;
    out << "run,week";
    for (const std::string& name : metric_names()) {
        out << "," << csv_escape(name);
    }
    out << "\r\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (!runs[r].valid) {
            continue;
        }
        for (const WeeklyMetrics& metrics : runs[r].weeks) {
            append_metrics_row(out, std::to_string(r), metrics);
        }
    }
    for (const WeeklyMetrics& metrics : stats.mean) {
        append_metrics_row(out, "mean", metrics);
    }
    for (const WeeklyMetrics& metrics : stats.stddev) {
        append_metrics_row(out, "std", metrics);
    }
    return out.str();
}

std::string summary_json(const std::string& scenario_name, const ScenarioConfig& config,
                         const SummaryStats& stats)
{
    ordered_json j;
    j["scenario"] = scenario_name;
    j["equilibrium"] = to_string(config.equilibrium);
    j["policy"] = to_string(config.policy);
    j["population"] = config.population;
    j["horizon_weeks"] = config.horizon_weeks;
    j["runs_total"] = stats.total_runs;
    j["runs_invalid"] = stats.invalid_runs;
    j["runs_controlled"] = stats.controlled_runs;
    if (stats.mean_week_control) {
        j["mean_week_control"] = *stats.mean_week_control;
    } else {
        j["mean_week_control"] = nullptr;
    }
    j["censored_mean_week_control"] = stats.censored_mean_week_control;
    j["mean_disease_control_score"] = stats.mean_disease_control_score;
    j["mean_peak_hospitalization_fraction"] = stats.mean_peak_hospitalization;
    j["mean_final_deception_rate"] = stats.mean_final_deception;
    ordered_json per_run = ordered_json::array();
    for (const auto& wc : stats.week_control_by_run) {
        if (wc) {
            per_run.push_back(*wc);
        } else {
            per_run.push_back(nullptr);
        }
    }
    j["week_control_by_run"] = per_run;
    return j.dump(2) + "\n";
}

std::string stress_json(const StressReport& report)
{
    ordered_json cells = ordered_json::array();
    for (const StressCell& cell : report.cells) {
        ordered_json c;
        c["factor"] = cell.factor;
        c["equilibrium"] = to_string(cell.equilibrium);
        c["score_delta"] = cell.score_delta;
        c["peak_ratio"] = cell.peak_ratio;
        c["baseline_peak"] = cell.baseline_peak;
        c["perturbed_peak"] = cell.perturbed_peak;
        cells.push_back(c);
    }
    ordered_json j;
    j["stress_cells"] = cells;
    return j.dump(2) + "\n";
}

std::string stress_csv(const StressReport& report)
{
    std::ostringstream out;
    out << "factor,equilibrium,score_delta,peak_ratio,baseline_peak,perturbed_peak\r\n";
    for (const StressCell& cell : report.cells) {
        out << csv_escape(cell.factor) << "," << to_string(cell.equilibrium) << ","
            << format_double(cell.score_delta) << "," << format_double(cell.peak_ratio) << ","
            << format_double(cell.baseline_peak) << "," << format_double(cell.perturbed_peak)
            << "\r\n";
    }
    return out.str();
}

std::string long_format_from_weekly_csv(const std::string& scenario_name, const std::string& csv)
{
    std::istringstream in(csv);
    std::string line;
    std::ostringstream out;
    bool first = true;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) {
            fields.push_back(field);
        }
        if (first) {
            header = fields;
            first = false;
            continue;
        }
        if (fields.size() != header.size() || fields[0] != "mean") {
            continue;
        }
        for (std::size_t i = 2; i < fields.size(); ++i) {
            out << csv_escape(scenario_name) << "," << csv_escape(header[i]) << "," << fields[1]
                << "," << fields[i] << "\r\n";
        }
    }
    return "scenario,metric,week,value\r\n" + out.str();
}

}  // namespace episignal
