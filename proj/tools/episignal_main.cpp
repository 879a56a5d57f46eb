#include "episignal/config.hpp"
#include "episignal/equilibria.hpp"
#include "episignal/output.hpp"
#include "episignal/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using episignal::BehaviorRates;
using episignal::EquilibriumKind;
using episignal::PolicyKind;
using episignal::ScenarioConfig;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string stem_of(const std::string& path)
{
    return fs::path(path).stem().string();
}

struct ScenarioOutput {
    int exit_code = kExitOk;
};

/// Runs one scenario and writes <name>_weekly.csv plus <name>_summary.json.
ScenarioOutput run_scenario(const ScenarioConfig& config, const std::string& name,
                            const std::string& outdir)
{
    const std::vector<episignal::RunResult> runs = episignal::run_scenario_runs(config);
    const episignal::SummaryStats stats = episignal::summarize_runs(config, runs);

    fs::create_directories(outdir);
    episignal::write_file_atomic((fs::path(outdir) / (name + "_weekly.csv")).string(),
                                 episignal::weekly_csv(runs, stats));
    episignal::write_file_atomic((fs::path(outdir) / (name + "_summary.json")).string(),
                                 episignal::summary_json(name, config, stats));

    ScenarioOutput out;
    if (stats.invalid_runs == stats.total_runs) {
        out.exit_code = kExitDiverged;
    }
    return out;
}

int cmd_run(const std::string& config_path, const std::string& outdir)
{
    const episignal::ParsedScenario parsed = episignal::parse_config(read_file(config_path));
    return run_scenario(parsed.scenario, stem_of(config_path), outdir).exit_code;
}

int cmd_grid(const std::string& config_path, const std::string& outdir)
{
    const episignal::ParsedScenario parsed = episignal::parse_config(read_file(config_path));
    const std::string base = stem_of(config_path);

    struct RateLevel {
        std::string name;
        double psi;
        double eta;
    };
    const std::vector<RateLevel> rates = {{"low", 0.005, 0.01}, {"high", 0.05, 0.10}};
    const std::vector<std::pair<std::string, double>> incentives = {{"inc1", 1.0}, {"inc2", 2.0}};
    const std::vector<EquilibriumKind> equilibria = {EquilibriumKind::kSeparating,
                                                     EquilibriumKind::kPartialPooling,
                                                     EquilibriumKind::kPooling};
    const std::vector<PolicyKind> policies = {PolicyKind::kAdaptive, PolicyKind::kRandom};

    int exit_code = kExitOk;
    for (EquilibriumKind eq : equilibria) {
        for (PolicyKind policy : policies) {
            for (const RateLevel& rate : rates) {
                for (const auto& incentive : incentives) {
                    ScenarioConfig cell = parsed.scenario;
                    cell.equilibrium = eq;
                    cell.policy = policy;
                    cell.baseline = BehaviorRates{rate.psi, rate.eta};
                    cell.prior_vaccinated = -1.0;
                    cell.prior_masking = -1.0;
                    cell.game.vaccine_lie_incentive *= incentive.second;
                    cell.game.mask_lie_incentive *= incentive.second;
                    const std::string name = base + "_" + episignal::to_string(eq) + "_" +
                                             episignal::to_string(policy) + "_" + rate.name + "_" +
                                             incentive.first;
                    const ScenarioOutput out = run_scenario(cell, name, outdir);
                    exit_code = std::max(exit_code, out.exit_code);
                }
            }
        }
    }
    return exit_code;
}

int cmd_stress(const std::string& config_path, const std::string& outdir)
{
    const episignal::ParsedScenario parsed = episignal::parse_config(read_file(config_path));
    const episignal::StressReport report =
        episignal::stress_grid(parsed.scenario, parsed.stress);
    fs::create_directories(outdir);
    const std::string base = stem_of(config_path);
    episignal::write_file_atomic((fs::path(outdir) / (base + "_stress.json")).string(),
                                 episignal::stress_json(report));
    episignal::write_file_atomic((fs::path(outdir) / (base + "_stress.csv")).string(),
                                 episignal::stress_csv(report));
    return kExitOk;
}

int cmd_equilibrium(const std::string& config_path, const std::string& out_path)
{
    const episignal::ParsedScenario parsed = episignal::parse_config(read_file(config_path));
    const ScenarioConfig& cfg = parsed.scenario;
    const episignal::StatusDistribution pi = episignal::status_distribution_from_fractions(
        cfg.prior_vaccinated_or_default(), cfg.prior_masking_or_default());

    const episignal::ExistenceWindow window =
        episignal::existence_window(cfg.epi, cfg.baseline, cfg.game, pi);

    ordered_json j;
    j["lambda1"] = cfg.game.semantic_weight;
    j["window_lower"] = window.lower_bound;
    j["window_upper"] = window.upper_bound;
    j["beta_sens"] = window.beta_sens;
    j["rc_at_alpha0"] = window.rc_at_zero;
    j["rc_at_alpha1"] = window.rc_at_one;
    j["verdict"] = episignal::to_string(window.verdict);
    j["separating_unstable_when_im_positive"] = window.separating_unstable_note;
    if (window.verdict == episignal::WindowVerdict::kPartialPooling) {
        try {
            const episignal::FixedPointResult fp =
                episignal::solve_alpha_fixed_point(cfg.epi, cfg.baseline, cfg.game, pi);
            j["alpha_star"] = fp.mixing_alpha;
            j["residual"] = fp.residual;
            j["alpha_approximation"] =
                episignal::alpha_approximation(cfg.epi, cfg.baseline, cfg.game, pi);
        } catch (const std::runtime_error& err) {
            j["alpha_star"] = nullptr;
            j["solver_note"] = err.what();
        }
    }
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        episignal::write_file_atomic(out_path, text);
    }
    return kExitOk;
}

int cmd_plot_data(const std::string& results_dir, const std::string& out_path)
{
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(results_dir)) {
        if (entry.is_regular_file() && entry.path().filename().string().ends_with("_weekly.csv")) {
            inputs.push_back(entry.path());
        }
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        throw std::runtime_error("no *_weekly.csv files under " + results_dir);
    }
    std::string combined = "scenario,metric,week,value\r\n";
    for (const fs::path& path : inputs) {
        std::string scenario = path.stem().string();
        const std::string suffix = "_weekly";
        if (scenario.size() > suffix.size() &&
            scenario.compare(scenario.size() - suffix.size(), suffix.size(), suffix) == 0) {
            scenario.resize(scenario.size() - suffix.size());
        }
        const std::string body =
            episignal::long_format_from_weekly_csv(scenario, read_file(path.string()));
        // drop the per-file header line
        const auto newline = body.find('\n');
        combined += body.substr(newline + 1);
    }
    const std::string target =
        out_path.empty() ? (fs::path(results_dir) / "plot_data.csv").string() : out_path;
    episignal::write_file_atomic(target, combined);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SVEAIR epidemic simulation coupled with a population-PHA signaling game"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir = "results";
    std::string out_path;
    std::string results_dir;

    CLI::App* run = app.add_subcommand("run", "Run a single scenario (CSV + JSON outputs)");
    run->add_option("config", config_path, "scenario config file")->required();
    run->add_option("-o,--outdir", outdir, "output directory");

    CLI::App* grid = app.add_subcommand(
        "grid", "Factorial grid: equilibrium x policy x rate level x incentive level");
    grid->add_option("config", config_path, "scenario config file")->required();
    grid->add_option("-o,--outdir", outdir, "output directory");

    CLI::App* stress = app.add_subcommand("stress", "Stress-test table across equilibria");
    stress->add_option("config", config_path, "scenario config file")->required();
    stress->add_option("-o,--outdir", outdir, "output directory");

    CLI::App* equilibrium =
        app.add_subcommand("equilibrium", "Existence window, verdict, and fixed-point alpha*");
    equilibrium->add_option("config", config_path, "scenario config file")->required();
    equilibrium->add_option("-o,--out", out_path, "write JSON here instead of stdout");

    CLI::App* plot = app.add_subcommand("plot-data", "Reshape results into long-format CSV");
    plot->add_option("results", results_dir, "directory holding *_weekly.csv files")->required();
    plot->add_option("-o,--out", out_path, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, outdir);
        }
        if (grid->parsed()) {
            return cmd_grid(config_path, outdir);
        }
        if (stress->parsed()) {
            return cmd_stress(config_path, outdir);
        }
        if (equilibrium->parsed()) {
            return cmd_equilibrium(config_path, out_path);
        }
        if (plot->parsed()) {
            return cmd_plot_data(results_dir, out_path);
        }
    } catch (const episignal::ConfigError& err) {
        std::cerr << "config error";
        if (err.line() > 0) {
            std::cerr << " (line " << err.line() << ")";
        }
        std::cerr << ": " << err.what() << "\n";
        return kExitConfig;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "I/O error: " << err.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& err) {
        const std::string what = err.what();
        if (what.find("diverged") != std::string::npos) {
            std::cerr << "runtime divergence: " << what << "\n";
            return kExitDiverged;
        }
        std::cerr << "I/O error: " << what << "\n";
        return kExitIo;
    }
    return kExitOk;
}
