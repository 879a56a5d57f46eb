#include "episignal/config.hpp"
#include "episignal/epi.hpp"
#include "episignal/equilibria.hpp"
#include "episignal/output.hpp"
#include "episignal/policy.hpp"
#include "episignal/signaling.hpp"
#include "episignal/simulation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace episignal;

namespace {

py::dict summary_to_dict(const ScenarioConfig& config, const SummaryStats& stats)
{
    py::dict out;
    out["equilibrium"] = to_string(config.equilibrium);
    out["policy"] = to_string(config.policy);
    out["runs_total"] = stats.total_runs;
    out["runs_invalid"] = stats.invalid_runs;
    out["runs_controlled"] = stats.controlled_runs;
    out["censored_mean_week_control"] = stats.censored_mean_week_control;
    if (stats.mean_week_control) {
        out["mean_week_control"] = *stats.mean_week_control;
    } else {
        out["mean_week_control"] = py::none();
    }
    out["mean_disease_control_score"] = stats.mean_disease_control_score;
    out["mean_peak_hospitalization_fraction"] = stats.mean_peak_hospitalization;
    out["mean_final_deception_rate"] = stats.mean_final_deception;
    py::list rc;
    py::list deception;
    py::list hosp;
    for (const WeeklyMetrics& m : stats.mean) {
        rc.append(m.rc);
        deception.append(m.deception_overall);
        hosp.append(m.hosp_frac);
    }
    out["mean_rc_by_week"] = rc;
    out["mean_deception_by_week"] = deception;
    out["mean_hosp_frac_by_week"] = hosp;
    return out;
}

}  // namespace

PYBIND11_MODULE(_episignal, m)
{
    m.doc() = "SVEAIR epidemic dynamics coupled with a population-PHA signaling game";

    py::class_<EpiParams>(m, "EpiParams")
        .def(py::init<>())
        .def_readwrite("birth_rate", &EpiParams::birth_rate)
        .def_readwrite("natural_death_rate", &EpiParams::natural_death_rate)
        .def_readwrite("base_transmission", &EpiParams::base_transmission)
        .def_readwrite("asymptomatic_infectiousness", &EpiParams::asymptomatic_infectiousness)
        .def_readwrite("symptomatic_fraction", &EpiParams::symptomatic_fraction)
        .def_readwrite("latency_rate", &EpiParams::latency_rate)
        .def_readwrite("recovery_rate", &EpiParams::recovery_rate)
        .def_readwrite("vaccine_efficacy", &EpiParams::vaccine_efficacy)
        .def_readwrite("hospitalization_ratio", &EpiParams::hospitalization_ratio);

    py::class_<CompartmentState>(m, "CompartmentState")
        .def(py::init<>())
        .def_readwrite("susceptible", &CompartmentState::susceptible)
        .def_readwrite("vaccinated", &CompartmentState::vaccinated)
        .def_readwrite("exposed", &CompartmentState::exposed)
        .def_readwrite("asymptomatic", &CompartmentState::asymptomatic)
        .def_readwrite("infected", &CompartmentState::infected)
        .def_readwrite("recovered", &CompartmentState::recovered)
        .def("total", &CompartmentState::total);

    py::class_<BehaviorRates>(m, "BehaviorRates")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("vaccination_rate"), py::arg("masking_rate"))
        .def_readwrite("vaccination_rate", &BehaviorRates::vaccination_rate)
        .def_readwrite("masking_rate", &BehaviorRates::masking_rate);

    m.def("force_of_infection", &force_of_infection, py::arg("params"), py::arg("state"));
    m.def("r0", &r0, py::arg("params"));
    m.def("r_control", &r_control, py::arg("params"), py::arg("behavior"));
    m.def(
        "herd_immunity_threshold",
        [](const EpiParams& params, double masking_rate) {
            const HerdImmunityThreshold t = herd_immunity_threshold(params, masking_rate);
            return py::make_tuple(t.psi_hi, t.valid);
        },
        py::arg("params"), py::arg("masking_rate"),
        "Returns (psi_hi, valid); outside 1 < R0 < 1/(1-delta) the value is not a usable target");
    m.def(
        "integrate_week",
        [](const EpiParams& params, const BehaviorRates& behavior, const CompartmentState& state,
           int substeps) {
            const IntegrationResult result = integrate_week(params, behavior, state, substeps);
            return py::make_tuple(result.state, result.clamp_events);
        },
        py::arg("params"), py::arg("behavior"), py::arg("state"), py::arg("substeps_per_day") = 10);
    m.def("hospitalization", &hospitalization, py::arg("params"), py::arg("state"));

    py::enum_<EquilibriumKind>(m, "EquilibriumKind")
        .value("SEPARATING", EquilibriumKind::kSeparating)
        .value("PARTIAL_POOLING", EquilibriumKind::kPartialPooling)
        .value("POOLING", EquilibriumKind::kPooling);

    m.def(
        "build_strategy",
        [](EquilibriumKind kind, double alpha) {
            const SenderStrategy s = build_strategy(kind, alpha);
            std::vector<std::vector<double>> rows;
            for (int c = 0; c < kNumStatuses; ++c) {
                rows.emplace_back(s.probabilities[c].begin(), s.probabilities[c].end());
            }
            return rows;
        },
        py::arg("kind"), py::arg("mixing_alpha") = 0.0);
    m.def(
        "bayes_posterior",
        [](const std::vector<std::vector<double>>& strategy, const std::vector<double>& prior) {
            SenderStrategy s;
            for (int c = 0; c < kNumStatuses; ++c) {
                for (int msg = 0; msg < kNumMessages; ++msg) {
                    s.probabilities[c][msg] = strategy.at(c).at(msg);
                }
            }
            StatusDistribution pi{prior.at(0), prior.at(1), prior.at(2), prior.at(3)};
            const ReceiverBelief belief = bayes_posterior(s, pi);
            std::vector<std::vector<double>> posterior;
            for (int msg = 0; msg < kNumMessages; ++msg) {
                posterior.emplace_back(belief.posterior[msg].begin(), belief.posterior[msg].end());
            }
            return py::make_tuple(posterior,
                                  std::vector<double>(belief.message_marginal.begin(),
                                                      belief.message_marginal.end()));
        },
        py::arg("strategy"), py::arg("prior"), "Returns (posterior rows per message, marginals)");
    m.def(
        "estimated_rates",
        [](const std::vector<double>& prior, double alpha) {
            StatusDistribution pi{prior.at(0), prior.at(1), prior.at(2), prior.at(3)};
            const EstimatedRates rates = estimated_rates(pi, alpha);
            return py::make_tuple(rates.psi_hat, rates.eta_hat);
        },
        py::arg("prior"), py::arg("mixing_alpha"));
    m.def(
        "pooled_message_posterior",
        [](const std::vector<double>& prior, double alpha) {
            StatusDistribution pi{prior.at(0), prior.at(1), prior.at(2), prior.at(3)};
            const StatusDistribution posterior = pooled_message_posterior(pi, alpha);
            return std::vector<double>(posterior.begin(), posterior.end());
        },
        py::arg("prior"), py::arg("mixing_alpha"));

    m.def(
        "existence_window",
        [](const EpiParams& params, const BehaviorRates& baseline, double lambda1, double i_m,
           double economic_factor, const std::vector<double>& prior) {
            GameParams game;
            game.semantic_weight = lambda1;
            game.mask_lie_incentive = i_m;
            game.economic_factor = economic_factor;
            StatusDistribution pi{prior.at(0), prior.at(1), prior.at(2), prior.at(3)};
            const ExistenceWindow w = existence_window(params, baseline, game, pi);
            py::dict out;
            out["lower_bound"] = w.lower_bound;
            out["upper_bound"] = w.upper_bound;
            out["beta_sens"] = w.beta_sens;
            out["rc_at_alpha0"] = w.rc_at_zero;
            out["rc_at_alpha1"] = w.rc_at_one;
            out["verdict"] = to_string(w.verdict);
            return out;
        },
        py::arg("params"), py::arg("baseline"), py::arg("lambda1"), py::arg("mask_incentive"),
        py::arg("economic_factor"), py::arg("prior"));
    m.def(
        "solve_alpha_fixed_point",
        [](const EpiParams& params, const BehaviorRates& baseline, double lambda1, double i_m,
           double economic_factor, const std::vector<double>& prior, double tolerance) {
            GameParams game;
            game.semantic_weight = lambda1;
            game.mask_lie_incentive = i_m;
            game.economic_factor = economic_factor;
            StatusDistribution pi{prior.at(0), prior.at(1), prior.at(2), prior.at(3)};
            const FixedPointResult result =
                solve_alpha_fixed_point(params, baseline, game, pi, tolerance);
            return py::make_tuple(result.mixing_alpha, result.residual);
        },
        py::arg("params"), py::arg("baseline"), py::arg("lambda1"), py::arg("mask_incentive"),
        py::arg("economic_factor"), py::arg("prior"), py::arg("tolerance") = 1e-8);
    m.def(
        "alpha_approximation",
        [](const EpiParams& params, const BehaviorRates& baseline, double lambda1, double i_m,
           double economic_factor, const std::vector<double>& prior) {
            GameParams game;
            game.semantic_weight = lambda1;
            game.mask_lie_incentive = i_m;
            game.economic_factor = economic_factor;
            StatusDistribution pi{prior.at(0), prior.at(1), prior.at(2), prior.at(3)};
            return alpha_approximation(params, baseline, game, pi);
        },
        py::arg("params"), py::arg("baseline"), py::arg("lambda1"), py::arg("mask_incentive"),
        py::arg("economic_factor"), py::arg("prior"));

    m.def("distortion", &distortion, py::arg("observed_hospitalization"),
          py::arg("predicted_hospitalization"));
    m.def(
        "smooth_series",
        [](const std::vector<double>& series, const std::string& kind, int window, int order,
           double factor) {
            SmoothingParams params;
            params.window = window;
            params.poly_order = order;
            params.factor = factor;
            const SmoothingKind k = kind == "exponential" ? SmoothingKind::kExponential
                                                          : SmoothingKind::kSavitzkyGolay;
            return smooth_series(series, k, params);
        },
        py::arg("series"), py::arg("kind") = "savitzky_golay", py::arg("window") = 5,
        py::arg("order") = 2, py::arg("factor") = 0.3);

    m.def(
        "run_scenario",
        [](const std::string& config_text) {
            const ParsedScenario parsed = parse_config(config_text);
            const SummaryStats stats = monte_carlo(parsed.scenario);
            return summary_to_dict(parsed.scenario, stats);
        },
        py::arg("config_text"),
        "Parse a scenario document, run the Monte Carlo study, return the summary");
    m.def(
        "run_scenario_csv",
        [](const std::string& config_text) {
            const ParsedScenario parsed = parse_config(config_text);
            const std::vector<RunResult> runs = run_scenario_runs(parsed.scenario);
            return weekly_csv(runs, summarize_runs(parsed.scenario, runs));
        },
        py::arg("config_text"), "Full per-week CSV for a scenario document");
    m.def(
        "stress_table",
        [](const std::string& config_text) {
            const ParsedScenario parsed = parse_config(config_text);
            const StressReport report = stress_grid(parsed.scenario, parsed.stress);
            py::list cells;
            for (const StressCell& cell : report.cells) {
                py::dict c;
                c["factor"] = cell.factor;
                c["equilibrium"] = to_string(cell.equilibrium);
                c["score_delta"] = cell.score_delta;
                c["peak_ratio"] = cell.peak_ratio;
                cells.append(c);
            }
            return cells;
        },
        py::arg("config_text"));
}
