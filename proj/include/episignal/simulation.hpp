#pragma once

#include "episignal/epi.hpp"
#include "episignal/equilibria.hpp"
#include "episignal/policy.hpp"
#include "episignal/signaling.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace episignal {

enum class PolicyKind {
    kAdaptive,
    kRandom,
    kNoInteraction,
};

std::string to_string(PolicyKind kind);

/// Everything a single scenario needs. Field defaults are the study's
/// baseline values; the config layer fills the rest.
struct ScenarioConfig {
    EpiParams epi;
    GameParams game;
    BehaviorRates baseline;  // psi_init, eta_init
    EquilibriumKind equilibrium = EquilibriumKind::kSeparating;
    PolicyKind policy = PolicyKind::kAdaptive;

    double population = 10000.0;  // K
    double initial_infected = 150.0;  // I0
    int horizon_weeks = 26;  // T
    int num_runs = 50;  // n
    std::uint64_t seed_base = 20260808;

    double nonresponsive_share = 0.3;  // P(K_s)
    double vaccine_lie_band_min = 0.05;
    double vaccine_lie_band_max = 0.15;
    double mask_lie_band_min = 0.40;
    double mask_lie_band_max = 0.80;

    // PHA loop constants
    double distortion_threshold = 1.0;  // D*
    double step_size = 0.40;
    double vaccination_cap = 0.2 / 7.0;  // psi_max, the weekly 0.2 cap in daily units
    double masking_cap = 0.9;  // eta_max
    double noise_scale = 0.0;  // random policy; 0 = calibrate from adaptive run
    double target_decay = 1.0;  // predicted-H target: (1-decay) of the current observation
    double correction_cap = 0.6;

    // population response to recommendations
    double uptake_rate = 0.8;
    double uptake_info_floor = 0.68;
    double uptake_seed = 0.03;
    double prior_adaptation = 0.0;  // optional weekly drift of the receiver prior
    double credibility_shrink = 1.5;  // estimate shrinkage exponent
    double step_credibility_floor = 0.40;  // PHA caution on untrusted channels

    // PHA prior over compliance fractions (defaults to baseline rates)
    double prior_vaccinated = -1.0;
    double prior_masking = -1.0;

    int substeps_per_day = 10;
    double process_noise_sigma = 0.0;  // weekly lognormal jitter of beta0
    bool sampled_reports = false;  // false: expectation-based reporting

    int savgol_window = 5;
    int savgol_order = 2;
    double exp_smoothing_factor = 0.3;

    void validate() const;
    double prior_vaccinated_or_default() const
    {
        return prior_vaccinated >= 0.0 ? prior_vaccinated : baseline.vaccination_rate;
    }
    double prior_masking_or_default() const
    {
        return prior_masking >= 0.0 ? prior_masking : baseline.masking_rate;
    }
};

struct WeeklyMetrics {
    int week = 0;  // 1-based
    double rc = 0.0;
    double s_frac = 0.0, v_frac = 0.0, e_frac = 0.0, a_frac = 0.0, i_frac = 0.0, r_frac = 0.0;
    double hosp_frac = 0.0;
    double psi_recommended = 0.0, eta_recommended = 0.0;
    double psi_realized = 0.0;
    double vaccination_coverage = 0.0;  // V/K
    double mask_coverage = 0.0;  // realized masking fraction
    double deception_overall = 0.0, deception_vaccination = 0.0, deception_masking = 0.0;
    double deception_responder = 0.0;
    double sender_utility = 0.0;
    double receiver_utility = 0.0;
    double distortion_value = 0.0;
    double info_bits = 0.0;
    // flattened row-major matrices, message order 00,01,10,11: the realized
    // sender strategy g(m|c) and the channel posterior p(c|m)
    std::array<double, 16> strategy_flat{};
    std::array<double, 16> belief_flat{};
};

/// Metric columns in CSV order; keep in sync with metric_value().
const std::vector<std::string>& metric_names();
double metric_value(const WeeklyMetrics& metrics, std::size_t index);

struct RunResult {
    std::vector<WeeklyMetrics> weeks;
    std::optional<int> week_control;  // first week of smoothed Rc < 1
    std::optional<double> disease_control_score;  // 1 - week_control / 26
    double peak_hospitalization_fraction = 0.0;
    double final_deception_rate = 0.0;
    double mean_step_magnitude = 0.0;  // adaptive correction steps (cap units)
    double step_std = 0.0;  // std of signed weekly correction steps, for noise calibration
    bool valid = true;
    std::string error;
};

struct SummaryStats {
    std::vector<WeeklyMetrics> mean;
    std::vector<WeeklyMetrics> stddev;
    std::vector<std::optional<int>> week_control_by_run;
    int controlled_runs = 0;
    int invalid_runs = 0;
    int total_runs = 0;
    /// Mean control week with uncontrolled runs censored at horizon + 1.
    double censored_mean_week_control = 0.0;
    /// Mean over controlled runs only; absent when none controlled.
    std::optional<double> mean_week_control;
    double mean_disease_control_score = 0.0;  // uncontrolled runs score 0
    double mean_peak_hospitalization = 0.0;
    double mean_final_deception = 0.0;
    double mean_step_magnitude = 0.0;
};

/// Aggregated outcome of one reporting round.
struct ReportAggregate {
    std::array<double, kNumMessages> message_share{};  // responders, sums to 1
    double responder_count = 0.0;
    double silent_count = 0.0;
    double claimed_vaccination = 0.0;  // psi_hat: claim fraction among responders
    double claimed_masking = 0.0;  // eta_hat
    DeceptionLevel deception;
    StatusDistribution population_type_mass{};  // persons per type
};

/// Samples (or computes in expectation) one week of reports: statuses from
/// compartment-implied compliance, the equilibrium strategy applied to
/// responders, recovered individuals forced truthful, a P(K_s) share silent.
ReportAggregate population_report(const BehaviorProfile& profile, const SenderStrategy& strategy,
                                  const CompartmentState& state, double recovered_share,
                                  std::mt19937_64* rng);

/// One crack of the weekly interactive loop for the full horizon.
RunResult weekly_loop(const ScenarioConfig& config, std::uint64_t seed);

/// All n runs, parallel over workers (EPI_SIGNAL_THREADS caps the pool),
/// ordered by run index. Seeds are seed_base + run_index.
std::vector<RunResult> run_scenario_runs(const ScenarioConfig& config);

/// Per-week mean and standard deviation plus run-level aggregates; invalid
/// runs are excluded and counted. Deterministic reduction in seed order.
SummaryStats summarize_runs(const ScenarioConfig& config, const std::vector<RunResult>& runs);

/// run_scenario_runs + summarize_runs.
SummaryStats monte_carlo(const ScenarioConfig& config);

enum class SmoothingKind {
    kSavitzkyGolay,
    kExponential,
};

struct SmoothingParams {
    int window = 5;  // odd, Savitzky-Golay
    int poly_order = 2;
    double factor = 0.3;  // exponential
};

std::vector<double> smooth_series(const std::vector<double>& series, SmoothingKind kind,
                                  const SmoothingParams& params);

struct StressFactors {
    double ihr_factor = 2.0;  // xi multiplier
    double incentive_factor = 2.0;  // I_v, I_m multiplier
    double nonresponsive_share = 0.5;  // replaces P(K_s)
    double vaccine_efficacy = 0.70;  // replaces delta
};

struct StressCell {
    std::string factor;
    EquilibriumKind equilibrium = EquilibriumKind::kSeparating;
    double score_delta = 0.0;  // perturbed - baseline, uncontrolled scored 0
    double peak_ratio = 0.0;  // perturbed peak / baseline peak
    double baseline_peak = 0.0;
    double perturbed_peak = 0.0;
};

struct StressReport {
    std::vector<StressCell> cells;
};

/// Table-style stress grid: every factor crossed with every equilibrium,
/// each compared against that equilibrium's unperturbed baseline.
StressReport stress_grid(const ScenarioConfig& base, const StressFactors& factors);

/// Resolved noise scale for random-policy scenarios: configured value, or
/// the mean adaptive gradient-step magnitude from a deterministic pre-run.
double calibrate_noise_scale(const ScenarioConfig& config);

}  // namespace episignal
