#include "episignal/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace episignal {

std::string to_string(PolicyKind kind)
{
    switch (kind) {
        case PolicyKind::kAdaptive: return "adaptive";
        case PolicyKind::kRandom: return "random";
        case PolicyKind::kNoInteraction: return "no_interaction";
    }
    return "unknown";
}

void ScenarioConfig::validate() const
{
    epi.validate();
    game.validate();
    baseline.validate();
    if (population < 1.0) throw std::invalid_argument("population must be >= 1");
    if (initial_infected < 0.0 || initial_infected > population) {
        throw std::invalid_argument("initial_infected must be in [0, K]");
    }
    if (horizon_weeks < 1) throw std::invalid_argument("horizon_weeks must be >= 1");
    if (num_runs < 1) throw std::invalid_argument("num_runs must be >= 1");
    if (nonresponsive_share < 0.0 || nonresponsive_share > 1.0) {
        throw std::invalid_argument("nonresponsive_share must be in [0,1]");
    }
    if (vaccine_lie_band_min < 0.0 || vaccine_lie_band_max > 1.0 ||
        vaccine_lie_band_min > vaccine_lie_band_max) {
        throw std::invalid_argument("vaccine lie band malformed");
    }
    if (mask_lie_band_min < 0.0 || mask_lie_band_max > 1.0 ||
        mask_lie_band_min > mask_lie_band_max) {
        throw std::invalid_argument("mask lie band malformed");
    }
    if (distortion_threshold < 0.0) throw std::invalid_argument("distortion_threshold must be >= 0");
    if (step_size <= 0.0) throw std::invalid_argument("step_size must be > 0");
    if (vaccination_cap <= 0.0 || masking_cap <= 0.0 || masking_cap > 1.0) {
        throw std::invalid_argument("caps malformed");
    }
    if (uptake_rate < 0.0 || uptake_rate > 5.0) throw std::invalid_argument("uptake_rate in [0,5]");
    if (uptake_info_floor < 0.0 || uptake_info_floor > 1.0) {
        throw std::invalid_argument("uptake_info_floor in [0,1]");
    }
    if (substeps_per_day < 1) throw std::invalid_argument("substeps_per_day must be >= 1");
    if (process_noise_sigma < 0.0) throw std::invalid_argument("process_noise_sigma must be >= 0");
    if (savgol_window < 1 || savgol_window % 2 == 0 || savgol_order < 0 ||
        savgol_order >= savgol_window) {
        throw std::invalid_argument("Savitzky-Golay window must be odd and > order");
    }
    if (exp_smoothing_factor <= 0.0 || exp_smoothing_factor > 1.0) {
        throw std::invalid_argument("exp_smoothing_factor in (0,1]");
    }
}

namespace {

const std::vector<double WeeklyMetrics::*>& metric_fields()
{
    static const std::vector<double WeeklyMetrics::*> fields = {
        &WeeklyMetrics::rc,
        &WeeklyMetrics::s_frac,
        &WeeklyMetrics::v_frac,
        &WeeklyMetrics::e_frac,
        &WeeklyMetrics::a_frac,
        &WeeklyMetrics::i_frac,
        &WeeklyMetrics::r_frac,
        &WeeklyMetrics::hosp_frac,
        &WeeklyMetrics::psi_recommended,
        &WeeklyMetrics::eta_recommended,
        &WeeklyMetrics::psi_realized,
        &WeeklyMetrics::vaccination_coverage,
        &WeeklyMetrics::mask_coverage,
        &WeeklyMetrics::deception_overall,
        &WeeklyMetrics::deception_vaccination,
        &WeeklyMetrics::deception_masking,
        &WeeklyMetrics::deception_responder,
        &WeeklyMetrics::sender_utility,
        &WeeklyMetrics::receiver_utility,
        &WeeklyMetrics::distortion_value,
        &WeeklyMetrics::info_bits,
    };
    return fields;
}

constexpr double kMaskRelaxRate = 0.5;
constexpr double kSurpriseCap = 50.0;

double clamp(double x, double lo, double hi)
{
    return std::min(std::max(x, lo), hi);
}

StatusDistribution type_distribution_from(double vaccinated_fraction, double masking_fraction)
{
    return status_distribution_from_fractions(vaccinated_fraction, masking_fraction);
}

SenderStrategy population_strategy(EquilibriumKind kind, double vaccine_lie, double mask_lie)
{
    switch (kind) {
        case EquilibriumKind::kSeparating: return per_bit_strategy(0.0, 0.0);
        case EquilibriumKind::kPooling: return per_bit_strategy(1.0, 1.0);
        case EquilibriumKind::kPartialPooling: return per_bit_strategy(vaccine_lie, mask_lie);
    }
    throw std::logic_error("unknown equilibrium kind");
}

SenderStrategy mix_with_identity(const SenderStrategy& strategy, double truthful_share)
{
    SenderStrategy mixed;
    for (int c = 0; c < kNumStatuses; ++c) {
        for (int m = 0; m < kNumMessages; ++m) {
            mixed.probabilities[c][m] = (1.0 - truthful_share) * strategy.probabilities[c][m];
        }
        mixed.probabilities[c][c] += truthful_share;
    }
    return mixed;
}

/// Multinomial draw by sequential conditional binomials; deterministic
/// given the generator state.
std::vector<double> multinomial_counts(std::mt19937_64& rng, double trials,
                                       const std::vector<double>& probabilities)
{
    std::vector<double> counts(probabilities.size(), 0.0);
    double remaining_p = 1.0;
    long long remaining_n = static_cast<long long>(std::llround(trials));
    for (std::size_t i = 0; i + 1 < probabilities.size() && remaining_n > 0; ++i) {
        const double p = remaining_p > 0.0 ? clamp(probabilities[i] / remaining_p, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long long> binom(remaining_n, p);
        const long long draw = binom(rng);
        counts[i] = static_cast<double>(draw);
        remaining_n -= draw;
        remaining_p -= probabilities[i];
    }
    if (!probabilities.empty()) {
        counts.back() += static_cast<double>(remaining_n);
    }
    return counts;
}

}  // namespace

namespace {

const char* const kStatusLabels[4] = {"00", "01", "10", "11"};

}  // namespace

const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> list = {
            "rc", "s_frac", "v_frac", "e_frac", "a_frac", "i_frac", "r_frac", "hosp_frac",
            "psi_recommended", "eta_recommended", "psi_realized", "vaccination_coverage",
            "mask_coverage", "deception_overall", "deception_vaccination", "deception_masking",
            "deception_responder", "sender_utility", "receiver_utility", "distortion",
            "info_bits"};
        for (int c = 0; c < kNumStatuses; ++c) {
            for (int m = 0; m < kNumMessages; ++m) {
                list.push_back(std::string("g_") + kStatusLabels[m] + "_given_" + kStatusLabels[c]);
            }
        }
        for (int m = 0; m < kNumMessages; ++m) {
            for (int c = 0; c < kNumStatuses; ++c) {
                list.push_back(std::string("p_") + kStatusLabels[c] + "_given_" + kStatusLabels[m]);
            }
        }
        return list;
    }();
    return names;
}

double metric_value(const WeeklyMetrics& metrics, std::size_t index)
{
    const std::size_t scalars = metric_fields().size();
    if (index < scalars) {
        return metrics.*(metric_fields()[index]);
    }
    if (index < scalars + 16) {
        return metrics.strategy_flat[index - scalars];
    }
    return metrics.belief_flat[index - scalars - 16];
}

ReportAggregate population_report(const BehaviorProfile& profile, const SenderStrategy& strategy,
                                  const CompartmentState& state, double recovered_share,
                                  std::mt19937_64* rng)
{
    profile.validate();
    if (recovered_share < 0.0 || recovered_share > 1.0) {
        throw std::invalid_argument("population_report: recovered_share must be in [0,1]");
    }
    const double population = state.total();
    const StatusDistribution& pi = profile.type_distribution;
    // recovered individuals respond truthfully; everyone else follows the strategy
    const SenderStrategy effective = mix_with_identity(strategy, recovered_share);

    ReportAggregate report;
    for (int c = 0; c < kNumStatuses; ++c) {
        report.population_type_mass[c] = population * pi[c];
    }

    StatusDistribution responder_mass{};
    std::array<double, kNumMessages> message_mass{};
    if (rng == nullptr) {
        // expectation-based reporting
        report.silent_count = profile.non_responsive_share * population;
        report.responder_count = population - report.silent_count;
        for (int c = 0; c < kNumStatuses; ++c) {
            responder_mass[c] = report.responder_count * pi[c];
            for (int m = 0; m < kNumMessages; ++m) {
                message_mass[m] += responder_mass[c] * effective.probabilities[c][m];
            }
        }
    } else {
        const std::vector<double> type_counts =
            multinomial_counts(*rng, population, {pi[0], pi[1], pi[2], pi[3]});
        for (int c = 0; c < kNumStatuses; ++c) {
            std::binomial_distribution<long long> silent_draw(
                static_cast<long long>(type_counts[c]), profile.non_responsive_share);
            const double silent_c = static_cast<double>(silent_draw(*rng));
            const double responders_c = type_counts[c] - silent_c;
            report.silent_count += silent_c;
            responder_mass[c] = responders_c;
            const std::vector<double> row(effective.probabilities[c].begin(),
                                          effective.probabilities[c].end());
            const std::vector<double> message_counts = multinomial_counts(*rng, responders_c, row);
            for (int m = 0; m < kNumMessages; ++m) {
                message_mass[m] += message_counts[m];
            }
        }
        report.responder_count = population - report.silent_count;
    }

    if (report.responder_count > 0.0) {
        for (int m = 0; m < kNumMessages; ++m) {
            report.message_share[m] = message_mass[m] / report.responder_count;
            const Message msg{m};
            if (msg.vaccine_bit() == 0) report.claimed_vaccination += report.message_share[m];
            if (msg.mask_bit() == 0) report.claimed_masking += report.message_share[m];
        }
    }
    report.deception = deception_level(effective, responder_mass, report.silent_count);
    return report;
}

namespace {

struct PhaState {
    CompartmentState model_state;
    ReceiverBelief channel_belief;  // prior-anchored debiaser, fixed over the run
    StatusDistribution prior{};
    double previous_coverage_estimate = 0.0;
    bool has_previous_coverage = false;
};

double channel_honesty_vaccine(const SenderStrategy& strategy, const StatusDistribution& pi)
{
    return 1.0 - per_bit_lie_rates(strategy, pi).vaccine;
}

double channel_honesty_mask(const SenderStrategy& strategy, const StatusDistribution& pi)
{
    return 1.0 - per_bit_lie_rates(strategy, pi).mask;
}

}  // namespace

RunResult weekly_loop(const ScenarioConfig& config, std::uint64_t seed)
{
    config.validate();
    RunResult result;

    std::mt19937_64 rng(seed);
    std::mt19937_64* report_rng = config.sampled_reports ? &rng : nullptr;

    // per-run deception propensities: band midpoints unless sampling
    double vaccine_lie = 0.5 * (config.vaccine_lie_band_min + config.vaccine_lie_band_max);
    double mask_lie = 0.5 * (config.mask_lie_band_min + config.mask_lie_band_max);
    if (config.sampled_reports) {
        std::uniform_real_distribution<double> v_band(config.vaccine_lie_band_min,
                                                      config.vaccine_lie_band_max);
        std::uniform_real_distribution<double> m_band(config.mask_lie_band_min,
                                                      config.mask_lie_band_max);
        vaccine_lie = v_band(rng);
        mask_lie = m_band(rng);
    }
    const SenderStrategy pop_strategy =
        population_strategy(config.equilibrium, vaccine_lie, mask_lie);
    // the PHA knows the equilibrium structure and the published bands, not
    // the run's sampled propensities
    const SenderStrategy pha_strategy = population_strategy(
        config.equilibrium, 0.5 * (config.vaccine_lie_band_min + config.vaccine_lie_band_max),
        0.5 * (config.mask_lie_band_min + config.mask_lie_band_max));

    BehaviorProfile profile;
    profile.non_responsive_share = config.nonresponsive_share;
    profile.vaccine_deception_propensity = clamp(vaccine_lie, 0.05, 0.15);
    profile.mask_deception_propensity = clamp(mask_lie, 0.40, 0.80);

    CompartmentState state;
    state.susceptible = config.population - config.initial_infected;
    state.infected = config.initial_infected;

    PhaState pha;
    pha.model_state = state;
    pha.prior = type_distribution_from(config.prior_vaccinated_or_default(),
                                       config.prior_masking_or_default());
    pha.channel_belief = bayes_posterior(pha_strategy, pha.prior);

    double psi_realized = config.baseline.vaccination_rate;
    double mask_realized = config.baseline.masking_rate;

    PolicyState policy = no_interaction_policy(config.baseline, config.vaccination_cap,
                                               config.masking_cap);
    policy.step_size = config.step_size;
    policy.base_step_size = config.step_size;
    policy.correction_cap = config.correction_cap;

    double noise_scale = config.noise_scale;
    if (config.policy == PolicyKind::kRandom && noise_scale <= 0.0) {
        noise_scale = calibrate_noise_scale(config);
    }

    EpiParams model_params = config.epi;  // gamma_hat = gamma, known structure

    std::normal_distribution<double> noise(0.0, 1.0);
    double step_magnitude_sum = 0.0;
    double step_sum = 0.0;
    double step_sum_sq = 0.0;
    int step_magnitude_count = 0;
    double claimed_vaccination = config.prior_vaccinated_or_default();
    double claimed_masking = config.prior_masking_or_default();

    try {
        for (int week = 1; week <= config.horizon_weeks; ++week) {
            const double population = state.total();
            const double coverage = state.vaccinated / population;
            const double recovered_share = state.recovered / population;
            const StatusDistribution pi_true = type_distribution_from(coverage, mask_realized);

            WeeklyMetrics metrics;
            metrics.week = week;

            double mask_honesty = 0.0;
            double vaccine_honesty = 0.0;
            if (config.policy == PolicyKind::kNoInteraction) {
                // nobody reports, the PHA stays silent
                metrics.deception_overall = 1.0;
                metrics.deception_vaccination = 1.0;
                metrics.deception_masking = 1.0;
            } else {
                profile.type_distribution = pi_true;
                const ReportAggregate report =
                    population_report(profile, pop_strategy, state, recovered_share, report_rng);
                claimed_vaccination = report.claimed_vaccination;
                claimed_masking = report.claimed_masking;

                // Claims are debiased by inverting the assumed report channel,
                // then shrunk toward the static prior in proportion to the
                // channel's credibility: a channel that lies often carries
                // little usable signal about behavior shifts.
                const PerBitLieRates assumed = per_bit_lie_rates(pha_strategy, pha.prior);
                const double vaccine_weight =
                    std::pow(std::max(0.0, 1.0 - assumed.vaccine), config.credibility_shrink);
                const double mask_weight =
                    std::pow(std::max(0.0, 1.0 - assumed.mask), config.credibility_shrink);
                const double prior_coverage = config.prior_vaccinated_or_default();
                const double prior_masking = config.prior_masking_or_default();
                const double inverted_coverage =
                    assumed.vaccine < 0.95
                        ? clamp((report.claimed_vaccination - assumed.vaccine) /
                                    (1.0 - assumed.vaccine),
                                0.0, 1.0)
                        : prior_coverage;
                const double inverted_masking =
                    assumed.mask < 0.95
                        ? clamp((report.claimed_masking - assumed.mask) / (1.0 - assumed.mask), 0.0,
                                1.0)
                        : prior_masking;
                const double coverage_estimate =
                    (1.0 - vaccine_weight) * prior_coverage + vaccine_weight * inverted_coverage;
                const double masking_estimate =
                    (1.0 - mask_weight) * prior_masking + mask_weight * inverted_masking;
                double psi_hat_rate = config.baseline.vaccination_rate;
                if (pha.has_previous_coverage) {
                    const double weekly_gain =
                        std::max(0.0, coverage_estimate - pha.previous_coverage_estimate);
                    psi_hat_rate = clamp(
                        weekly_gain / (7.0 * std::max(0.05, 1.0 - pha.previous_coverage_estimate)),
                        0.0, config.vaccination_cap);
                }
                pha.previous_coverage_estimate = coverage_estimate;
                pha.has_previous_coverage = true;
                // the PHA steps cautiously on an untrusted channel
                const double step_scale =
                    config.step_credibility_floor +
                    (1.0 - config.step_credibility_floor) * std::max(0.0, 1.0 - assumed.mask);

                const double observed_h = hospitalization(config.epi, state);
                const double predicted_h = hospitalization(model_params, pha.model_state);
                DistortionRecord record;
                record.observed_hospitalization = observed_h;
                record.predicted_hospitalization = predicted_h;
                record.distortion = distortion(observed_h, predicted_h);
                record.threshold = config.distortion_threshold;

                if (config.policy == PolicyKind::kAdaptive) {
                    EstimatedModel model;
                    model.params = model_params;
                    model.state = pha.model_state;
                    model.believed_vaccination = psi_hat_rate;
                    model.believed_masking = masking_estimate;
                    model.observed_hospitalization = observed_h;
                    model.target_decay = config.target_decay;
                    model.substeps_per_day = config.substeps_per_day;

                    const double believed_rc =
                        r_control(config.epi, BehaviorRates{policy.recommended_vaccination,
                                                            policy.recommended_masking});
                    const bool epidemic_growing =
                        predicted_next_hospitalization(policy, model) >
                        std::max(observed_h, 1.0);
                    const PolicyState before = policy;
                    PolicyState scaled = policy;
                    scaled.step_size = policy.step_size * step_scale;
                    scaled.base_step_size = policy.base_step_size * step_scale;
                    if (record.distortion > record.threshold) {
                        scaled = adaptive_update(scaled, record, model, scaled.step_size);
                    } else if (believed_rc > 1.0 || epidemic_growing) {
                        // trusted reports but an endemic or growing outlook:
                        // keep selecting policies toward the disease-free path
                        scaled = control_pressure_update(scaled, record, model, scaled.step_size);
                    }
                    policy = scaled;
                    policy.step_size = scaled.step_size / step_scale;
                    policy.base_step_size = config.step_size;
                    policy = compose_recommendations(policy, psi_hat_rate, masking_estimate);
                    const double psi_step =
                        (policy.vaccination_correction - before.vaccination_correction) /
                        policy.vaccination_cap;
                    const double eta_step =
                        (policy.masking_correction - before.masking_correction) /
                        policy.masking_cap;
                    step_magnitude_sum += 0.5 * (std::abs(psi_step) + std::abs(eta_step));
                    step_sum += psi_step + eta_step;
                    step_sum_sq += psi_step * psi_step + eta_step * eta_step;
                    step_magnitude_count += 1;
                } else {  // random policy: current estimates plus fresh noise
                    PolicyState anchored = policy;
                    anchored.vaccination_correction = 0.0;
                    anchored.masking_correction = 0.0;
                    anchored = compose_recommendations(anchored, psi_hat_rate, masking_estimate);
                    policy = random_policy(anchored, noise_scale, rng);
                }

                mask_honesty = channel_honesty_mask(pop_strategy, pi_true);
                vaccine_honesty = channel_honesty_vaccine(pop_strategy, pi_true);
                const SenderStrategy effective = mix_with_identity(pop_strategy, recovered_share);
                const ReceiverBelief channel_now = bayes_posterior(effective, pi_true);

                metrics.deception_overall = report.deception.overall_rate;
                metrics.deception_vaccination = report.deception.vaccination_rate;
                metrics.deception_masking = report.deception.masking_rate;
                metrics.deception_responder = report.deception.responder_rate;
                metrics.distortion_value = record.distortion;
                metrics.info_bits = information_content_bits(pi_true, channel_now);
                for (int c = 0; c < kNumStatuses; ++c) {
                    for (int msg = 0; msg < kNumMessages; ++msg) {
                        metrics.strategy_flat[4 * c + msg] = effective.probabilities[c][msg];
                        metrics.belief_flat[4 * msg + c] = channel_now.posterior[msg][c];
                    }
                }

                const double rc_now = r_control(
                    config.epi, BehaviorRates{policy.recommended_vaccination,
                                              policy.recommended_masking});
                double sender_utility = 0.0;
                double expected_surprise = 0.0;
                for (int c = 0; c < kNumStatuses; ++c) {
                    const TrueStatus status = TrueStatus::from_index(c);
                    sender_utility +=
                        pi_true[c] * sender_utility_rc(pop_strategy, status, config.game, rc_now);
                    for (int m = 0; m < kNumMessages; ++m) {
                        const double joint = pi_true[c] * effective.probabilities[c][m];
                        if (joint > 0.0) {
                            expected_surprise +=
                                joint * std::min(kSurpriseCap,
                                                 surprise(pha.channel_belief, status, Message{m}));
                        }
                    }
                }
                const double responder_share = 1.0 - config.nonresponsive_share;
                metrics.sender_utility =
                    responder_share * (1.0 - recovered_share) * sender_utility;
                metrics.receiver_utility =
                    -responder_share * expected_surprise -
                    config.game.distortion_weight * record.distortion / (population * population);
            }

            // population response to the published recommendations; masking
            // is cheap enough to respond even to an untrusted channel, while
            // vaccination follows only a credible one
            const double mask_uptake =
                config.uptake_rate * (config.uptake_info_floor +
                                      (1.0 - config.uptake_info_floor) * mask_honesty * mask_honesty);
            const double vax_uptake = config.uptake_rate * vaccine_honesty;
            if (config.policy != PolicyKind::kNoInteraction) {
                if (policy.recommended_masking >= mask_realized) {
                    // adoption spreads from the visibly masked share
                    const double pull =
                        std::min(1.0, mask_uptake * std::max(mask_realized, config.uptake_seed));
                    mask_realized += pull * (policy.recommended_masking - mask_realized);
                } else {
                    mask_realized += kMaskRelaxRate * (policy.recommended_masking - mask_realized);
                }
                if (policy.recommended_vaccination < psi_realized) {
                    psi_realized = policy.recommended_vaccination;  // stopping is immediate
                } else {
                    psi_realized +=
                        std::min(1.0, vax_uptake) * (policy.recommended_vaccination - psi_realized);
                }
                mask_realized = clamp(mask_realized, 0.0, 1.0);
                psi_realized = std::max(0.0, psi_realized);
            }

            const BehaviorRates realized{psi_realized, mask_realized};
            metrics.rc = r_control(config.epi, BehaviorRates{policy.recommended_vaccination,
                                                             policy.recommended_masking});
            metrics.psi_recommended = policy.recommended_vaccination;
            metrics.eta_recommended = policy.recommended_masking;
            metrics.psi_realized = psi_realized;
            metrics.mask_coverage = mask_realized;

            // epidemic propagation: ground truth under realized behavior
            EpiParams week_params = config.epi;
            if (config.process_noise_sigma > 0.0) {
                const double sigma = config.process_noise_sigma;
                week_params.base_transmission *= std::exp(sigma * noise(rng) - 0.5 * sigma * sigma);
            }
            state = integrate_week(week_params, realized, state, config.substeps_per_day).state;

            if (config.policy != PolicyKind::kNoInteraction) {
                // The PHA's predictive model runs at the reported compliance
                // levels taken at face value (claimed fractions played as
                // rates). Inflated claims make this model over-optimistic,
                // which is exactly the error the distortion loop measures.
                const BehaviorRates believed_rates{clamp(claimed_vaccination, 0.0, 1.0),
                                                   clamp(claimed_masking, 0.0, 1.0)};
                pha.model_state = integrate_week(model_params, believed_rates, pha.model_state,
                                                 config.substeps_per_day)
                                      .state;
            }

            const double week_population = state.total();
            metrics.s_frac = state.susceptible / week_population;
            metrics.v_frac = state.vaccinated / week_population;
            metrics.e_frac = state.exposed / week_population;
            metrics.a_frac = state.asymptomatic / week_population;
            metrics.i_frac = state.infected / week_population;
            metrics.r_frac = state.recovered / week_population;
            metrics.hosp_frac = hospitalization(config.epi, state) / week_population;
            metrics.vaccination_coverage = metrics.v_frac;

            result.weeks.push_back(metrics);
        }
    } catch (const std::runtime_error& err) {
        result.valid = false;
        result.error = err.what();
        return result;
    }

    // control week on the smoothed Rc series
    std::vector<double> rc_series;
    rc_series.reserve(result.weeks.size());
    for (const WeeklyMetrics& m : result.weeks) {
        rc_series.push_back(m.rc);
    }
    SmoothingParams smoothing;
    const int length = static_cast<int>(rc_series.size());
    const int odd_length = length % 2 == 0 ? length - 1 : length;
    smoothing.window = std::max(1, std::min(config.savgol_window, odd_length));
    smoothing.poly_order = std::min(config.savgol_order, smoothing.window - 1);
    const std::vector<double> smooth =
        smooth_series(rc_series, SmoothingKind::kSavitzkyGolay, smoothing);
    for (std::size_t i = 0; i < smooth.size(); ++i) {
        if (smooth[i] < 1.0) {
            result.week_control = static_cast<int>(i) + 1;
            break;
        }
    }
    if (result.week_control) {
        result.disease_control_score = 1.0 - static_cast<double>(*result.week_control) / 26.0;
    }
    for (const WeeklyMetrics& m : result.weeks) {
        result.peak_hospitalization_fraction =
            std::max(result.peak_hospitalization_fraction, m.hosp_frac);
    }
    if (!result.weeks.empty()) {
        result.final_deception_rate = result.weeks.back().deception_overall;
    }
    if (step_magnitude_count > 0) {
        result.mean_step_magnitude = step_magnitude_sum / step_magnitude_count;
        const double n = 2.0 * step_magnitude_count;  // two coordinates per week
        const double mean = step_sum / n;
        result.step_std = std::sqrt(std::max(0.0, step_sum_sq / n - mean * mean));
    }
    return result;
}

namespace {

int worker_count(int runs)
{
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EPI_SIGNAL_THREADS")) {
        const int requested = std::atoi(env);
        if (requested > 0) {
            workers = requested;
        }
    }
    return std::max(1, std::min(workers, runs));
}

}  // namespace

double calibrate_noise_scale(const ScenarioConfig& config)
{
    ScenarioConfig probe = config;
    probe.policy = PolicyKind::kAdaptive;
    probe.num_runs = 1;
    probe.noise_scale = 0.0;
    // keep the probe stochastic so the gate fires the way the real run would
    if (probe.process_noise_sigma <= 0.0) {
        probe.process_noise_sigma = 0.05;
    }
    const RunResult probe_run = weekly_loop(probe, probe.seed_base);
    return std::max(1e-4, probe_run.step_std);
}

std::vector<RunResult> run_scenario_runs(const ScenarioConfig& config)
{
    config.validate();
    ScenarioConfig resolved = config;
    if (config.policy == PolicyKind::kRandom && config.noise_scale <= 0.0) {
        resolved.noise_scale = calibrate_noise_scale(config);
    }

    std::vector<RunResult> runs(resolved.num_runs);
    std::atomic<int> next{0};
    const int workers = worker_count(resolved.num_runs);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < resolved.num_runs; i = next.fetch_add(1)) {
                runs[i] = weekly_loop(resolved, resolved.seed_base + static_cast<std::uint64_t>(i));
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    return runs;
}

SummaryStats summarize_runs(const ScenarioConfig& config, const std::vector<RunResult>& runs)
{
    SummaryStats stats;
    stats.total_runs = static_cast<int>(runs.size());

    const auto& fields = metric_fields();
    std::vector<WeeklyMetrics> mean(config.horizon_weeks);
    std::vector<WeeklyMetrics> spread(config.horizon_weeks);
    int valid_count = 0;
    double censored_sum = 0.0;

    for (const RunResult& run : runs) {
        if (!run.valid) {
            ++stats.invalid_runs;
            stats.week_control_by_run.push_back(std::nullopt);
            continue;
        }
        ++valid_count;
        stats.week_control_by_run.push_back(run.week_control);
        if (run.week_control) {
            ++stats.controlled_runs;
            censored_sum += static_cast<double>(*run.week_control);
        } else {
            censored_sum += static_cast<double>(config.horizon_weeks + 1);
        }
        stats.mean_disease_control_score += run.disease_control_score.value_or(0.0);
        stats.mean_peak_hospitalization += run.peak_hospitalization_fraction;
        stats.mean_final_deception += run.final_deception_rate;
        stats.mean_step_magnitude += run.mean_step_magnitude;

        for (int week = 0; week < config.horizon_weeks; ++week) {
            mean[week].week = week + 1;
            spread[week].week = week + 1;
            for (const auto field : fields) {
                mean[week].*field += run.weeks[week].*field;
            }
            for (int i = 0; i < 16; ++i) {
                mean[week].strategy_flat[i] += run.weeks[week].strategy_flat[i];
                mean[week].belief_flat[i] += run.weeks[week].belief_flat[i];
            }
        }
    }

    if (valid_count > 0) {
        const double n = static_cast<double>(valid_count);
        stats.censored_mean_week_control = censored_sum / n;
        stats.mean_disease_control_score /= n;
        stats.mean_peak_hospitalization /= n;
        stats.mean_final_deception /= n;
        stats.mean_step_magnitude /= n;
        if (stats.controlled_runs > 0) {
            double controlled_sum = 0.0;
            for (const auto& wc : stats.week_control_by_run) {
                if (wc) controlled_sum += static_cast<double>(*wc);
            }
            stats.mean_week_control = controlled_sum / stats.controlled_runs;
        }
        for (int week = 0; week < config.horizon_weeks; ++week) {
            for (const auto field : fields) {
                mean[week].*field /= n;
            }
            for (int i = 0; i < 16; ++i) {
                mean[week].strategy_flat[i] /= n;
                mean[week].belief_flat[i] /= n;
            }
        }
        // second pass keeps identical runs at exactly zero spread
        for (const RunResult& run : runs) {
            if (!run.valid) {
                continue;
            }
            for (int week = 0; week < config.horizon_weeks; ++week) {
                for (const auto field : fields) {
                    const double d = run.weeks[week].*field - mean[week].*field;
                    spread[week].*field += d * d;
                }
                for (int i = 0; i < 16; ++i) {
                    const double ds =
                        run.weeks[week].strategy_flat[i] - mean[week].strategy_flat[i];
                    const double db = run.weeks[week].belief_flat[i] - mean[week].belief_flat[i];
                    spread[week].strategy_flat[i] += ds * ds;
                    spread[week].belief_flat[i] += db * db;
                }
            }
        }
        for (int week = 0; week < config.horizon_weeks; ++week) {
            for (const auto field : fields) {
                spread[week].*field = std::sqrt(spread[week].*field / n);
            }
            for (int i = 0; i < 16; ++i) {
                spread[week].strategy_flat[i] = std::sqrt(spread[week].strategy_flat[i] / n);
                spread[week].belief_flat[i] = std::sqrt(spread[week].belief_flat[i] / n);
            }
        }
        stats.mean = std::move(mean);
        stats.stddev = std::move(spread);
    }
    return stats;
}

SummaryStats monte_carlo(const ScenarioConfig& config)
{
    return summarize_runs(config, run_scenario_runs(config));
}

std::vector<double> smooth_series(const std::vector<double>& series, SmoothingKind kind,
                                  const SmoothingParams& params)
{
    if (kind == SmoothingKind::kExponential) {
        if (params.factor <= 0.0 || params.factor > 1.0) {
            throw std::invalid_argument("smooth_series: exponential factor must be in (0,1]");
        }
        std::vector<double> out;
        out.reserve(series.size());
        double level = 0.0;
        for (std::size_t i = 0; i < series.size(); ++i) {
            level = i == 0 ? series[0] : params.factor * series[i] + (1.0 - params.factor) * level;
            out.push_back(level);
        }
        return out;
    }

    const int window = params.window;
    const int order = params.poly_order;
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("smooth_series: window must be odd and positive");
    }
    if (order < 0 || order >= window) {
        throw std::invalid_argument("smooth_series: order must satisfy 0 <= order < window");
    }
    if (static_cast<std::size_t>(window) > series.size()) {
        throw std::invalid_argument("smooth_series: window exceeds series length");
    }

    const int half = window / 2;
    const int n = static_cast<int>(series.size());
    std::vector<double> out(series.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        const int points = hi - lo + 1;
        const int degree = std::min(order, points - 1);
        // least-squares polynomial fit centered at i, evaluated at 0
        const int dim = degree + 1;
        std::vector<std::vector<double>> normal(dim, std::vector<double>(dim + 1, 0.0));
        std::vector<double> powers(dim, 1.0);
        for (int j = lo; j <= hi; ++j) {
            const double x = static_cast<double>(j - i);
            for (int d = 1; d < dim; ++d) {
                powers[d] = powers[d - 1] * x;
            }
            for (int r = 0; r < dim; ++r) {
                for (int c = 0; c < dim; ++c) {
                    normal[r][c] += powers[r] * powers[c];
                }
                normal[r][dim] += powers[r] * series[j];
            }
        }
        // Gaussian elimination with partial pivoting
        for (int col = 0; col < dim; ++col) {
            int pivot = col;
            for (int r = col + 1; r < dim; ++r) {
                if (std::abs(normal[r][col]) > std::abs(normal[pivot][col])) {
                    pivot = r;
                }
            }
            std::swap(normal[col], normal[pivot]);
            const double diag = normal[col][col];
            if (std::abs(diag) < 1e-12) {
                continue;
            }
            for (int r = 0; r < dim; ++r) {
                if (r == col) continue;
                const double factor = normal[r][col] / diag;
                for (int c = col; c <= dim; ++c) {
                    normal[r][c] -= factor * normal[col][c];
                }
            }
        }
        out[i] = std::abs(normal[0][0]) > 1e-12 ? normal[0][dim] / normal[0][0] : series[i];
    }
    return out;
}

StressReport stress_grid(const ScenarioConfig& base, const StressFactors& factors)
{
    StressReport report;
    const std::array<EquilibriumKind, 3> equilibria = {
        EquilibriumKind::kSeparating, EquilibriumKind::kPartialPooling, EquilibriumKind::kPooling};

    for (EquilibriumKind eq : equilibria) {
        ScenarioConfig reference = base;
        reference.equilibrium = eq;
        const SummaryStats baseline_stats = monte_carlo(reference);

        struct Variant {
            std::string name;
            ScenarioConfig config;
        };
        std::vector<Variant> variants;
        {
            ScenarioConfig c = reference;
            c.epi.hospitalization_ratio =
                clamp(c.epi.hospitalization_ratio * factors.ihr_factor, 0.0, 1.0);
            variants.push_back({"infection_hospitalization_ratio", c});
        }
        {
            ScenarioConfig c = reference;
            c.game.vaccine_lie_incentive *= factors.incentive_factor;
            c.game.mask_lie_incentive *= factors.incentive_factor;
            variants.push_back({"incentives", c});
        }
        {
            ScenarioConfig c = reference;
            c.nonresponsive_share = factors.nonresponsive_share;
            variants.push_back({"non_responsive_share", c});
        }
        {
            ScenarioConfig c = reference;
            c.epi.vaccine_efficacy = factors.vaccine_efficacy;
            variants.push_back({"vaccine_efficacy", c});
        }

        for (const Variant& variant : variants) {
            const SummaryStats perturbed = monte_carlo(variant.config);
            StressCell cell;
            cell.factor = variant.name;
            cell.equilibrium = eq;
            cell.score_delta =
                perturbed.mean_disease_control_score - baseline_stats.mean_disease_control_score;
            cell.baseline_peak = baseline_stats.mean_peak_hospitalization;
            cell.perturbed_peak = perturbed.mean_peak_hospitalization;
            cell.peak_ratio = baseline_stats.mean_peak_hospitalization > 0.0
                                  ? perturbed.mean_peak_hospitalization /
                                        baseline_stats.mean_peak_hospitalization
                                  : 0.0;
            report.cells.push_back(cell);
        }
    }
    return report;
}

}  // namespace episignal
