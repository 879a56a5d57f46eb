#include "episignal/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace episignal {

namespace {


constexpr double kCorrectionBound = 1.5;
constexpr double kGradientStep = 1e-4;
constexpr double kReconcileFloor = 0.2;
constexpr double kReconcileCeil = 5.0;

double clamp(double x, double lo, double hi)
{
    return std::min(std::max(x, lo), hi);
}

}  // namespace

void PolicyState::validate() const
{
    if (recommended_vaccination < 0.0 || recommended_vaccination > vaccination_cap) {
        throw std::invalid_argument("recommended vaccination outside [0, cap]");
    }
    if (recommended_masking < 0.0 || recommended_masking > masking_cap || masking_cap > 1.0) {
        throw std::invalid_argument("recommended masking outside [0, cap] or cap > 1");
    }
    if (step_size <= 0.0) {
        throw std::invalid_argument("step_size must be > 0");
    }
}

double distortion(double observed_hospitalization, double predicted_hospitalization)
{
    if (observed_hospitalization < 0.0 || predicted_hospitalization < 0.0) {
        throw std::invalid_argument("distortion: hospitalizations must be >= 0");
    }
    const double gap = observed_hospitalization - predicted_hospitalization;
    return gap * gap;
}

double weighted_distortion(const StatusDistribution& posterior,
                           const std::vector<std::array<double, kNumStatuses>>& theta_given_c,
                           const std::vector<std::array<double, kNumStatuses>>& sq_error)
{
    if (theta_given_c.size() != sq_error.size()) {
        throw std::invalid_argument("weighted_distortion: table sizes must match");
    }
    double total = 0.0;
    for (int c = 0; c < kNumStatuses; ++c) {
        double inner = 0.0;
        for (std::size_t t = 0; t < theta_given_c.size(); ++t) {
            inner += theta_given_c[t][c] * sq_error[t][c];
        }
        total += posterior[c] * inner;
    }
    return total;
}

namespace {

/// Scale the infection-bearing compartments so the model's hospitalization
/// matches the observation; the PHA's only ground-truth signal.
CompartmentState reconcile_state(const EstimatedModel& model)
{
    CompartmentState state = model.state;
    const double xi = model.params.hospitalization_ratio;
    const double modeled = xi * state.infected;
    if (model.observed_hospitalization <= 0.0) {
        return state;
    }
    if (modeled <= 1e-12) {
        // model has burned out while infections persist; reseed from H
        const double implied_infected = model.observed_hospitalization / std::max(xi, 1e-12);
        state.infected = implied_infected;
        state.exposed = std::max(state.exposed, implied_infected);
        state.asymptomatic = std::max(state.asymptomatic, 0.5 * implied_infected);
        return state;
    }
    const double ratio = clamp(model.observed_hospitalization / modeled, kReconcileFloor, kReconcileCeil);
    state.infected *= ratio;
    state.exposed *= ratio;
    state.asymptomatic *= ratio;
    return state;
}

}  // namespace

double predicted_next_hospitalization(const PolicyState& state, const EstimatedModel& model)
{
    BehaviorRates current;
    current.vaccination_rate =
        clamp(model.believed_vaccination + state.vaccination_correction, 0.0, 1.0);
    current.masking_rate = clamp(model.believed_masking + state.masking_correction, 0.0, 1.0);
    const CompartmentState start = reconcile_state(model);
    const IntegrationResult rolled =
        integrate_week(model.params, current, start, model.substeps_per_day);
    return model.params.hospitalization_ratio * rolled.state.infected;
}

double predicted_tracking_distortion(const PolicyState& state, const EstimatedModel& model,
                                     double vaccination_delta, double masking_delta)
{
    // candidates live on the physical [0,1] range, not the policy caps, so
    // the finite differences stay informative when recommendations saturate
    BehaviorRates candidate;
    candidate.vaccination_rate = clamp(
        model.believed_vaccination + state.vaccination_correction + vaccination_delta, 0.0, 1.0);
    candidate.masking_rate =
        clamp(model.believed_masking + state.masking_correction + masking_delta, 0.0, 1.0);

    const CompartmentState start = reconcile_state(model);
    const IntegrationResult rolled =
        integrate_week(model.params, candidate, start, model.substeps_per_day);
    const double predicted = model.params.hospitalization_ratio * rolled.state.infected;
    const double target = (1.0 - model.target_decay) * model.observed_hospitalization;
    const double gap = predicted - target;
    return gap * gap;
}

PolicyState adaptive_update(const PolicyState& state, const DistortionRecord& record,
                            const EstimatedModel& model, double step_size)
{
    if (record.distortion <= record.threshold) {
        return state;  // keep previous recommendations
    }
    return control_pressure_update(state, record, model, step_size);
}

PolicyState control_pressure_update(const PolicyState& state, const DistortionRecord& record,
                                    const EstimatedModel& model, double step_size)
{
    (void)step_size;
    PolicyState next = state;
    next.last_update_skipped = false;

    // backtrack when distortion got worse, recover otherwise; the floor
    // keeps the loop moving through the epidemic's rising phase
    if (state.last_distortion >= 0.0) {
        if (record.distortion > state.last_distortion) {
            next.step_size = std::max(0.25 * state.base_step_size, state.step_size * 0.5);
        } else {
            next.step_size = std::min(state.base_step_size, state.step_size * 1.5);
        }
    }
    next.last_distortion = record.distortion;

    const auto objective = [&](double dv, double dm) {
        return predicted_tracking_distortion(next, model, dv, dm);
    };
    const double g_psi =
        (objective(kGradientStep, 0.0) - objective(-kGradientStep, 0.0)) / (2.0 * kGradientStep);
    const double g_eta =
        (objective(0.0, kGradientStep) - objective(0.0, -kGradientStep)) / (2.0 * kGradientStep);

    if (!std::isfinite(g_psi) || !std::isfinite(g_eta)) {
        next.last_update_skipped = true;
        return next;
    }
    if (g_psi == 0.0 && g_eta == 0.0) {
        return next;  // flat objective, nothing to move
    }

    // coordinate-wise sign descent: the two levers act on very different
    // scales, so each moves a full step along its own downhill direction
    const auto signum = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    next.vaccination_correction =
        clamp(state.vaccination_correction - next.step_size * signum(g_psi), -kCorrectionBound,
              state.correction_cap);
    next.masking_correction =
        clamp(state.masking_correction - next.step_size * signum(g_eta), -kCorrectionBound,
              state.correction_cap);
    return compose_recommendations(next, model.believed_vaccination, model.believed_masking);
}

PolicyState compose_recommendations(const PolicyState& state, double believed_vaccination,
                                    double believed_masking)
{
    PolicyState next = state;
    next.recommended_vaccination =
        clamp(believed_vaccination + state.vaccination_correction, 0.0, state.vaccination_cap);
    next.recommended_masking =
        clamp(believed_masking + state.masking_correction, 0.0, state.masking_cap);
    return next;
}

PolicyState random_policy(const PolicyState& state, double noise_scale, std::mt19937_64& rng)
{
    if (noise_scale < 0.0) {
        throw std::invalid_argument("random_policy: noise_scale must be >= 0");
    }
    PolicyState next = state;
    if (noise_scale == 0.0) {
        return next;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    next.recommended_vaccination = clamp(
        state.recommended_vaccination + noise_scale * state.vaccination_cap * gauss(rng), 0.0,
        state.vaccination_cap);
    next.recommended_masking =
        clamp(state.recommended_masking + noise_scale * state.masking_cap * gauss(rng), 0.0,
              state.masking_cap);
    return next;
}

PolicyState no_interaction_policy(const BehaviorRates& baseline, double vaccination_cap,
                                  double masking_cap)
{
    // a silent PHA only echoes the status quo, so the caps never bind below it
    PolicyState state;
    state.vaccination_cap = std::max(vaccination_cap, baseline.vaccination_rate);
    state.masking_cap = std::max(masking_cap, baseline.masking_rate);
    state.recommended_vaccination = clamp(baseline.vaccination_rate, 0.0, state.vaccination_cap);
    state.recommended_masking = clamp(baseline.masking_rate, 0.0, state.masking_cap);
    return state;
}

}  // namespace episignal
