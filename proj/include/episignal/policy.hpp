#pragma once

#include "episignal/epi.hpp"
#include "episignal/signaling.hpp"

#include <random>

namespace episignal {

/// PHA recommendation state: published rates, the corrections they carry,
/// and the gradient-step bookkeeping.
struct PolicyState {
    double recommended_vaccination = 0.05;  // psi_r
    double recommended_masking = 0.10;  // eta_r
    double vaccination_correction = 0.0;  // psi tilde
    double masking_correction = 0.0;  // eta tilde
    double step_size = 0.05;
    double base_step_size = 0.05;
    double vaccination_cap = 0.2;  // psi_max
    double masking_cap = 0.9;  // eta_max
    // Upward correction bound: the PHA cannot credibly push recommendations
    // arbitrarily far beyond the compliance it believes reports imply.
    double correction_cap = 0.6;
    double last_distortion = -1.0;  // < 0 before the first week
    bool last_update_skipped = false;

    void validate() const;
};

struct DistortionRecord {
    double observed_hospitalization = 0.0;  // H
    double predicted_hospitalization = 0.0;  // H hat
    double distortion = 0.0;  // (H - H hat)^2
    double threshold = 1.0;  // D*
};

/// The PHA's internal model: the estimated compartments, believed behavior
/// rates, and the observation used to reconcile them.
struct EstimatedModel {
    EpiParams params;  // gamma_hat folded into recovery_rate
    CompartmentState state;
    double believed_vaccination = 0.0;  // psi hat, 1/day
    double believed_masking = 0.0;  // eta hat, fraction
    double observed_hospitalization = 0.0;
    double target_decay = 1.0;  // desired weekly shrink of hospitalizations
    int substeps_per_day = 10;
};

/// D = (H - H hat)^2 in persons^2.
double distortion(double observed_hospitalization, double predicted_hospitalization);

/// Belief-weighted distortion: sum_c q(c) sum_theta p(theta|c) sq_error(theta, c).
/// Reduces to the scalar form under point-mass beliefs.
double weighted_distortion(const StatusDistribution& posterior,
                           const std::vector<std::array<double, kNumStatuses>>& theta_given_c,
                           const std::vector<std::array<double, kNumStatuses>>& sq_error);

/// One-week-ahead hospitalization prediction from the reconciled estimated
/// model under the currently carried corrections.
double predicted_next_hospitalization(const PolicyState& state, const EstimatedModel& model);

/// Predicted hospitalization gap after a one-week rollout of the estimated
/// model under candidate corrections, measured against the PHA's declining
/// target path. This is the objective the adaptive gradient descends.
double predicted_tracking_distortion(const PolicyState& state, const EstimatedModel& model,
                                     double vaccination_delta, double masking_delta);

/// Gradient step on the corrections when distortion exceeds the threshold;
/// exact identity otherwise. The gradient is a central finite difference of
/// predicted_tracking_distortion through the estimated model only.
PolicyState adaptive_update(const PolicyState& state, const DistortionRecord& record,
                            const EstimatedModel& model, double step_size);

/// The same corrective step without the distortion gate, used when the
/// reports are trusted but the believed reproduction number still exceeds
/// one: the PHA keeps selecting policies toward Rc <= 1.
PolicyState control_pressure_update(const PolicyState& state, const DistortionRecord& record,
                                    const EstimatedModel& model, double step_size);

/// Recompute published recommendations from fresh estimates plus the
/// carried corrections, clamped to the caps.
PolicyState compose_recommendations(const PolicyState& state, double believed_vaccination,
                                    double believed_masking);

/// Baseline: recommendations perturbed by zero-mean Gaussian noise scaled
/// per coordinate by its cap, clamped to [0, cap].
PolicyState random_policy(const PolicyState& state, double noise_scale, std::mt19937_64& rng);

/// Baseline: recommendations frozen at the initial behavior rates.
PolicyState no_interaction_policy(const BehaviorRates& baseline, double vaccination_cap = 0.2,
                                  double masking_cap = 0.9);

}  // namespace episignal
