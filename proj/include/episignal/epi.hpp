#pragma once

#include <cstdint>
#include <stdexcept>

namespace episignal {

/// Epidemiological rate constants for the SVEAIR model.
///
/// All rates are per day. `birth_rate` is persons/day; the remaining
/// dimensionless parameters live in [0,1].
struct EpiParams {
    double birth_rate = 10000.0 / 27375.0;  // Lambda, persons/day
    double natural_death_rate = 1.0 / 27375.0;  // mu, 1/day
    double base_transmission = 0.35;  // beta0, 1/day
    double asymptomatic_infectiousness = 0.5;  // b
    double symptomatic_fraction = 0.67;  // p
    double latency_rate = 0.2;  // k, 1/day
    double recovery_rate = 0.1;  // gamma, 1/day
    double vaccine_efficacy = 0.45;  // delta
    double hospitalization_ratio = 0.05;  // xi

    void validate() const;
};

/// The six SVEAIR compartments, in persons.
struct CompartmentState {
    double susceptible = 0.0;
    double vaccinated = 0.0;
    double exposed = 0.0;
    double asymptomatic = 0.0;
    double infected = 0.0;
    double recovered = 0.0;

    double total() const
    {
        return susceptible + vaccinated + exposed + asymptomatic + infected + recovered;
    }

    void validate() const;
};

/// Realized population behavior entering the ground-truth dynamics.
struct BehaviorRates {
    double vaccination_rate = 0.05;  // psi, 1/day
    double masking_rate = 0.10;  // eta, fraction

    void validate() const;
};

/// The receiver's parameter beliefs. gamma_hat mirrors the true recovery
/// rate and lambda_hat is recomputed from the estimated state, so both are
/// carried mostly for reporting.
struct EstimatedParams {
    double psi_hat = 0.0;
    double eta_hat = 0.0;
    double gamma_hat = 0.1;
    double lambda_hat = 0.0;
};

struct CompartmentDerivatives {
    double susceptible = 0.0;
    double vaccinated = 0.0;
    double exposed = 0.0;
    double asymptomatic = 0.0;
    double infected = 0.0;
    double recovered = 0.0;

    double sum() const
    {
        return susceptible + vaccinated + exposed + asymptomatic + infected + recovered;
    }
};

struct IntegrationResult {
    CompartmentState state;
    std::int64_t clamp_events = 0;
};

struct HerdImmunityThreshold {
    double psi_hi = 0.0;
    // True only when 1 < R0 < 1/(1-delta); outside that interval psi_hi is
    // not a usable target and callers fall back to the R_c <= 1 criterion.
    bool valid = false;
};

/// lambda(t) = beta0 * (I + b*A) / K.
double force_of_infection(const EpiParams& params, const CompartmentState& state);

/// Right-hand side of the SVEAIR system. The same function serves the
/// receiver's estimated model: pass estimated rates and a copy of the
/// parameters with gamma_hat in place of gamma.
CompartmentDerivatives sveair_derivatives(const EpiParams& params, const BehaviorRates& behavior,
                                          const CompartmentState& state);

/// Advances the state seven days with fixed-step classical RK4.
/// Negative compartments are clamped to zero and counted.
IntegrationResult integrate_week(const EpiParams& params, const BehaviorRates& behavior,
                                 const CompartmentState& state, int substeps_per_day = 10);

/// Basic reproduction number R0 = beta*k / ((k+mu)(gamma+mu)) with
/// beta = beta0 * (p + b(1-p)).
double r0(const EpiParams& params);

/// Control reproduction number
/// R_c = R0 * ((1-delta)*psi + (1-eta)*mu) / (psi + mu).
double r_control(const EpiParams& params, const BehaviorRates& behavior);

/// Threshold vaccination rate psi_HI = mu*(R0(1-eta)-1) / (1 - R0(1-delta)).
HerdImmunityThreshold herd_immunity_threshold(const EpiParams& params, double masking_rate);

/// Observable hospitalizations H = xi * I.
double hospitalization(const EpiParams& params, const CompartmentState& state);

}  // namespace episignal
