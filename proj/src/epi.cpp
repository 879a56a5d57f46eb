#include "episignal/epi.hpp"

#include <cmath>
#include <string>

namespace episignal {

namespace {

bool in_unit_interval(double x)
{
    return x >= 0.0 && x <= 1.0;
}

void require(bool cond, const char* what)
{
    if (!cond) {
        throw std::invalid_argument(what);
    }
}

}  // namespace

void EpiParams::validate() const
{
    require(birth_rate >= 0.0, "birth_rate must be >= 0");
    require(natural_death_rate >= 0.0, "natural_death_rate must be >= 0");
    require(base_transmission >= 0.0, "base_transmission must be >= 0");
    require(in_unit_interval(asymptomatic_infectiousness), "asymptomatic_infectiousness must be in [0,1]");
    require(in_unit_interval(symptomatic_fraction), "symptomatic_fraction must be in [0,1]");
    require(latency_rate > 0.0, "latency_rate must be > 0");
    require(recovery_rate > 0.0, "recovery_rate must be > 0");
    require(in_unit_interval(vaccine_efficacy), "vaccine_efficacy must be in [0,1]");
    require(in_unit_interval(hospitalization_ratio), "hospitalization_ratio must be in [0,1]");
}

void CompartmentState::validate() const
{
    require(susceptible >= 0.0 && vaccinated >= 0.0 && exposed >= 0.0 && asymptomatic >= 0.0 &&
                infected >= 0.0 && recovered >= 0.0,
            "compartments must be non-negative");
    require(total() > 0.0, "total population must be positive");
}

void BehaviorRates::validate() const
{
    require(vaccination_rate >= 0.0, "vaccination_rate must be >= 0");
    require(in_unit_interval(masking_rate), "masking_rate must be in [0,1]");
}

double force_of_infection(const EpiParams& params, const CompartmentState& state)
{
    const double total = state.total();
    if (total <= 0.0) {
        throw std::domain_error("force_of_infection: total population is zero");
    }
    return params.base_transmission *
           (state.infected + params.asymptomatic_infectiousness * state.asymptomatic) / total;
}

CompartmentDerivatives sveair_derivatives(const EpiParams& params, const BehaviorRates& behavior,
                                          const CompartmentState& state)
{
    const double lambda = force_of_infection(params, state);
    const double mu = params.natural_death_rate;
    const double psi = behavior.vaccination_rate;
    const double eta = behavior.masking_rate;
    const double delta = params.vaccine_efficacy;
    const double k = params.latency_rate;
    const double p = params.symptomatic_fraction;
    const double gamma = params.recovery_rate;

    CompartmentDerivatives d;
    d.susceptible = params.birth_rate - lambda * (1.0 - eta) * state.susceptible -
                    (psi + mu) * state.susceptible;
    d.vaccinated = psi * state.susceptible - lambda * (1.0 - delta) * state.vaccinated -
                   mu * state.vaccinated;
    d.exposed = lambda * ((1.0 - eta) * state.susceptible + (1.0 - delta) * state.vaccinated) -
                (k + mu) * state.exposed;
    d.asymptomatic = k * (1.0 - p) * state.exposed - (gamma + mu) * state.asymptomatic;
    d.infected = k * p * state.exposed - (gamma + mu) * state.infected;
    d.recovered = gamma * (state.asymptomatic + state.infected) - mu * state.recovered;
    return d;
}

namespace {

CompartmentState axpy(const CompartmentState& s, const CompartmentDerivatives& d, double h)
{
    CompartmentState out = s;
    out.susceptible += h * d.susceptible;
    out.vaccinated += h * d.vaccinated;
    out.exposed += h * d.exposed;
    out.asymptomatic += h * d.asymptomatic;
    out.infected += h * d.infected;
    out.recovered += h * d.recovered;
    return out;
}

std::int64_t clamp_nonnegative(CompartmentState& s)
{
    std::int64_t events = 0;
    for (double* field : {&s.susceptible, &s.vaccinated, &s.exposed, &s.asymptomatic, &s.infected,
                          &s.recovered}) {
        if (*field < 0.0) {
            *field = 0.0;
            ++events;
        }
    }
    return events;
}

bool finite(const CompartmentState& s)
{
    return std::isfinite(s.susceptible) && std::isfinite(s.vaccinated) && std::isfinite(s.exposed) &&
           std::isfinite(s.asymptomatic) && std::isfinite(s.infected) && std::isfinite(s.recovered);
}

}  // namespace

IntegrationResult integrate_week(const EpiParams& params, const BehaviorRates& behavior,
                                 const CompartmentState& state, int substeps_per_day)
{
    if (substeps_per_day < 1) {
        throw std::invalid_argument("substeps_per_day must be >= 1");
    }
    const double h = 1.0 / static_cast<double>(substeps_per_day);
    IntegrationResult result{state, 0};

    const int steps = 7 * substeps_per_day;
    for (int i = 0; i < steps; ++i) {
        const CompartmentState& y = result.state;
        const CompartmentDerivatives k1 = sveair_derivatives(params, behavior, y);
        const CompartmentDerivatives k2 = sveair_derivatives(params, behavior, axpy(y, k1, 0.5 * h));
        const CompartmentDerivatives k3 = sveair_derivatives(params, behavior, axpy(y, k2, 0.5 * h));
        const CompartmentDerivatives k4 = sveair_derivatives(params, behavior, axpy(y, k3, h));

        CompartmentState next = y;
        next.susceptible += h / 6.0 * (k1.susceptible + 2.0 * k2.susceptible + 2.0 * k3.susceptible + k4.susceptible);
        next.vaccinated += h / 6.0 * (k1.vaccinated + 2.0 * k2.vaccinated + 2.0 * k3.vaccinated + k4.vaccinated);
        next.exposed += h / 6.0 * (k1.exposed + 2.0 * k2.exposed + 2.0 * k3.exposed + k4.exposed);
        next.asymptomatic += h / 6.0 * (k1.asymptomatic + 2.0 * k2.asymptomatic + 2.0 * k3.asymptomatic + k4.asymptomatic);
        next.infected += h / 6.0 * (k1.infected + 2.0 * k2.infected + 2.0 * k3.infected + k4.infected);
        next.recovered += h / 6.0 * (k1.recovered + 2.0 * k2.recovered + 2.0 * k3.recovered + k4.recovered);

        result.clamp_events += clamp_nonnegative(next);
        if (!finite(next)) {
            throw std::runtime_error("integrate_week: integration diverged to non-finite state");
        }
        result.state = next;
    }
    return result;
}

double r0(const EpiParams& params)
{
    const double beta = params.base_transmission *
                        (params.symptomatic_fraction +
                         params.asymptomatic_infectiousness * (1.0 - params.symptomatic_fraction));
    const double mu = params.natural_death_rate;
    return beta * params.latency_rate /
           ((params.latency_rate + mu) * (params.recovery_rate + mu));
}

double r_control(const EpiParams& params, const BehaviorRates& behavior)
{
    const double mu = params.natural_death_rate;
    const double psi = behavior.vaccination_rate;
    const double denominator = psi + mu;
    if (denominator <= 0.0) {
        throw std::domain_error("r_control: psi + mu must be positive");
    }
    const double factor = ((1.0 - params.vaccine_efficacy) * psi +
                           (1.0 - behavior.masking_rate) * mu) /
                          denominator;
    return r0(params) * factor;
}

HerdImmunityThreshold herd_immunity_threshold(const EpiParams& params, double masking_rate)
{
    const double basic = r0(params);
    const double denominator = 1.0 - basic * (1.0 - params.vaccine_efficacy);
    if (denominator == 0.0) {
        throw std::domain_error("herd_immunity_threshold: degenerate denominator");
    }
    HerdImmunityThreshold out;
    out.psi_hi = params.natural_death_rate * (basic * (1.0 - masking_rate) - 1.0) / denominator;
    out.valid = basic > 1.0 && basic < 1.0 / (1.0 - params.vaccine_efficacy);
    return out;
}

double hospitalization(const EpiParams& params, const CompartmentState& state)
{
    return params.hospitalization_ratio * state.infected;
}

}  // namespace episignal
