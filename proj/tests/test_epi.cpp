#include "episignal/epi.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace episignal;

namespace {

EpiParams table_baseline()
{
    EpiParams params;
    params.natural_death_rate = 1.0 / 27375.0;
    params.birth_rate = params.natural_death_rate * 10000.0;
    params.base_transmission = 0.35;
    params.asymptomatic_infectiousness = 0.5;
    params.symptomatic_fraction = 0.67;
    params.latency_rate = 1.0 / 5.0;
    params.recovery_rate = 1.0 / 10.0;
    params.vaccine_efficacy = 0.45;
    params.hospitalization_ratio = 0.05;
    return params;
}

CompartmentState outbreak_state()
{
    CompartmentState state;
    state.susceptible = 9850.0;
    state.infected = 150.0;
    return state;
}

}  // namespace

TEST_CASE("force of infection")
{
    EpiParams params = table_baseline();
    CompartmentState state;
    state.susceptible = 10000.0;

    SUBCASE("no infectious individuals")
    {
        CHECK(force_of_infection(params, state) == 0.0);
    }
    SUBCASE("symptomatic only")
    {
        state.susceptible = 9850.0;
        state.infected = 150.0;
        CHECK(force_of_infection(params, state) == doctest::Approx(0.00525).epsilon(1e-12));
    }
    SUBCASE("mixed symptomatic and asymptomatic")
    {
        state.susceptible = 9700.0;
        state.infected = 100.0;
        state.asymptomatic = 200.0;
        CHECK(force_of_infection(params, state) == doctest::Approx(0.007).epsilon(1e-12));
    }
    SUBCASE("zero population is degenerate")
    {
        CompartmentState empty;
        CHECK_THROWS_AS(force_of_infection(params, empty), std::domain_error);
    }
}

TEST_CASE("sveair derivatives")
{
    EpiParams params = table_baseline();

    SUBCASE("disease-free stationary point")
    {
        CompartmentState state;
        state.susceptible = 10000.0;
        BehaviorRates behavior{0.0, 0.0};
        const CompartmentDerivatives d = sveair_derivatives(params, behavior, state);
        CHECK(d.susceptible == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("exposure to infection flux")
    {
        CompartmentState state;
        state.susceptible = 9900.0;
        state.exposed = 100.0;
        BehaviorRates behavior{0.0, 0.0};
        const CompartmentDerivatives d = sveair_derivatives(params, behavior, state);
        // I' = k p E - (gamma + mu) I with I = 0
        CHECK(d.infected == doctest::Approx(0.2 * 0.67 * 100.0).epsilon(1e-12));
    }
    SUBCASE("derivative sum equals Lambda - mu K")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> mass(0.0, 4000.0);
        for (int trial = 0; trial < 50; ++trial) {
            CompartmentState state;
            state.susceptible = mass(rng);
            state.vaccinated = mass(rng);
            state.exposed = mass(rng);
            state.asymptomatic = mass(rng);
            state.infected = mass(rng);
            state.recovered = mass(rng);
            BehaviorRates behavior{0.07, 0.4};
            const CompartmentDerivatives d = sveair_derivatives(params, behavior, state);
            const double expected = params.birth_rate - params.natural_death_rate * state.total();
            CHECK(d.sum() == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("weekly integration")
{
    EpiParams params = table_baseline();
    BehaviorRates baseline{0.05, 0.10};

    SUBCASE("disease-free equilibrium is stationary")
    {
        CompartmentState state;
        state.susceptible = 10000.0;
        BehaviorRates none{0.0, 0.0};
        const IntegrationResult result = integrate_week(params, none, state);
        CHECK(result.state.susceptible == doctest::Approx(10000.0).epsilon(1e-10));
        CHECK(result.clamp_events == 0);
    }
    SUBCASE("step halving agrees to 1e-6 relative")
    {
        const CompartmentState state = outbreak_state();
        const double coarse = integrate_week(params, baseline, state, 10).state.infected;
        const double fine = integrate_week(params, baseline, state, 20).state.infected;
        CHECK(std::abs(coarse - fine) / fine < 1e-6);
    }
    SUBCASE("baseline outbreak grows while Rc exceeds one")
    {
        const CompartmentState state = outbreak_state();
        CHECK(r_control(params, baseline) > 1.0);
        // I alone dips first (gamma outflow while E fills), so the growth
        // check reads the infectious mass, then I after the transient
        const CompartmentState week1 = integrate_week(params, baseline, state).state;
        CHECK(week1.exposed + week1.asymptomatic + week1.infected >
              state.exposed + state.asymptomatic + state.infected);
        const CompartmentState week2 = integrate_week(params, baseline, week1).state;
        CHECK(week2.infected > state.infected);
    }
    SUBCASE("fourth-order convergence factor of at least 8")
    {
        const CompartmentState state = outbreak_state();
        const double reference = integrate_week(params, baseline, state, 64).state.infected;
        const double error_h = std::abs(integrate_week(params, baseline, state, 2).state.infected - reference);
        const double error_h2 = std::abs(integrate_week(params, baseline, state, 4).state.infected - reference);
        CHECK(error_h / error_h2 >= 8.0);
    }
    SUBCASE("population conserved over 26 weeks")
    {
        CompartmentState state = outbreak_state();
        const double initial_total = state.total();
        std::int64_t clamps = 0;
        for (int week = 0; week < 26; ++week) {
            const IntegrationResult result = integrate_week(params, baseline, state);
            clamps += result.clamp_events;
            state = result.state;
            CHECK(state.susceptible >= 0.0);
            CHECK(state.infected >= 0.0);
        }
        CHECK(std::abs(state.total() - initial_total) / initial_total < 1e-8);
        CHECK(clamps == 0);
    }
}

TEST_CASE("reproduction numbers")
{
    EpiParams params = table_baseline();

    SUBCASE("baseline R0")
    {
        CHECK(r0(params) == doctest::Approx(2.921).epsilon(2e-4));
    }
    SUBCASE("no transmission, no reproduction")
    {
        params.base_transmission = 0.0;
        CHECK(r0(params) == 0.0);
    }
    SUBCASE("linear in beta0")
    {
        EpiParams doubled = params;
        doubled.base_transmission *= 2.0;
        CHECK(r0(doubled) == doctest::Approx(2.0 * r0(params)).epsilon(1e-12));
    }
    SUBCASE("Rc boundary identities are exact")
    {
        CHECK(r_control(params, BehaviorRates{0.0, 0.0}) == r0(params));
        CHECK(r_control(params, BehaviorRates{0.0, 1.0}) == 0.0);
    }
    SUBCASE("Rc at the high baseline")
    {
        CHECK(r_control(params, BehaviorRates{0.05, 0.10}) == doctest::Approx(1.607).epsilon(5e-4));
    }
    SUBCASE("Rc monotone in psi and eta for eta <= delta")
    {
        // the formula trades masking protection for vaccine protection, so
        // psi-monotonicity holds on the eta <= delta region
        const int grid = 20;
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j + 1 < grid; ++j) {
                const double eta = params.vaccine_efficacy * i / (grid - 1);
                const double psi_a = 0.2 * j / (grid - 1);
                const double psi_b = 0.2 * (j + 1) / (grid - 1);
                CHECK(r_control(params, BehaviorRates{psi_b, eta}) <=
                      r_control(params, BehaviorRates{psi_a, eta}) + 1e-12);
            }
        }
        for (int i = 0; i + 1 < grid; ++i) {
            const double eta_a = 0.9 * i / (grid - 1);
            const double eta_b = 0.9 * (i + 1) / (grid - 1);
            CHECK(r_control(params, BehaviorRates{0.01, eta_b}) <
                  r_control(params, BehaviorRates{0.01, eta_a}));
        }
    }
}

TEST_CASE("herd immunity threshold")
{
    EpiParams params = table_baseline();

    SUBCASE("vanishing numerator")
    {
        // scale beta0 so that R0 (1 - eta) = 1
        EpiParams scaled = params;
        scaled.base_transmission = params.base_transmission / r0(params);
        const HerdImmunityThreshold threshold = herd_immunity_threshold(scaled, 0.0);
        CHECK(threshold.psi_hi == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("interior example")
    {
        EpiParams scaled = params;
        scaled.base_transmission = params.base_transmission * 1.5 / r0(params);
        const HerdImmunityThreshold threshold = herd_immunity_threshold(scaled, 0.0);
        const double mu = params.natural_death_rate;
        CHECK(threshold.valid);
        CHECK(threshold.psi_hi == doctest::Approx(mu * 0.5 / 0.175).epsilon(1e-9));
    }
    SUBCASE("baseline parameters sit outside the validity interval")
    {
        const HerdImmunityThreshold threshold = herd_immunity_threshold(params, 0.0);
        CHECK_FALSE(threshold.valid);  // R0 ~ 2.92 > 1/(1-delta) ~ 1.82
    }
}

TEST_CASE("hospitalization observable")
{
    EpiParams params = table_baseline();
    CompartmentState state = outbreak_state();

    CHECK(hospitalization(params, CompartmentState{1.0, 0, 0, 0, 0, 0}) == 0.0);
    CHECK(hospitalization(params, state) == doctest::Approx(7.5).epsilon(1e-12));
    EpiParams doubled = params;
    doubled.hospitalization_ratio *= 2.0;
    CHECK(hospitalization(doubled, state) == doctest::Approx(15.0).epsilon(1e-12));
}
