#include "episignal/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace episignal;

namespace {

ScenarioConfig low_baseline()
{
    ScenarioConfig config;
    config.baseline = BehaviorRates{0.005, 0.01};
    config.epi.birth_rate = config.epi.natural_death_rate * config.population;
    return config;
}

ScenarioConfig high_baseline()
{
    ScenarioConfig config;
    config.baseline = BehaviorRates{0.05, 0.10};
    config.epi.birth_rate = config.epi.natural_death_rate * config.population;
    return config;
}

}  // namespace

TEST_CASE("smoothing filters")
{
    SmoothingParams params;

    SUBCASE("constant series unchanged by both filters")
    {
        const std::vector<double> series(12, 3.5);
        for (double value : smooth_series(series, SmoothingKind::kSavitzkyGolay, params)) {
            CHECK(value == doctest::Approx(3.5).epsilon(1e-12));
        }
        for (double value : smooth_series(series, SmoothingKind::kExponential, params)) {
            CHECK(value == doctest::Approx(3.5).epsilon(1e-12));
        }
    }
    SUBCASE("linear ramp reproduced exactly by Savitzky-Golay")
    {
        std::vector<double> ramp;
        for (int i = 0; i < 20; ++i) {
            ramp.push_back(0.7 * i - 2.0);
        }
        const std::vector<double> smooth =
            smooth_series(ramp, SmoothingKind::kSavitzkyGolay, params);
        for (std::size_t i = 0; i < ramp.size(); ++i) {
            CHECK(smooth[i] == doctest::Approx(ramp[i]).epsilon(1e-10));
        }
    }
    SUBCASE("exponential smoothing with factor one is the identity")
    {
        params.factor = 1.0;
        std::vector<double> series{3.0, -1.0, 4.0, 1.0, 5.0};
        CHECK(smooth_series(series, SmoothingKind::kExponential, params) == series);
    }
    SUBCASE("window longer than the series is rejected")
    {
        params.window = 7;
        const std::vector<double> series{1.0, 2.0, 3.0};
        CHECK_THROWS_AS(smooth_series(series, SmoothingKind::kSavitzkyGolay, params),
                        std::invalid_argument);
    }
    SUBCASE("savgol attenuates a noisy series")
    {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> series;
        double wiggle = 0.0;
        for (int i = 0; i < 26; ++i) {
            series.push_back(10.0 + noise(rng));
            wiggle += std::abs(series.back() - 10.0);
        }
        const std::vector<double> smooth =
            smooth_series(series, SmoothingKind::kSavitzkyGolay, params);
        double smooth_wiggle = 0.0;
        for (double value : smooth) {
            smooth_wiggle += std::abs(value - 10.0);
        }
        CHECK(smooth_wiggle < wiggle);
    }
}

TEST_CASE("population report")
{
    BehaviorProfile profile;
    profile.type_distribution = status_distribution_from_fractions(0.3, 0.2);
    profile.non_responsive_share = 0.3;

    CompartmentState state;
    state.susceptible = 6700.0;
    state.vaccinated = 3000.0;
    state.infected = 300.0;

    SUBCASE("fully silent population")
    {
        profile.non_responsive_share = 1.0;
        const ReportAggregate report =
            population_report(profile, per_bit_strategy(0.0, 0.0), state, 0.0, nullptr);
        CHECK(report.responder_count == 0.0);
        CHECK(report.silent_count == doctest::Approx(10000.0));
        CHECK(report.deception.overall_rate == doctest::Approx(1.0));
    }
    SUBCASE("separating reports the true fractions exactly in expectation")
    {
        profile.non_responsive_share = 0.0;
        const ReportAggregate report =
            population_report(profile, per_bit_strategy(0.0, 0.0), state, 0.0, nullptr);
        CHECK(report.claimed_vaccination == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(report.claimed_masking == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(report.deception.overall == doctest::Approx(0.0));
    }
    SUBCASE("sampled separating reports concentrate within binomial bounds")
    {
        profile.non_responsive_share = 0.0;
        std::mt19937_64 rng(99);
        const ReportAggregate report =
            population_report(profile, per_bit_strategy(0.0, 0.0), state, 0.0, &rng);
        const double n = report.responder_count;
        const double sigma = std::sqrt(0.3 * 0.7 / n);
        CHECK(std::abs(report.claimed_vaccination - 0.3) < 3.0 * sigma);
    }
    SUBCASE("pooling sends only the compliant message")
    {
        const ReportAggregate report =
            population_report(profile, per_bit_strategy(1.0, 1.0), state, 0.0, nullptr);
        CHECK(report.message_share[0] == doctest::Approx(1.0).epsilon(1e-12));
        // non-compliant responders all deceive
        const double noncompliant_share = 1.0 - 0.3 * 0.2;
        CHECK(report.deception.overall_rate >=
              0.7 * noncompliant_share * 0.5 - 1e-12);
    }
    SUBCASE("recovered individuals are barred from deception")
    {
        profile.non_responsive_share = 0.0;
        const ReportAggregate lying =
            population_report(profile, per_bit_strategy(1.0, 1.0), state, 0.0, nullptr);
        const ReportAggregate immune =
            population_report(profile, per_bit_strategy(1.0, 1.0), state, 0.5, nullptr);
        CHECK(immune.deception.overall == doctest::Approx(0.5 * lying.deception.overall));
    }
}

TEST_CASE("weekly loop determinism and contracts")
{
    ScenarioConfig config = low_baseline();
    config.horizon_weeks = 8;
    config.num_runs = 1;
    config.process_noise_sigma = 0.05;
    config.sampled_reports = true;

    SUBCASE("same seed bit-identical")
    {
        const RunResult a = weekly_loop(config, 123);
        const RunResult b = weekly_loop(config, 123);
        REQUIRE(a.weeks.size() == b.weeks.size());
        for (std::size_t w = 0; w < a.weeks.size(); ++w) {
            for (std::size_t i = 0; i < metric_names().size(); ++i) {
                CHECK(metric_value(a.weeks[w], i) == metric_value(b.weeks[w], i));
            }
        }
    }
    SUBCASE("different seeds differ")
    {
        const RunResult a = weekly_loop(config, 123);
        const RunResult b = weekly_loop(config, 124);
        bool any_difference = false;
        for (std::size_t w = 0; w < a.weeks.size(); ++w) {
            if (a.weeks[w].i_frac != b.weeks[w].i_frac) {
                any_difference = true;
            }
        }
        CHECK(any_difference);
    }
    SUBCASE("fractions stay in bounds")
    {
        const RunResult run = weekly_loop(config, 5);
        for (const WeeklyMetrics& m : run.weeks) {
            CHECK(m.vaccination_coverage >= 0.0);
            CHECK(m.vaccination_coverage <= 1.0);
            CHECK(m.mask_coverage >= 0.0);
            CHECK(m.mask_coverage <= 1.0);
            CHECK(m.hosp_frac >= 0.0);
            CHECK(m.deception_overall >= 0.0);
            CHECK(m.deception_overall <= 1.0);
        }
    }
}

TEST_CASE("no-interaction baseline stays endemic")
{
    for (ScenarioConfig config : {low_baseline(), high_baseline()}) {
        config.policy = PolicyKind::kNoInteraction;
        config.num_runs = 1;
        const RunResult run = weekly_loop(config, 1);
        REQUIRE(run.valid);
        for (const WeeklyMetrics& m : run.weeks) {
            CHECK(m.rc > 1.0);
            // recommendations frozen at the baseline
            CHECK(m.psi_recommended == doctest::Approx(config.baseline.vaccination_rate));
            CHECK(m.eta_recommended == doctest::Approx(config.baseline.masking_rate));
        }
        CHECK_FALSE(run.week_control.has_value());
    }
}

TEST_CASE("peak hospitalization is exactly linear in xi with a frozen policy")
{
    ScenarioConfig config = low_baseline();
    config.policy = PolicyKind::kNoInteraction;
    config.num_runs = 1;

    const RunResult base = weekly_loop(config, 1);
    ScenarioConfig doubled = config;
    doubled.epi.hospitalization_ratio *= 2.0;
    const RunResult twice = weekly_loop(doubled, 1);
    CHECK(twice.peak_hospitalization_fraction ==
          doctest::Approx(2.0 * base.peak_hospitalization_fraction).epsilon(1e-12));
}

TEST_CASE("deception ordering across equilibria")
{
    ScenarioConfig config = low_baseline();
    config.horizon_weeks = 12;
    config.num_runs = 1;

    auto run_kind = [&](EquilibriumKind kind) {
        ScenarioConfig c = config;
        c.equilibrium = kind;
        return weekly_loop(c, 3);
    };
    const RunResult separating = run_kind(EquilibriumKind::kSeparating);
    const RunResult partial = run_kind(EquilibriumKind::kPartialPooling);
    const RunResult pooling = run_kind(EquilibriumKind::kPooling);

    for (int w = 0; w < config.horizon_weeks; ++w) {
        CHECK(pooling.weeks[w].deception_overall > partial.weeks[w].deception_overall);
        CHECK(partial.weeks[w].deception_overall > separating.weeks[w].deception_overall);
        // deterministic reporting pins separating at the silent share exactly
        CHECK(separating.weeks[w].deception_overall ==
              doctest::Approx(config.nonresponsive_share).epsilon(1e-12));
    }
}

TEST_CASE("monte carlo aggregation")
{
    ScenarioConfig config = low_baseline();
    config.horizon_weeks = 6;

    SUBCASE("single run summary equals the run")
    {
        config.num_runs = 1;
        const RunResult run = weekly_loop(config, config.seed_base);
        const SummaryStats stats = monte_carlo(config);
        REQUIRE(stats.mean.size() == run.weeks.size());
        for (std::size_t w = 0; w < run.weeks.size(); ++w) {
            CHECK(stats.mean[w].rc == doctest::Approx(run.weeks[w].rc).epsilon(1e-12));
            CHECK(stats.stddev[w].rc == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("deterministic mode collapses the spread")
    {
        config.num_runs = 5;
        config.process_noise_sigma = 0.0;
        config.sampled_reports = false;
        const SummaryStats stats = monte_carlo(config);
        for (const WeeklyMetrics& sd : stats.stddev) {
            CHECK(sd.i_frac == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(sd.rc == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
        SUBCASE("stochastic mode produces spread")
    {
        config.num_runs = 5;
        config.process_noise_sigma = 0.05;
        config.sampled_reports = true;
        const SummaryStats stats = monte_carlo(config);
        double total_sd = 0.0;
        for (const WeeklyMetrics& sd : stats.stddev) {
            total_sd += sd.i_frac;
        }
        CHECK(total_sd > 0.0);
    }
}

TEST_CASE("adaptive coverage dominates no-interaction by week ten")
{
    ScenarioConfig adaptive = low_baseline();
    adaptive.horizon_weeks = 10;
    adaptive.num_runs = 4;
    adaptive.process_noise_sigma = 0.05;
    adaptive.sampled_reports = true;

    ScenarioConfig frozen = adaptive;
    frozen.policy = PolicyKind::kNoInteraction;

    const SummaryStats active = monte_carlo(adaptive);
    const SummaryStats baseline = monte_carlo(frozen);
    CHECK(active.mean.back().vaccination_coverage >=
          baseline.mean.back().vaccination_coverage - 1e-9);
    CHECK(active.mean.back().mask_coverage >= baseline.mean.back().mask_coverage - 1e-9);
}

TEST_CASE("short horizons smooth without error")
{
    for (int weeks : {1, 2, 3, 4}) {
        ScenarioConfig config = low_baseline();
        config.horizon_weeks = weeks;
        config.num_runs = 1;
        const RunResult run = weekly_loop(config, 9);
        REQUIRE(run.valid);
        CHECK(static_cast<int>(run.weeks.size()) == weeks);
    }
}

TEST_CASE("per-bit lie rates")
{
    const StatusDistribution pi = status_distribution_from_fractions(0.3, 0.2);
    const PerBitLieRates honest = per_bit_lie_rates(per_bit_strategy(0.0, 0.0), pi);
    CHECK(honest.vaccine == doctest::Approx(0.0));
    CHECK(honest.mask == doctest::Approx(0.0));
    const PerBitLieRates pooled = per_bit_lie_rates(per_bit_strategy(1.0, 1.0), pi);
    CHECK(pooled.vaccine == doctest::Approx(1.0));
    CHECK(pooled.mask == doctest::Approx(1.0));
    const PerBitLieRates banded = per_bit_lie_rates(per_bit_strategy(0.1, 0.6), pi);
    CHECK(banded.vaccine == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(banded.mask == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("weekly metrics carry the strategy and belief matrices")
{
    ScenarioConfig config = low_baseline();
    config.horizon_weeks = 4;
    config.num_runs = 1;
    config.equilibrium = EquilibriumKind::kPooling;
    const RunResult run = weekly_loop(config, 2);
    REQUIRE(run.valid);
    for (const WeeklyMetrics& m : run.weeks) {
        for (int c = 0; c < kNumStatuses; ++c) {
            double row = 0.0;
            for (int msg = 0; msg < kNumMessages; ++msg) {
                row += m.strategy_flat[4 * c + msg];
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
        }
        // early pooling rows concentrate on the compliant message
        CHECK(m.strategy_flat[4 * 3 + 0] > 0.9);
    }
    CHECK(metric_names().size() == 21 + 32);
}
