#include "episignal/policy.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace episignal;

namespace {

EstimatedModel outbreak_model()
{
    EstimatedModel model;
    model.params = EpiParams{};  // paper baseline
    model.state.susceptible = 9500.0;
    model.state.exposed = 120.0;
    model.state.asymptomatic = 60.0;
    model.state.infected = 100.0;
    model.state.recovered = 220.0;
    model.believed_vaccination = 0.05;
    model.believed_masking = 0.10;
    model.observed_hospitalization = 12.0;
    model.target_decay = 0.2;
    model.substeps_per_day = 10;
    return model;
}

PolicyState default_policy()
{
    PolicyState state;
    state.recommended_vaccination = 0.05;
    state.recommended_masking = 0.10;
    return state;
}

}  // namespace

TEST_CASE("distortion")
{
    CHECK(distortion(7.5, 7.5) == 0.0);
    CHECK(distortion(7.5, 5.0) == doctest::Approx(6.25).epsilon(1e-12));
    CHECK_THROWS_AS(distortion(-1.0, 0.0), std::invalid_argument);

    SUBCASE("weighted variant reduces to the scalar form under point masses")
    {
        const StatusDistribution point{0.0, 1.0, 0.0, 0.0};
        const std::vector<std::array<double, kNumStatuses>> weights = {{1.0, 1.0, 1.0, 1.0}};
        const std::vector<std::array<double, kNumStatuses>> sq_error = {
            {0.0, 6.25, 0.0, 0.0}};
        CHECK(weighted_distortion(point, weights, sq_error) ==
              doctest::Approx(distortion(7.5, 5.0)).epsilon(1e-12));
    }
    SUBCASE("weighted variant averages across beliefs")
    {
        const StatusDistribution posterior{0.5, 0.5, 0.0, 0.0};
        const std::vector<std::array<double, kNumStatuses>> weights = {{1.0, 1.0, 1.0, 1.0}};
        const std::vector<std::array<double, kNumStatuses>> sq_error = {{2.0, 4.0, 0.0, 0.0}};
        CHECK(weighted_distortion(posterior, weights, sq_error) ==
              doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("adaptive update")
{
    const EstimatedModel model = outbreak_model();
    const PolicyState state = default_policy();

    SUBCASE("identity below the threshold")
    {
        DistortionRecord record;
        record.observed_hospitalization = 5.0;
        record.predicted_hospitalization = 5.2;
        record.distortion = distortion(5.0, 5.2);
        record.threshold = 1.0;
        const PolicyState next = adaptive_update(state, record, model, state.step_size);
        CHECK(next.vaccination_correction == state.vaccination_correction);
        CHECK(next.masking_correction == state.masking_correction);
        CHECK(next.recommended_vaccination == state.recommended_vaccination);
        CHECK(next.recommended_masking == state.recommended_masking);
    }
    SUBCASE("under-prediction pushes protective corrections up")
    {
        DistortionRecord record;
        record.observed_hospitalization = model.observed_hospitalization;
        record.predicted_hospitalization = 5.0;
        record.distortion = distortion(record.observed_hospitalization, 5.0);
        record.threshold = 1.0;
        const PolicyState next = adaptive_update(state, record, model, state.step_size);
        // believed masking sits below the vaccine efficacy, so both levers
        // suppress predicted infections and both corrections should rise
        CHECK(next.vaccination_correction > 0.0);
        CHECK(next.masking_correction > 0.0);
    }
    SUBCASE("recommendations never escape the caps")
    {
        PolicyState capped = state;
        capped.masking_correction = 1.4;
        capped.vaccination_correction = 1.4;
        DistortionRecord record;
        record.observed_hospitalization = 12.0;
        record.predicted_hospitalization = 2.0;
        record.distortion = distortion(12.0, 2.0);
        record.threshold = 1.0;
        const PolicyState next = adaptive_update(capped, record, model, capped.step_size);
        const PolicyState composed =
            compose_recommendations(next, model.believed_vaccination, model.believed_masking);
        CHECK(composed.recommended_vaccination <= composed.vaccination_cap);
        CHECK(composed.recommended_masking <= composed.masking_cap);
        CHECK(composed.recommended_vaccination >= 0.0);
        CHECK(composed.recommended_masking >= 0.0);
    }
    SUBCASE("deterministic for identical inputs")
    {
        DistortionRecord record;
        record.observed_hospitalization = 12.0;
        record.predicted_hospitalization = 5.0;
        record.distortion = distortion(12.0, 5.0);
        record.threshold = 1.0;
        const PolicyState a = adaptive_update(state, record, model, state.step_size);
        const PolicyState b = adaptive_update(state, record, model, state.step_size);
        CHECK(a.vaccination_correction == b.vaccination_correction);
        CHECK(a.masking_correction == b.masking_correction);
    }
    SUBCASE("step halves when distortion grows and recovers when it falls")
    {
        PolicyState tracked = state;
        tracked.last_distortion = 10.0;
        DistortionRecord worse;
        worse.observed_hospitalization = 12.0;
        worse.predicted_hospitalization = 5.0;
        worse.distortion = 49.0;
        worse.threshold = 1.0;
        const PolicyState halved = adaptive_update(tracked, worse, model, tracked.step_size);
        CHECK(halved.step_size == doctest::Approx(0.5 * tracked.step_size));

        PolicyState improving = halved;
        DistortionRecord better = worse;
        better.distortion = 20.0;
        const PolicyState recovered = adaptive_update(improving, better, model, improving.step_size);
        CHECK(recovered.step_size > halved.step_size);
        CHECK(recovered.step_size <= recovered.base_step_size);
    }
}

TEST_CASE("gradient sanity")
{
    const EstimatedModel model = outbreak_model();
    const PolicyState state = default_policy();

    const auto gradient = [&](double h) {
        const double up = predicted_tracking_distortion(state, model, h, 0.0);
        const double down = predicted_tracking_distortion(state, model, -h, 0.0);
        return (up - down) / (2.0 * h);
    };
    const double coarse = gradient(1e-4);
    const double fine = gradient(5e-5);
    CHECK(std::abs(coarse - fine) / std::max(1.0, std::abs(fine)) < 1e-6);
}

TEST_CASE("random policy")
{
    const PolicyState state = default_policy();

    SUBCASE("zero noise is the identity")
    {
        std::mt19937_64 rng(1);
        const PolicyState next = random_policy(state, 0.0, rng);
        CHECK(next.recommended_vaccination == state.recommended_vaccination);
        CHECK(next.recommended_masking == state.recommended_masking);
    }
    SUBCASE("same seed gives the same perturbation")
    {
        std::mt19937_64 rng_a(42);
        std::mt19937_64 rng_b(42);
        const PolicyState a = random_policy(state, 0.05, rng_a);
        const PolicyState b = random_policy(state, 0.05, rng_b);
        CHECK(a.recommended_vaccination == b.recommended_vaccination);
        CHECK(a.recommended_masking == b.recommended_masking);
    }
    SUBCASE("perturbations have zero empirical mean")
    {
        // start mid-range so clamping cannot bias the draws
        PolicyState mid = state;
        mid.recommended_vaccination = 0.1;
        mid.recommended_masking = 0.45;
        std::mt19937_64 rng(7);
        const int n = 10000;
        const double sigma = 0.01;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const PolicyState next = random_policy(mid, sigma, rng);
            sum += next.recommended_masking - mid.recommended_masking;
        }
        const double mean = sum / n;
        const double bound = 3.0 * sigma * mid.masking_cap / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(mean) < bound);
    }
}

TEST_CASE("no-interaction policy")
{
    const BehaviorRates baseline{0.005, 0.01};
    const PolicyState state = no_interaction_policy(baseline);
    CHECK(state.recommended_vaccination == doctest::Approx(0.005));
    CHECK(state.recommended_masking == doctest::Approx(0.01));
    CHECK(state.vaccination_correction == 0.0);
    CHECK(state.masking_correction == 0.0);
}
