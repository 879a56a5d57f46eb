#include "episignal/config.hpp"
#include "episignal/output.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace episignal;

TEST_CASE("config defaults follow the baseline table")
{
    const ParsedScenario parsed = parse_config("");
    const ScenarioConfig& cfg = parsed.scenario;
    CHECK(cfg.epi.natural_death_rate == doctest::Approx(1.0 / 27375.0).epsilon(1e-12));
    CHECK(cfg.epi.base_transmission == doctest::Approx(0.35));
    CHECK(cfg.epi.vaccine_efficacy == doctest::Approx(0.45));
    CHECK(cfg.epi.recovery_rate == doctest::Approx(0.1));
    CHECK(cfg.epi.latency_rate == doctest::Approx(0.2));
    CHECK(cfg.epi.asymptomatic_infectiousness == doctest::Approx(0.5));
    CHECK(cfg.epi.symptomatic_fraction == doctest::Approx(0.67));
    CHECK(cfg.epi.hospitalization_ratio == doctest::Approx(0.05));
    CHECK(cfg.game.vaccine_lie_incentive == doctest::Approx(1.0));
    CHECK(cfg.game.mask_lie_incentive == doctest::Approx(0.5));
    CHECK(cfg.game.semantic_weight == doctest::Approx(0.2));
    CHECK(cfg.game.economic_factor == doctest::Approx(0.5));
    CHECK(cfg.baseline.vaccination_rate == doctest::Approx(0.05));
    CHECK(cfg.baseline.masking_rate == doctest::Approx(0.10));
    CHECK(cfg.initial_infected == doctest::Approx(150.0));
    CHECK(cfg.nonresponsive_share == doctest::Approx(0.3));
    CHECK(cfg.population == doctest::Approx(10000.0));
    CHECK(cfg.horizon_weeks == 26);
    CHECK(cfg.num_runs == 50);
    // Lambda = mu K keeps the population constant
    CHECK(cfg.epi.birth_rate ==
          doctest::Approx(cfg.epi.natural_death_rate * cfg.population).epsilon(1e-12));
}

TEST_CASE("config validation errors")
{
    SUBCASE("range violation names the key")
    {
        try {
            parse_config("[epi]\ndelta = 1.5\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("delta") != std::string::npos);
        }
    }
    SUBCASE("unknown key rejected with its location")
    {
        try {
            parse_config("[epi]\nnot_a_key = 1\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(err.line() == 2);
            CHECK(std::string(err.what()).find("not_a_key") != std::string::npos);
        }
    }
    SUBCASE("unknown section rejected")
    {
        CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n"), ConfigError);
    }
    SUBCASE("malformed line rejected")
    {
        CHECK_THROWS_AS(parse_config("[epi]\nmu 3\n"), ConfigError);
    }
    SUBCASE("bad enum value rejected")
    {
        CHECK_THROWS_AS(parse_config("[simulation]\nequilibrium = mixed\n"), ConfigError);
    }
}

TEST_CASE("config round trip is idempotent on the canonical form")
{
    const std::string text =
        "[epi]\nbeta0 = 0.4\n\n[simulation]\nequilibrium = pooling\nT_weeks = 12\n"
        "[policy]\nkind = random\nnoise_scale = 0.03\n";
    const ParsedScenario once = parse_config(text);
    const std::string canonical = serialize_config(once);
    const ParsedScenario twice = parse_config(canonical);
    CHECK(serialize_config(twice) == canonical);
    CHECK(twice.scenario.epi.base_transmission == doctest::Approx(0.4));
    CHECK(twice.scenario.equilibrium == EquilibriumKind::kPooling);
    CHECK(twice.scenario.policy == PolicyKind::kRandom);
}

TEST_CASE("csv formatting")
{
    SUBCASE("plain fields unquoted")
    {
        CHECK(csv_escape("abc") == "abc");
        CHECK(csv_escape("1.25") == "1.25");
    }
    SUBCASE("reserved characters quoted and doubled")
    {
        CHECK(csv_escape("a,b") == "\"a,b\"");
        CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    }
    SUBCASE("doubles round trip at 17 significant digits")
    {
        for (double value : {0.1, 1.0 / 3.0, 2.920899, 1e-300, 123456789.123456789}) {
            const std::string text = format_double(value);
            CHECK(std::stod(text) == value);
        }
    }
}

TEST_CASE("atomic file writing")
{
    const std::string path = "episignal_test_atomic.txt";
    write_file_atomic(path, "hello\n");
    std::ifstream in(path);
    std::string content;
    std::getline(in, content);
    CHECK(content == "hello");
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("weekly csv and long format")
{
    ScenarioConfig config;
    config.baseline = BehaviorRates{0.005, 0.01};
    config.horizon_weeks = 3;
    config.num_runs = 2;

    const std::vector<RunResult> runs = run_scenario_runs(config);
    const SummaryStats stats = summarize_runs(config, runs);
    const std::string csv = weekly_csv(runs, stats);

    SUBCASE("header and row counts")
    {
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        CHECK(line.rfind("run,week,rc,", 0) == 0);
        int rows = 0;
        while (std::getline(in, line)) {
            if (!line.empty()) ++rows;
        }
        // 2 runs x 3 weeks + 3 mean + 3 std
        CHECK(rows == 12);
    }
    SUBCASE("long format keeps only mean rows")
    {
        const std::string long_format = long_format_from_weekly_csv("demo", csv);
        std::istringstream in(long_format);
        std::string line;
        std::getline(in, line);
        CHECK(line.rfind("scenario,metric,week,value", 0) == 0);
        int rows = 0;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                ++rows;
                CHECK(line.rfind("demo,", 0) == 0);
            }
        }
        CHECK(rows == 3 * static_cast<int>(metric_names().size()));
    }
    SUBCASE("summary json carries the run bookkeeping")
    {
        const std::string json = summary_json("demo", config, stats);
        CHECK(json.find("\"scenario\": \"demo\"") != std::string::npos);
        CHECK(json.find("\"runs_total\": 2") != std::string::npos);
    }
}
