#include "episignal/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace episignal {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, int line, const std::string& key)
{
    std::size_t consumed = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw ConfigError("invalid number for key '" + key + "': " + value, line, key);
    }
    if (consumed != value.size()) {
        throw ConfigError("trailing characters after number for key '" + key + "': " + value, line,
                          key);
    }
    return out;
}

struct Binder {
    std::map<std::string, std::function<void(const std::string&, int)>> setters;

    void number(const std::string& key, double* target)
    {
        setters[key] = [target, key](const std::string& value, int line) {
            *target = parse_number(value, line, key);
        };
    }
    void integer(const std::string& key, int* target)
    {
        setters[key] = [target, key](const std::string& value, int line) {
            const double x = parse_number(value, line, key);
            if (x != std::floor(x)) {
                throw ConfigError("key '" + key + "' must be an integer", line, key);
            }
            *target = static_cast<int>(x);
        };
    }
    void uint64(const std::string& key, std::uint64_t* target)
    {
        setters[key] = [target, key](const std::string& value, int line) {
            const double x = parse_number(value, line, key);
            if (x < 0.0 || x != std::floor(x)) {
                throw ConfigError("key '" + key + "' must be a non-negative integer", line, key);
            }
            *target = static_cast<std::uint64_t>(x);
        };
    }
    void boolean(const std::string& key, bool* target)
    {
        setters[key] = [target, key](const std::string& value, int line) {
            if (value == "true" || value == "1") {
                *target = true;
            } else if (value == "false" || value == "0") {
                *target = false;
            } else {
                throw ConfigError("key '" + key + "' must be true/false", line, key);
            }
        };
    }
};

void check(bool ok, const std::string& key, const std::string& constraint)
{
    if (!ok) {
        throw ConfigError("constraint violation for key '" + key + "': " + constraint, 0, key);
    }
}

}  // namespace

ParsedScenario parse_config(const std::string& text)
{
    ParsedScenario parsed;
    ScenarioConfig& cfg = parsed.scenario;

    // intermediates keyed by their paper symbols
    double gamma_inv_days = 10.0;
    double k_inv_days = 5.0;
    std::string equilibrium = "separating";
    std::string policy = "adaptive";

    std::map<std::string, Binder> sections;
    Binder& epi = sections["epi"];
    epi.number("mu", &cfg.epi.natural_death_rate);
    epi.number("beta0", &cfg.epi.base_transmission);
    epi.number("delta", &cfg.epi.vaccine_efficacy);
    epi.number("gamma_inv_days", &gamma_inv_days);
    epi.number("b", &cfg.epi.asymptomatic_infectiousness);
    epi.number("k_inv_days", &k_inv_days);
    epi.number("p", &cfg.epi.symptomatic_fraction);
    epi.number("xi", &cfg.epi.hospitalization_ratio);

    Binder& game = sections["game"];
    game.number("I_v", &cfg.game.vaccine_lie_incentive);
    game.number("I_m", &cfg.game.mask_lie_incentive);
    game.number("lambda1", &cfg.game.semantic_weight);
    game.number("lambda2", &cfg.game.distortion_weight);
    game.number("a", &cfg.game.economic_factor);
    game.number("alpha_rsa", &cfg.game.rationality);

    Binder& behavior = sections["behavior"];
    behavior.number("psi_init", &cfg.baseline.vaccination_rate);
    behavior.number("eta_init", &cfg.baseline.masking_rate);
    behavior.number("I0", &cfg.initial_infected);
    behavior.number("nonresponsive_share", &cfg.nonresponsive_share);
    behavior.number("vax_lie_min", &cfg.vaccine_lie_band_min);
    behavior.number("vax_lie_max", &cfg.vaccine_lie_band_max);
    behavior.number("mask_lie_min", &cfg.mask_lie_band_min);
    behavior.number("mask_lie_max", &cfg.mask_lie_band_max);
    behavior.number("prior_vaccinated", &cfg.prior_vaccinated);
    behavior.number("prior_masking", &cfg.prior_masking);

    Binder& pol = sections["policy"];
    pol.setters["kind"] = [&policy](const std::string& value, int) { policy = value; };
    pol.number("D_star", &cfg.distortion_threshold);
    pol.number("step_size", &cfg.step_size);
    pol.number("psi_max", &cfg.vaccination_cap);
    pol.number("eta_max", &cfg.masking_cap);
    pol.number("noise_scale", &cfg.noise_scale);
    pol.number("target_decay", &cfg.target_decay);
    pol.number("uptake_rate", &cfg.uptake_rate);
    pol.number("uptake_info_floor", &cfg.uptake_info_floor);
    pol.number("uptake_seed", &cfg.uptake_seed);
    pol.number("correction_cap", &cfg.correction_cap);
    pol.number("prior_adaptation", &cfg.prior_adaptation);
    pol.number("credibility_shrink", &cfg.credibility_shrink);
    pol.number("step_credibility_floor", &cfg.step_credibility_floor);

    Binder& sim = sections["simulation"];
    sim.number("K", &cfg.population);
    sim.integer("T_weeks", &cfg.horizon_weeks);
    sim.integer("n_runs", &cfg.num_runs);
    sim.uint64("seed_base", &cfg.seed_base);
    sim.setters["equilibrium"] = [&equilibrium](const std::string& value, int) {
        equilibrium = value;
    };
    sim.integer("substeps_per_day", &cfg.substeps_per_day);
    sim.number("process_noise_sigma", &cfg.process_noise_sigma);
    sim.boolean("sampled_reports", &cfg.sampled_reports);
    sim.integer("savgol_window", &cfg.savgol_window);
    sim.integer("savgol_order", &cfg.savgol_order);
    sim.number("exp_smoothing_factor", &cfg.exp_smoothing_factor);

    Binder& stress = sections["stress"];
    stress.number("xi_factor", &parsed.stress.ihr_factor);
    stress.number("incentive_factor", &parsed.stress.incentive_factor);
    stress.number("nrs_value", &parsed.stress.nonresponsive_share);
    stress.number("delta_value", &parsed.stress.vaccine_efficacy);

    std::string section;
    std::istringstream stream(text);
    std::string raw_line;
    int line_number = 0;
    while (std::getline(stream, raw_line)) {
        ++line_number;
        std::string line = trim(raw_line);
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line = trim(line.substr(0, comment));
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header", line_number);
            }
            section = trim(line.substr(1, line.size() - 2));
            if (sections.find(section) == sections.end()) {
                throw ConfigError("unknown section '" + section + "'", line_number);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value", line_number);
        }
        if (section.empty()) {
            throw ConfigError("key outside any section", line_number);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        Binder& binder = sections[section];
        const auto setter = binder.setters.find(key);
        if (setter == binder.setters.end()) {
            throw ConfigError("unknown key '" + key + "' in section [" + section + "]",
                              line_number, key);
        }
        setter->second(value, line_number);
    }

    check(gamma_inv_days > 0.0, "gamma_inv_days", "must be > 0");
    check(k_inv_days > 0.0, "k_inv_days", "must be > 0");
    cfg.epi.recovery_rate = 1.0 / gamma_inv_days;
    cfg.epi.latency_rate = 1.0 / k_inv_days;
    // Lambda = mu * K: constant total population
    cfg.epi.birth_rate = cfg.epi.natural_death_rate * cfg.population;

    if (equilibrium == "separating") {
        cfg.equilibrium = EquilibriumKind::kSeparating;
    } else if (equilibrium == "partial_pooling") {
        cfg.equilibrium = EquilibriumKind::kPartialPooling;
    } else if (equilibrium == "pooling") {
        cfg.equilibrium = EquilibriumKind::kPooling;
    } else {
        throw ConfigError("constraint violation for key 'equilibrium': must be one of "
                          "separating|partial_pooling|pooling",
                          0, "equilibrium");
    }
    if (policy == "adaptive") {
        cfg.policy = PolicyKind::kAdaptive;
    } else if (policy == "random") {
        cfg.policy = PolicyKind::kRandom;
    } else if (policy == "none" || policy == "no_interaction") {
        cfg.policy = PolicyKind::kNoInteraction;
    } else {
        throw ConfigError("constraint violation for key 'kind': must be one of "
                          "adaptive|random|none",
                          0, "kind");
    }

    check(cfg.epi.natural_death_rate >= 0.0, "mu", "must be >= 0");
    check(cfg.epi.base_transmission >= 0.0, "beta0", "must be >= 0");
    check(cfg.epi.vaccine_efficacy >= 0.0 && cfg.epi.vaccine_efficacy <= 1.0, "delta",
          "must be in [0,1]");
    check(cfg.epi.asymptomatic_infectiousness >= 0.0 && cfg.epi.asymptomatic_infectiousness <= 1.0,
          "b", "must be in [0,1]");
    check(cfg.epi.symptomatic_fraction >= 0.0 && cfg.epi.symptomatic_fraction <= 1.0, "p",
          "must be in [0,1]");
    check(cfg.epi.hospitalization_ratio >= 0.0 && cfg.epi.hospitalization_ratio <= 1.0, "xi",
          "must be in [0,1]");
    check(cfg.baseline.vaccination_rate >= 0.0, "psi_init", "must be >= 0");
    check(cfg.baseline.masking_rate >= 0.0 && cfg.baseline.masking_rate <= 1.0, "eta_init",
          "must be in [0,1]");
    check(cfg.initial_infected >= 0.0 && cfg.initial_infected <= cfg.population, "I0",
          "must be in [0, K]");
    check(cfg.nonresponsive_share >= 0.0 && cfg.nonresponsive_share <= 1.0, "nonresponsive_share",
          "must be in [0,1]");
    check(cfg.population >= 1.0, "K", "must be >= 1");
    check(cfg.horizon_weeks >= 1, "T_weeks", "must be >= 1");
    check(cfg.num_runs >= 1, "n_runs", "must be >= 1");

    try {
        cfg.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("constraint violation: ") + err.what());
    }
    return parsed;
}

std::string serialize_config(const ParsedScenario& parsed)
{
    const ScenarioConfig& cfg = parsed.scenario;
    std::ostringstream out;
    out.precision(17);
    out << "[epi]\n";
    out << "mu = " << cfg.epi.natural_death_rate << "\n";
    out << "beta0 = " << cfg.epi.base_transmission << "\n";
    out << "delta = " << cfg.epi.vaccine_efficacy << "\n";
    out << "gamma_inv_days = " << 1.0 / cfg.epi.recovery_rate << "\n";
    out << "b = " << cfg.epi.asymptomatic_infectiousness << "\n";
    out << "k_inv_days = " << 1.0 / cfg.epi.latency_rate << "\n";
    out << "p = " << cfg.epi.symptomatic_fraction << "\n";
    out << "xi = " << cfg.epi.hospitalization_ratio << "\n\n";

    out << "[game]\n";
    out << "I_v = " << cfg.game.vaccine_lie_incentive << "\n";
    out << "I_m = " << cfg.game.mask_lie_incentive << "\n";
    out << "lambda1 = " << cfg.game.semantic_weight << "\n";
    out << "lambda2 = " << cfg.game.distortion_weight << "\n";
    out << "a = " << cfg.game.economic_factor << "\n";
    out << "alpha_rsa = " << cfg.game.rationality << "\n\n";

    out << "[behavior]\n";
    out << "psi_init = " << cfg.baseline.vaccination_rate << "\n";
    out << "eta_init = " << cfg.baseline.masking_rate << "\n";
    out << "I0 = " << cfg.initial_infected << "\n";
    out << "nonresponsive_share = " << cfg.nonresponsive_share << "\n";
    out << "vax_lie_min = " << cfg.vaccine_lie_band_min << "\n";
    out << "vax_lie_max = " << cfg.vaccine_lie_band_max << "\n";
    out << "mask_lie_min = " << cfg.mask_lie_band_min << "\n";
    out << "mask_lie_max = " << cfg.mask_lie_band_max << "\n";
    out << "prior_vaccinated = " << cfg.prior_vaccinated << "\n";
    out << "prior_masking = " << cfg.prior_masking << "\n\n";

    out << "[policy]\n";
    out << "kind = " << to_string(cfg.policy) << "\n";
    out << "D_star = " << cfg.distortion_threshold << "\n";
    out << "step_size = " << cfg.step_size << "\n";
    out << "psi_max = " << cfg.vaccination_cap << "\n";
    out << "eta_max = " << cfg.masking_cap << "\n";
    out << "noise_scale = " << cfg.noise_scale << "\n";
    out << "target_decay = " << cfg.target_decay << "\n";
    out << "uptake_rate = " << cfg.uptake_rate << "\n";
    out << "uptake_info_floor = " << cfg.uptake_info_floor << "\n";
    out << "uptake_seed = " << cfg.uptake_seed << "\n";
    out << "correction_cap = " << cfg.correction_cap << "\n";
    out << "prior_adaptation = " << cfg.prior_adaptation << "\n";
    out << "credibility_shrink = " << cfg.credibility_shrink << "\n";
    out << "step_credibility_floor = " << cfg.step_credibility_floor << "\n\n";

    out << "[simulation]\n";
    out << "K = " << cfg.population << "\n";
    out << "T_weeks = " << cfg.horizon_weeks << "\n";
    out << "n_runs = " << cfg.num_runs << "\n";
    out << "seed_base = " << cfg.seed_base << "\n";
    out << "equilibrium = " << to_string(cfg.equilibrium) << "\n";
    out << "substeps_per_day = " << cfg.substeps_per_day << "\n";
    out << "process_noise_sigma = " << cfg.process_noise_sigma << "\n";
    out << "sampled_reports = " << (cfg.sampled_reports ? "true" : "false") << "\n";
    out << "savgol_window = " << cfg.savgol_window << "\n";
    out << "savgol_order = " << cfg.savgol_order << "\n";
    out << "exp_smoothing_factor = " << cfg.exp_smoothing_factor << "\n\n";

    out << "[stress]\n";
    out << "xi_factor = " << parsed.stress.ihr_factor << "\n";
    out << "incentive_factor = " << parsed.stress.incentive_factor << "\n";
    out << "nrs_value = " << parsed.stress.nonresponsive_share << "\n";
    out << "delta_value = " << parsed.stress.vaccine_efficacy << "\n";
    return out.str();
}

}  // namespace episignal
