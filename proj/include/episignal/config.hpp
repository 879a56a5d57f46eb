#pragma once

#include "episignal/simulation.hpp"

#include <stdexcept>
#include <string>

namespace episignal {

/// Config rejection with enough context to name the offending input.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, int line = 0, std::string key = "")
        : std::runtime_error(std::move(message)), line_(line), key_(std::move(key))
    {
    }
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

struct ParsedScenario {
    ScenarioConfig scenario;
    StressFactors stress;
};

/// Parses the INI-style scenario document. Sections: [epi], [game],
/// [behavior], [policy], [simulation], [stress]. Missing keys take the
/// paper-baseline defaults; unknown keys are rejected with their location.
ParsedScenario parse_config(const std::string& text);

/// Canonical serialization of a scenario (round-trip stable).
std::string serialize_config(const ParsedScenario& parsed);

}  // namespace episignal
