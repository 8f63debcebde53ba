#pragma once

#include "feedsim/study.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace feedsim {

/// Problem with a scenario file; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algo { kFwa, kGa };

/// Parsed scenario file. Study parameters default to the reference setup;
/// the optional fields are only needed by some subcommands.
struct ScenarioFile {
    StudyConfig study;
    std::optional<std::string> scenario;  // fixed | decoupled | motion | stability
    std::optional<std::string> motor;     // label of the motor to simulate/optimize
    std::optional<Gains> gains;
    std::optional<MotionGrid> motion_grid;
    bool has_motion = false;
    Algo algo = Algo::kFwa;
};

/// Strict parse: unknown keys and wrong types are errors.
ScenarioFile parse_scenario(const nlohmann::json& j);
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Serializes back to the file schema (used for config echo and the shipped defaults).
nlohmann::json to_json(const ScenarioFile& f);

/// Schema plus invariant checks; returns one message per problem, empty when valid.
std::vector<std::string> diagnose(const ScenarioFile& f);

/// Index of the motor with the given label, or ConfigError.
std::size_t find_motor(const StudyConfig& cfg, const std::string& label);

}  // namespace feedsim
