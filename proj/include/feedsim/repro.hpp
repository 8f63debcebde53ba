#pragma once

#include "feedsim/study.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace feedsim {

/// Scenario ids understood by `repro`.
const std::vector<std::string>& repro_ids();

/// Default configuration behind a repro id; throws std::invalid_argument for unknown ids.
StudyConfig repro_config(const std::string& id, std::uint64_t seed = 0);

/// Runs the study operation behind a repro id.
SweepResult run_repro(const std::string& id, std::uint64_t seed = 0, int jobs = 1);

/// The three motors of the hardware comparison, with the 48 kg·cm² load.
StudyConfig hardware_comparison_config();

}  // namespace feedsim
